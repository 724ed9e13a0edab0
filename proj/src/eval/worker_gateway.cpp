#include "llmnas/eval/worker_gateway.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "llmnas/core/errors.hpp"
#include "llmnas/core/serialization.hpp"

namespace llmnas::eval {

using nlohmann::json;

namespace {
std::string seconds_text(std::chrono::milliseconds d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", static_cast<double>(d.count()) / 1000.0);
  return buf;
}
}  // namespace

json TrainProtocolRequest::to_json() const {
  return json{{"protocol_version", kProtocolVersion},
              {"request_kind", request_kind == RequestKind::Validate ? "Validate" : "TrainEval"},
              {"source_text", source_text},
              {"dataset", dataset},
              {"train", train},
              {"seed", seed}};
}

std::optional<WorkerReply> parse_worker_reply(std::string_view stdout_text, std::string& error) {
  json j;
  try {
    j = json::parse(stdout_text);
  } catch (const json::exception&) {
    error = stdout_text.find_first_not_of(" \t\r\n") == std::string_view::npos
                ? "worker produced no reply"
                : "worker reply is not a single JSON document";
    return std::nullopt;
  }
  if (!j.is_object()) {
    error = "worker reply is not a JSON object";
    return std::nullopt;
  }
  WorkerReply r;
  try {
    r.status = j.at("status").get<std::string>();
    r.protocol_version = j.value("protocol_version", std::string{});
    if (j.contains("accuracy") && !j["accuracy"].is_null()) r.accuracy = j["accuracy"].get<double>();
    if (j.contains("error_kind") && !j["error_kind"].is_null()) r.error_kind = j["error_kind"].get<std::string>();
    if (j.contains("message") && !j["message"].is_null()) r.message = j["message"].get<std::string>();
  } catch (const json::exception& e) {
    error = std::string("worker reply has wrong field types: ") + e.what();
    return std::nullopt;
  }
  if (r.status != "ok" && r.status != "error") {
    error = "worker reply has unknown status '" + r.status + "'";
    return std::nullopt;
  }
  if (!r.protocol_version.empty() && r.protocol_version != kProtocolVersion) {
    error = "worker speaks protocol version " + r.protocol_version + ", expected " +
            std::string(kProtocolVersion);
    return std::nullopt;
  }
  if (r.accuracy && !(std::isfinite(*r.accuracy) && *r.accuracy >= 0.0 && *r.accuracy <= 1.0)) {
    error = "worker reported accuracy outside [0, 1]";
    return std::nullopt;
  }
  return r;
}

std::string last_nonempty_line(std::string_view text) {
  std::size_t end = text.size();
  while (end > 0) {
    while (end > 0 && (text[end - 1] == '\n' || text[end - 1] == '\r' || text[end - 1] == ' ')) --end;
    if (end == 0) break;
    const auto nl = text.rfind('\n', end - 1);
    const std::size_t begin = nl == std::string_view::npos ? 0 : nl + 1;
    const auto line = text.substr(begin, end - begin);
    if (line.find_first_not_of(" \t") != std::string_view::npos) return std::string(line);
    end = begin;
  }
  return {};
}

EvaluationOutcome classify_failure(const ProcessResult& process, std::chrono::milliseconds timeout) {
  if (process.timed_out) {
    return EvaluationOutcome::failure(
        OutcomeKind::Timeout,
        "evaluation exceeded the " + seconds_text(timeout) + " s timeout and the worker was killed");
  }
  const std::string tail = last_nonempty_line(process.stderr_text);
  std::string parse_error;
  const auto reply = parse_worker_reply(process.stdout_text, parse_error);
  if (reply && reply->status == "error") {
    const std::string msg = reply->message.value_or(tail.empty() ? "worker reported an error" : tail);
    if (reply->error_kind == "validation") return EvaluationOutcome::failure(OutcomeKind::ValidationError, msg);
    return EvaluationOutcome::failure(OutcomeKind::RuntimeError, msg);
  }
  std::string msg;
  if (process.term_signal != 0) {
    msg = "worker killed by signal " + std::to_string(process.term_signal);
    if (const char* name = ::strsignal(process.term_signal)) msg += std::string(" (") + name + ")";
  } else if (process.exit_code != 0) {
    msg = "worker exited with status " + std::to_string(process.exit_code);
  } else if (!reply) {
    msg = parse_error;
  } else {
    msg = "worker reply lacks an accuracy";
  }
  if (!tail.empty()) msg += ": " + tail;
  return EvaluationOutcome::failure(OutcomeKind::RuntimeError, msg);
}

SubprocessEvaluator::SubprocessEvaluator(WorkerCommand command,
                                         std::chrono::milliseconds validation_timeout,
                                         std::int64_t seed)
    : command_(std::move(command)), validation_timeout_(validation_timeout), seed_(seed) {
  if (command_.argv.empty()) throw ConfigError("worker.command must not be empty");
}

EvaluationOutcome SubprocessEvaluator::invoke(const TrainProtocolRequest& request,
                                              std::chrono::milliseconds timeout) {
  ProcessResult process;
  try {
    process = run_process(command_.argv, dump_line(request.to_json()), timeout, command_.options);
  } catch (const Error& e) {
    return EvaluationOutcome::failure(OutcomeKind::RuntimeError, e.what());
  }
  if (process.exited_cleanly()) {
    std::string error;
    const auto reply = parse_worker_reply(process.stdout_text, error);
    if (reply && reply->status == "ok") {
      if (request.request_kind == RequestKind::Validate) return EvaluationOutcome::success(0.0);
      if (reply->accuracy) return EvaluationOutcome::success(*reply->accuracy);
    }
  }
  return classify_failure(process, timeout);
}

std::optional<EvaluationOutcome> SubprocessEvaluator::validate(const Candidate& candidate,
                                                               const DatasetSpec& dataset) {
  TrainProtocolRequest request;
  request.request_kind = RequestKind::Validate;
  request.source_text = candidate.source_text;
  request.dataset = dataset;
  request.seed = seed_;
  auto outcome = invoke(request, validation_timeout_);
  if (outcome.is_success()) return std::nullopt;
  return outcome;
}

EvaluationOutcome SubprocessEvaluator::evaluate(const Candidate& candidate, const DatasetSpec& dataset,
                                                const TrainConfig& train,
                                                std::chrono::milliseconds timeout) {
  TrainProtocolRequest request;
  request.request_kind = RequestKind::TrainEval;
  request.source_text = candidate.source_text;
  request.dataset = dataset;
  request.train = train;
  request.seed = seed_;
  return invoke(request, timeout);
}

}  // namespace llmnas::eval
