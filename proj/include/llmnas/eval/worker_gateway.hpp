#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "llmnas/core/types.hpp"
#include "llmnas/eval/subprocess.hpp"
#include "llmnas/search/backends.hpp"

namespace llmnas::eval {

// Wire format documented in docs/worker_protocol.md.
inline constexpr std::string_view kProtocolVersion = "1";
inline constexpr std::int64_t kDefaultWorkerSeed = 43;

enum class RequestKind { Validate, TrainEval };

struct TrainProtocolRequest {
  RequestKind request_kind = RequestKind::Validate;
  std::string source_text;
  DatasetSpec dataset;
  TrainConfig train;
  std::int64_t seed = kDefaultWorkerSeed;

  nlohmann::json to_json() const;
};

struct WorkerReply {
  std::string status;  // "ok" | "error"
  std::optional<double> accuracy;
  std::optional<std::string> error_kind;  // "validation" | "runtime"
  std::optional<std::string> message;
  std::string protocol_version;
};

/// Parses the single JSON document a worker prints on stdout. Returns
/// std::nullopt and fills `error` when the reply does not follow the protocol.
std::optional<WorkerReply> parse_worker_reply(std::string_view stdout_text, std::string& error);

/// Maps a failed worker invocation to ValidationError, RuntimeError or
/// Timeout. A timed-out process is always Timeout; a well-formed error reply
/// maps by its error_kind; anything else (non-zero exit, signal, malformed
/// reply) is RuntimeError carrying the last line of the worker's stderr.
EvaluationOutcome classify_failure(const ProcessResult& process, std::chrono::milliseconds timeout);

// Last non-empty line of `text`, or "" when there is none.
std::string last_nonempty_line(std::string_view text);

struct WorkerCommand {
  std::vector<std::string> argv;
  ProcessOptions options;
};

/// Evaluation backend that runs every request in a fresh worker subprocess.
class SubprocessEvaluator : public search::EvaluationBackend {
 public:
  SubprocessEvaluator(WorkerCommand command, std::chrono::milliseconds validation_timeout,
                      std::int64_t seed = kDefaultWorkerSeed);

  std::optional<EvaluationOutcome> validate(const Candidate& candidate,
                                            const DatasetSpec& dataset) override;
  EvaluationOutcome evaluate(const Candidate& candidate, const DatasetSpec& dataset,
                             const TrainConfig& train, std::chrono::milliseconds timeout) override;

 private:
  EvaluationOutcome invoke(const TrainProtocolRequest& request, std::chrono::milliseconds timeout);

  WorkerCommand command_;
  std::chrono::milliseconds validation_timeout_;
  std::int64_t seed_;
};

}  // namespace llmnas::eval
