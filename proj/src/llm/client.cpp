#include "llmnas/llm/client.hpp"

#include <fstream>
#include <thread>

#include "llmnas/core/errors.hpp"
#include "llmnas/core/serialization.hpp"

namespace llmnas::llm {

using nlohmann::json;

void LlmEndpoint::validate() const {
  if (base_url.empty()) throw ConfigError("endpoint.base_url must not be empty");
  if (max_retries < 0) throw ConfigError("endpoint.max_retries must be non-negative");
  if (request_timeout.count() <= 0) throw ConfigError("endpoint.request_timeout must be positive");
}

namespace {

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

std::string parse_content(const std::string& body) {
  json reply;
  try {
    reply = json::parse(body);
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat-completions reply: ") + e.what());
  }
  const auto choices = reply.find("choices");
  if (choices == reply.end() || !choices->is_array() || choices->empty()) {
    throw TransportError("chat-completions reply has no choices: " + truncate_utf8(body, 300));
  }
  const auto& message = (*choices)[0].value("message", json::object());
  const auto content = message.find("content");
  if (content == message.end() || content->is_null()) return {};
  if (!content->is_string()) throw TransportError("chat-completions content is not a string");
  return content->get<std::string>();
}

}  // namespace

LlmClient::LlmClient(LlmEndpoint endpoint, std::shared_ptr<ChatTransport> transport, Sleeper sleeper)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {
  endpoint_.validate();
  if (!transport_) throw ConfigError("LlmClient needs a transport");
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

json LlmClient::build_request(const LlmEndpoint& endpoint, const std::string& system_prompt,
                              const std::string& user_prompt, const SamplingParams& params) {
  json messages = json::array();
  if (!system_prompt.empty()) messages.push_back({{"role", "system"}, {"content", system_prompt}});
  messages.push_back({{"role", "user"}, {"content", user_prompt}});
  return json{{"model", endpoint.model_name},
              {"messages", std::move(messages)},
              {"temperature", params.temperature},
              {"top_p", params.top_p},
              {"max_tokens", params.max_new_tokens},
              {"seed", params.effective_seed()},
              {"stream", false}};
}

std::string LlmClient::complete(const std::string& system_prompt, const std::string& user_prompt,
                                const SamplingParams& params) const {
  params.validate();
  const std::string body = dump_line(build_request(endpoint_, system_prompt, user_prompt, params));
  mirror("request", body);

  std::string last_error;
  auto backoff = endpoint_.initial_backoff;
  for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
    if (attempt > 0) {
      sleeper_(backoff);
      backoff *= 2;
    }
    HttpReply reply;
    try {
      reply = transport_->post_chat(endpoint_, body);
    } catch (const TransportError& e) {
      last_error = e.what();
      continue;
    }
    mirror("response", reply.body);
    if (reply.status != 200) {
      last_error = "HTTP " + std::to_string(reply.status) + ": " + truncate_utf8(reply.body, 300);
      if (retryable_status(reply.status)) continue;
      throw TransportError(last_error);
    }
    std::string content;
    try {
      content = parse_content(reply.body);
    } catch (const TransportError& e) {
      last_error = e.what();
      continue;
    }
    if (content.empty()) throw EmptyResponse("model returned an empty completion");
    return content;
  }
  throw TransportError("chat completion failed after " + std::to_string(endpoint_.max_retries + 1) +
                       " attempts: " + last_error);
}

void LlmClient::mirror(std::string_view direction, const std::string& body) const {
  if (!endpoint_.debug_log) return;
  std::lock_guard lock(debug_mutex_);
  std::ofstream out(*endpoint_.debug_log, std::ios::app | std::ios::binary);
  json line{{"direction", direction}, {"endpoint", endpoint_.base_url}, {"body", body}};
  out << dump_line(line) << '\n';
}

std::string LlmCodeGenerator::generate(const search::GenerationRequest& request) {
  return client_.complete("", request.prompt, request.sampling);
}

std::string LlmPromptImprover::improve(const search::ImprovementRequest& request) {
  return client_.complete("", request.prompt, request.sampling);
}

}  // namespace llmnas::llm
