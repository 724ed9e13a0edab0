#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "llmnas/core/types.hpp"
#include "llmnas/search/backends.hpp"

namespace llmnas::llm {

struct LlmEndpoint {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string model_name;
  std::optional<std::string> api_key;
  std::chrono::milliseconds request_timeout = std::chrono::minutes(10);
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff = std::chrono::milliseconds(500);
  // When set, every request and response body is appended here as JSONL.
  std::optional<std::filesystem::path> debug_log;

  void validate() const;
};

struct HttpReply {
  int status = 0;
  std::string body;
};

// Moves one serialized chat-completions request to the backend. Throws
// TransportError on connection-level failure.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual HttpReply post_chat(const LlmEndpoint& endpoint, const std::string& body) = 0;
};

std::shared_ptr<ChatTransport> make_http_transport();

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// OpenAI-compatible chat-completions client.
///
/// The seed sent with each request is `params.base_seed + params.call_counter`;
/// callers advance the counter after every call. Transport failures, HTTP 408,
/// 429 and 5xx are retried up to `max_retries` times with exponential backoff.
class LlmClient {
 public:
  explicit LlmClient(LlmEndpoint endpoint,
                     std::shared_ptr<ChatTransport> transport = make_http_transport(),
                     Sleeper sleeper = nullptr);

  /// Returns the assistant message. Throws TransportError once retries are
  /// exhausted (or on a non-retryable HTTP status) and EmptyResponse for a
  /// zero-length completion.
  std::string complete(const std::string& system_prompt, const std::string& user_prompt,
                       const SamplingParams& params) const;

  /// The request body; an empty system prompt is omitted from `messages`.
  static nlohmann::json build_request(const LlmEndpoint& endpoint, const std::string& system_prompt,
                                      const std::string& user_prompt, const SamplingParams& params);

  const LlmEndpoint& endpoint() const { return endpoint_; }

 private:
  void mirror(std::string_view direction, const std::string& body) const;

  LlmEndpoint endpoint_;
  std::shared_ptr<ChatTransport> transport_;
  Sleeper sleeper_;
  mutable std::mutex debug_mutex_;
};

// Code Generator role over an LlmClient.
class LlmCodeGenerator : public search::CodeGenerator {
 public:
  explicit LlmCodeGenerator(const LlmClient& client) : client_(client) {}
  std::string generate(const search::GenerationRequest& request) override;

 private:
  const LlmClient& client_;
};

// Prompt Improver role over an LlmClient.
class LlmPromptImprover : public search::PromptImprover {
 public:
  explicit LlmPromptImprover(const LlmClient& client) : client_(client) {}
  std::string improve(const search::ImprovementRequest& request) override;

 private:
  const LlmClient& client_;
};

}  // namespace llmnas::llm
