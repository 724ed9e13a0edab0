#pragma once

// The three collaborators of the search loop. Production implementations
// talk to an LLM endpoint and a training worker; the sim-env module provides
// deterministic stand-ins behind the same interfaces.

#include <chrono>
#include <functional>
#include <optional>
#include <string>

#include "llmnas/core/types.hpp"
#include "llmnas/memory/history_window.hpp"
#include "llmnas/prompt/prompts.hpp"

namespace llmnas::search {

struct GenerationRequest {
  std::string prompt;
  SamplingParams sampling;
  prompt::GeneratorPromptInputs inputs;
};

struct ImprovementRequest {
  std::string prompt;
  SamplingParams sampling;
  std::string best_source;
  double best_accuracy = 0.0;
  std::string current_source;
  EvaluationOutcome outcome;
  memory::HistoryWindow window;
};

class CodeGenerator {
 public:
  virtual ~CodeGenerator() = default;
  // Raw model reply. May throw TransportError or EmptyResponse.
  virtual std::string generate(const GenerationRequest& request) = 0;
};

class PromptImprover {
 public:
  virtual ~PromptImprover() = default;
  // Raw model reply, parsed by the loop. May throw TransportError or EmptyResponse.
  virtual std::string improve(const ImprovementRequest& request) = 0;
};

class EvaluationBackend {
 public:
  virtual ~EvaluationBackend() = default;
  // Quick shape check. std::nullopt means the candidate passed.
  virtual std::optional<EvaluationOutcome> validate(const Candidate& candidate,
                                                    const DatasetSpec& dataset) = 0;
  virtual EvaluationOutcome evaluate(const Candidate& candidate, const DatasetSpec& dataset,
                                     const TrainConfig& train,
                                     std::chrono::milliseconds timeout) = 0;
};

// Produces the timestamp written into each log record.
using TimestampSource = std::function<std::string(std::int64_t iteration)>;

// ISO-8601 UTC wall clock.
std::string wall_clock_timestamp(std::int64_t iteration);

struct Backends {
  CodeGenerator& generator;
  PromptImprover& improver;
  EvaluationBackend& evaluator;
  TimestampSource timestamp = wall_clock_timestamp;
};

}  // namespace llmnas::search
