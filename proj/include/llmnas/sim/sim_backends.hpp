#pragma once

#include "llmnas/search/backends.hpp"
#include "llmnas/sim/landscape.hpp"

namespace llmnas::sim {

// Seeds its generator from the request's effective seed, so a run is
// reproducible from the log alone.
class SimCodeGenerator : public search::CodeGenerator {
 public:
  explicit SimCodeGenerator(const SimLandscape& landscape) : landscape_(landscape) {}
  std::string generate(const search::GenerationRequest& request) override;

 private:
  const SimLandscape& landscape_;
};

class SimPromptImprover : public search::PromptImprover {
 public:
  explicit SimPromptImprover(const SimLandscape& landscape) : landscape_(landscape) {}
  std::string improve(const search::ImprovementRequest& request) override;

 private:
  const SimLandscape& landscape_;
};

class SimEvaluator : public search::EvaluationBackend {
 public:
  explicit SimEvaluator(const SimLandscape& landscape) : landscape_(landscape) {}
  std::optional<EvaluationOutcome> validate(const Candidate& candidate,
                                            const DatasetSpec& dataset) override;
  EvaluationOutcome evaluate(const Candidate& candidate, const DatasetSpec& dataset,
                             const TrainConfig& train, std::chrono::milliseconds timeout) override;

 private:
  const SimLandscape& landscape_;
};

// Logical clock: the epoch plus one second per iteration, ISO-8601.
std::string sim_timestamp(std::int64_t iteration);

}  // namespace llmnas::sim
