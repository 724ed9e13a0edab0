#include "llmnas/sim/sim_backends.hpp"

#include <ctime>

namespace llmnas::sim {

std::string SimCodeGenerator::generate(const search::GenerationRequest& request) {
  const auto call_seed = static_cast<std::uint64_t>(request.sampling.effective_seed());
  std::seed_seq seq{static_cast<std::uint32_t>(call_seed), static_cast<std::uint32_t>(call_seed >> 32),
                    static_cast<std::uint32_t>(landscape_.seed),
                    static_cast<std::uint32_t>(landscape_.seed >> 32)};
  std::mt19937_64 rng(seq);
  std::optional<std::string> suggestions;
  if (request.inputs.previous_suggestions) suggestions = request.inputs.previous_suggestions->suggestions;
  return sim_generate(landscape_, request.inputs.best_source, suggestions, rng);
}

std::string SimPromptImprover::improve(const search::ImprovementRequest& request) {
  return render_improver_reply(sim_improve(request.best_source, request.best_accuracy,
                                           request.current_source, request.outcome, request.window,
                                           landscape_.dimension));
}

std::optional<EvaluationOutcome> SimEvaluator::validate(const Candidate& candidate, const DatasetSpec&) {
  std::string error;
  if (decode_genes(candidate.source_text, landscape_.dimension, error)) return std::nullopt;
  return EvaluationOutcome::failure(OutcomeKind::ValidationError, error);
}

EvaluationOutcome SimEvaluator::evaluate(const Candidate& candidate, const DatasetSpec&, const TrainConfig&,
                                         std::chrono::milliseconds) {
  return sim_evaluate(candidate.source_text, landscape_);
}

std::string sim_timestamp(std::int64_t iteration) {
  const std::time_t t = static_cast<std::time_t>(iteration);
  std::tm tm{};
  ::gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace llmnas::sim
