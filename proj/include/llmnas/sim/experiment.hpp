#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "llmnas/core/types.hpp"
#include "llmnas/prompt/templates.hpp"
#include "llmnas/search/search_loop.hpp"
#include "llmnas/sim/landscape.hpp"

namespace llmnas::sim {

struct SimParams {
  int dimension = 8;
  double noise = 0.02;
  double failure_rate = 0.2;
  std::uint64_t landscape_seed = 2024;
};

/// Runs the unmodified search loop against the simulated backends.
search::SearchResult run_sim_search(const RunConfig& config, const SimLandscape& landscape,
                                    const prompt::PromptTemplates& templates,
                                    const std::filesystem::path& log_path, bool overwrite = false);

/// Resumes a simulated run from its log.
search::SearchResult resume_sim_search(const RunConfig& config, const SimLandscape& landscape,
                                       const prompt::PromptTemplates& templates,
                                       const std::filesystem::path& log_path);

struct AblationExperiment {
  SimParams sim;
  std::vector<std::int64_t> seeds;
  std::int64_t iterations = 150;
  std::size_t window_size = 5;
  std::vector<Ablation> variants{Ablation::None, Ablation::NoFeedback, Ablation::NoReference};
  // Per-run logs go here; a temporary directory is used (and removed) when unset.
  std::optional<std::filesystem::path> log_dir;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct VariantRun {
  Ablation ablation = Ablation::None;
  std::int64_t seed = 0;
  double final_best = 0.0;
  std::optional<double> first_success;
  std::int64_t successes = 0;
};

struct VariantSummary {
  Ablation ablation = Ablation::None;
  double median_final_best = 0.0;
  double median_improvement = 0.0;  // over the run's own first success; 0 without successes
  double mean_success_rate = 0.0;
};

struct AblationReport {
  std::vector<VariantRun> runs;
  std::vector<VariantSummary> summaries;

  const VariantSummary& summary(Ablation ablation) const;
  std::vector<const VariantRun*> runs_of(Ablation ablation) const;
  // Fraction of seeds on which the full loop's final best beats `other`'s.
  double full_win_fraction(Ablation other) const;
};

AblationReport run_ablation_experiment(const AblationExperiment& experiment,
                                       const prompt::PromptTemplates& templates);

std::string render_ablation_report(const AblationReport& report);

double median(std::vector<double> values);

}  // namespace llmnas::sim
