#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "llmnas/core/types.hpp"

namespace llmnas::analytics {

enum class CorrelationBasis {
  // Successful evaluations indexed 1..n in the order they happened.
  SuccessOrder,
  // Every iteration, using the fallback-filled per-iteration series.
  IterationFilled,
};

struct SummaryOptions {
  CorrelationBasis basis = CorrelationBasis::SuccessOrder;
  int permutations = 10000;  // 0 disables p-values
  std::uint64_t permutation_seed = 0;
};

struct SummaryReport {
  std::int64_t total_iterations = 0;
  std::int64_t successful_evaluations = 0;
  double success_rate = 0.0;
  // Absent when no evaluation succeeded.
  std::optional<double> first_accuracy;
  std::optional<double> best_accuracy;
  std::optional<double> improvement;
  // Absent when undefined (fewer than two samples or constant input).
  std::optional<double> spearman_rho;
  std::optional<double> kendall_tau;
  std::optional<double> spearman_p;
  std::optional<double> kendall_p;
  std::size_t correlation_samples = 0;
  CorrelationBasis basis = CorrelationBasis::SuccessOrder;
  std::string p_value_note;
  std::vector<std::string> notes;

  bool no_successes() const { return successful_evaluations == 0; }
};

/// Table-style statistics for one run log. Throws Error on an empty log; a
/// log without successes still produces a report (accuracy fields absent).
SummaryReport summarize(std::span<const RunLogRecord> log, const SummaryOptions& options = {});

nlohmann::json to_json(const SummaryReport& report);

// Human-readable two-column table.
std::string render_summary(const SummaryReport& report);

}  // namespace llmnas::analytics
