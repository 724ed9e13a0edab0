#include "llmnas/analytics/summary.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "llmnas/analytics/rank_stats.hpp"
#include "llmnas/analytics/trajectory.hpp"
#include "llmnas/core/errors.hpp"
#include "llmnas/core/format.hpp"

namespace llmnas::analytics {

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string p_text(double p, int shuffles) {
  const double floor = 1.0 / (1.0 + shuffles);
  char buf[48];
  if (p <= floor) {
    std::snprintf(buf, sizeof buf, "p < %.1e", floor);
  } else {
    std::snprintf(buf, sizeof buf, "p = %.4f", p);
  }
  return buf;
}

}  // namespace

SummaryReport summarize(std::span<const RunLogRecord> log, const SummaryOptions& options) {
  if (log.empty()) throw Error("cannot summarize an empty run log");
  SummaryReport r;
  r.basis = options.basis;
  r.total_iterations = static_cast<std::int64_t>(log.size());

  std::vector<double> accuracies;
  for (const auto& rec : log) {
    if (rec.outcome.is_success()) accuracies.push_back(*rec.outcome.accuracy());
  }
  r.successful_evaluations = static_cast<std::int64_t>(accuracies.size());
  r.success_rate = static_cast<double>(r.successful_evaluations) / static_cast<double>(r.total_iterations);

  if (accuracies.empty()) {
    r.notes.push_back("NoSuccesses: no evaluation succeeded, so accuracy and correlation fields are absent");
    r.p_value_note = "not computed";
    return r;
  }
  r.first_accuracy = accuracies.front();
  r.best_accuracy = *std::max_element(accuracies.begin(), accuracies.end());
  r.improvement = *r.best_accuracy - *r.first_accuracy;

  std::vector<double> ys;
  if (options.basis == CorrelationBasis::SuccessOrder) {
    ys = accuracies;
  } else {
    ys = build_trajectories(log).per_iteration;
  }
  std::vector<double> xs(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i + 1);
  r.correlation_samples = ys.size();

  if (ys.size() < 2) {
    r.notes.push_back("correlations undefined: fewer than two samples");
    r.p_value_note = "not computed";
    return r;
  }
  try {
    r.spearman_rho = spearman(xs, ys);
    r.kendall_tau = kendall(xs, ys);
  } catch (const DegenerateInput&) {
    r.notes.push_back("correlations undefined: accuracy is constant across samples");
    r.p_value_note = "not computed";
    return r;
  }
  if (r.correlation_samples < 30) {
    r.notes.push_back("correlations rest on only " + std::to_string(r.correlation_samples) +
                      " samples");
  }
  if (options.permutations > 0) {
    r.spearman_p = permutation_p_value(xs, ys, RankStatistic::Spearman, options.permutations,
                                       options.permutation_seed);
    r.kendall_p = permutation_p_value(xs, ys, RankStatistic::Kendall, options.permutations,
                                      options.permutation_seed + 1);
    r.p_value_note = "two-sided permutation test, " + std::to_string(options.permutations) +
                     " shuffles (seed " + std::to_string(options.permutation_seed) +
                     "): rho " + p_text(*r.spearman_p, options.permutations) + ", tau " +
                     p_text(*r.kendall_p, options.permutations);
  } else {
    r.p_value_note = "not computed";
  }
  return r;
}

nlohmann::json to_json(const SummaryReport& r) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return json{{"status", r.no_successes() ? "NoSuccesses" : "ok"},
              {"total_iterations", r.total_iterations},
              {"successful_evaluations", r.successful_evaluations},
              {"success_rate", r.success_rate},
              {"first_accuracy", opt(r.first_accuracy)},
              {"best_accuracy", opt(r.best_accuracy)},
              {"improvement", opt(r.improvement)},
              {"spearman_rho", opt(r.spearman_rho)},
              {"kendall_tau", opt(r.kendall_tau)},
              {"spearman_p", opt(r.spearman_p)},
              {"kendall_p", opt(r.kendall_p)},
              {"correlation_samples", r.correlation_samples},
              {"correlation_basis",
               r.basis == CorrelationBasis::SuccessOrder ? "success_order" : "iteration_filled"},
              {"p_value_note", r.p_value_note},
              {"notes", r.notes}};
}

std::string render_summary(const SummaryReport& r) {
  auto pct = [](const std::optional<double>& v) { return v ? format_percent(*v) : std::string("n/a"); };
  auto corr = [](const std::optional<double>& v) { return v ? fixed3(*v) : std::string("undefined"); };
  std::ostringstream out;
  auto row = [&](std::string_view k, const std::string& v) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-12s %s\n", std::string(k).c_str(), v.c_str());
    out << buf;
  };
  row("Total iters", std::to_string(r.total_iterations));
  row("Succ. evals", std::to_string(r.successful_evaluations));
  row("Succ. rate", format_rate(r.successful_evaluations, r.total_iterations));
  row("1st acc.", pct(r.first_accuracy));
  row("Best acc.", pct(r.best_accuracy));
  row("Improve.", r.improvement ? format_percent_points(*r.improvement) : std::string("n/a"));
  row("rho", corr(r.spearman_rho));
  row("tau", corr(r.kendall_tau));
  row("n (corr.)", std::to_string(r.correlation_samples));
  row("p-values", r.p_value_note);
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  return out.str();
}

}  // namespace llmnas::analytics
