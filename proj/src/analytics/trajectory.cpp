#include "llmnas/analytics/trajectory.hpp"

#include <algorithm>
#include <cstdio>

#include "llmnas/core/errors.hpp"

namespace llmnas::analytics {

std::vector<double> centered_moving_average(std::span<const double> values, std::size_t window) {
  if (window == 0) throw Error("smoothing window must be at least 1");
  const std::size_t left = (window - 1) / 2;
  const std::size_t right = window / 2;
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(values.size() - 1, i + right);
    double sum = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) sum += values[k];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

TrajectorySeries build_trajectories(std::span<const RunLogRecord> log, std::size_t smoothing_window) {
  TrajectorySeries s;
  s.per_iteration.reserve(log.size());
  s.best_so_far.reserve(log.size());
  double last = 0.0;
  double best = 0.0;
  for (const auto& r : log) {
    if (r.outcome.is_success()) {
      last = *r.outcome.accuracy();
      best = std::max(best, last);
    }
    s.per_iteration.push_back(last);
    s.best_so_far.push_back(best);
  }
  s.smoothed = centered_moving_average(s.per_iteration, smoothing_window);
  return s;
}

void write_trajectory_csv(std::ostream& out, const TrajectorySeries& series) {
  out << "iteration,per_iteration,smoothed,best_so_far\n";
  char buf[128];
  for (std::size_t i = 0; i < series.per_iteration.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i + 1, series.per_iteration[i],
                  series.smoothed[i], series.best_so_far[i]);
    out << buf;
  }
}

void write_series_csv(std::ostream& out, std::string_view column, std::span<const double> values) {
  out << "iteration," << column << "\n";
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, values[i]);
    out << buf;
  }
}

}  // namespace llmnas::analytics
