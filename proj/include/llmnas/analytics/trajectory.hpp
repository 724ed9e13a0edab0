#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "llmnas/core/types.hpp"

namespace llmnas::analytics {

inline constexpr std::size_t kDefaultSmoothingWindow = 15;

struct TrajectorySeries {
  // Accuracy per iteration; failed iterations repeat the previous value (0 before any success).
  std::vector<double> per_iteration;
  std::vector<double> smoothed;
  // Running maximum over successful evaluations only.
  std::vector<double> best_so_far;
};

/// Centered moving average of width `window`; near the ends the window is
/// truncated to the samples that exist.
std::vector<double> centered_moving_average(std::span<const double> values, std::size_t window);

TrajectorySeries build_trajectories(std::span<const RunLogRecord> log,
                                    std::size_t smoothing_window = kDefaultSmoothingWindow);

// Columns: iteration,per_iteration,smoothed,best_so_far
void write_trajectory_csv(std::ostream& out, const TrajectorySeries& series);

// Columns: iteration,<column>
void write_series_csv(std::ostream& out, std::string_view column, std::span<const double> values);

}  // namespace llmnas::analytics
