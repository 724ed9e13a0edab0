#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace llmnas::analytics {

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman's rho: Pearson correlation of the average ranks.
/// Requires equal lengths >= 2; throws DegenerateInput when either input
/// is constant.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Kendall's tau-b (tie-corrected), O(n log n). Same preconditions and
/// errors as spearman.
double kendall(std::span<const double> xs, std::span<const double> ys);

enum class RankStatistic { Spearman, Kendall };

/// Two-sided permutation p-value: ys is shuffled `shuffles` times with a
/// seeded generator and the p-value is (1 + #{|stat*| >= |stat|}) / (1 + shuffles).
double permutation_p_value(std::span<const double> xs, std::span<const double> ys,
                           RankStatistic statistic, int shuffles, std::uint64_t seed);

}  // namespace llmnas::analytics
