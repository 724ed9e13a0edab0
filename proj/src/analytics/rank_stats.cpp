#include "llmnas/analytics/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "llmnas/core/errors.hpp"

namespace llmnas::analytics {

namespace {

void check_pair(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error("rank statistics need sequences of equal length");
  if (xs.size() < 2) throw Error("rank statistics need at least two observations");
}

double pearson_of(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateInput("rank correlation undefined for constant input");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Number of pairs within groups of equal values in a sorted range.
template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t pairs = 0;
  while (first != last) {
    auto run_end = first + 1;
    while (run_end != last && eq(*first, *run_end)) ++run_end;
    const std::int64_t len = run_end - first;
    pairs += len * (len - 1) / 2;
    first = run_end;
  }
  return pairs;
}

// Stable merge sort of `v` counting inversions (pairs i < j with v[i] > v[j]).
std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, v.begin() + lo);
  return inv;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold equal values; ranks are 1-based.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson_of(rx, ry);
}

double kendall(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] < xs[b] || (xs[a] == xs[b] && ys[a] < ys[b]);
  });

  const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t tx = tied_pairs(order.begin(), order.end(),
                                     [&](std::size_t a, std::size_t b) { return xs[a] == xs[b]; });
  const std::int64_t txy = tied_pairs(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] == xs[b] && ys[a] == ys[b];
  });

  std::vector<double> y_sorted(n), scratch(n);
  for (std::size_t i = 0; i < n; ++i) y_sorted[i] = ys[order[i]];
  // Within x-ties y is ascending, so only pairs with distinct x can invert.
  const std::int64_t discordant = count_inversions(y_sorted, scratch, 0, n);
  const std::int64_t ty = tied_pairs(y_sorted.begin(), y_sorted.end(),
                                     [](double a, double b) { return a == b; });

  const std::int64_t concordant_minus_discordant = n0 - tx - ty + txy - 2 * discordant;
  const double denom = std::sqrt(static_cast<double>(n0 - tx)) * std::sqrt(static_cast<double>(n0 - ty));
  if (n0 - tx == 0 || n0 - ty == 0) throw DegenerateInput("rank correlation undefined for constant input");
  return std::clamp(static_cast<double>(concordant_minus_discordant) / denom, -1.0, 1.0);
}

double permutation_p_value(std::span<const double> xs, std::span<const double> ys,
                           RankStatistic statistic, int shuffles, std::uint64_t seed) {
  if (shuffles < 1) throw Error("permutation test needs at least one shuffle");
  auto stat = [&](std::span<const double> y) {
    return statistic == RankStatistic::Spearman ? spearman(xs, y) : kendall(xs, y);
  };
  const double observed = std::abs(stat(ys));
  std::vector<double> shuffled(ys.begin(), ys.end());
  std::mt19937_64 rng(seed);
  int extreme = 0;
  for (int i = 0; i < shuffles; ++i) {
    // Fisher-Yates with a portable index draw.
    for (std::size_t k = shuffled.size() - 1; k > 0; --k) {
      const auto j = static_cast<std::size_t>(rng() % (k + 1));
      std::swap(shuffled[k], shuffled[j]);
    }
    if (std::abs(stat(shuffled)) >= observed - 1e-12) ++extreme;
  }
  return static_cast<double>(1 + extreme) / static_cast<double>(1 + shuffles);
}

}  // namespace llmnas::analytics
