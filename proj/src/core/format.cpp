#include "llmnas/core/format.hpp"

#include <cmath>
#include <cstdio>

namespace llmnas {

namespace {
// Tenths of a percent. The nudge absorbs representation error for inputs
// that sit exactly on a half step in decimal, e.g. 0.7595.
double tenths_of_percent(double fraction) {
  return std::round(fraction * 1000.0 + std::copysign(1e-7, fraction));
}
}  // namespace

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", tenths_of_percent(fraction) / 10.0 + 0.0);
  return buf;
}

std::string format_percent_points(double fraction_delta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f pp", tenths_of_percent(fraction_delta) / 10.0 + 0.0);
  return buf;
}

std::string format_rate(std::int64_t successes, std::int64_t total) {
  if (total <= 0) return "n/a";
  // Round half up on the integer grid of tenths of a percent.
  const std::int64_t tenths = (successes * 2000 + total) / (2 * total);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%lld%%", static_cast<long long>(tenths / 10),
                static_cast<long long>(tenths % 10));
  return buf;
}

}  // namespace llmnas
