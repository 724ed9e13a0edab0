#pragma once

#include <cstdint>
#include <string>

namespace llmnas {

/// Fraction as a percent with one decimal, half away from zero ("28.2%").
std::string format_percent(double fraction);

/// Same, with an explicit sign and "pp" unit for differences ("+41.0 pp").
std::string format_percent_points(double fraction_delta);

/// successes / total as a percent, rounded exactly on integers ("76.0%").
std::string format_rate(std::int64_t successes, std::int64_t total);

}  // namespace llmnas
