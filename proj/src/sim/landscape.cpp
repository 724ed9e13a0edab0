#include "llmnas/sim/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <regex>
#include <set>

#include "llmnas/core/digest.hpp"
#include "llmnas/core/errors.hpp"
#include "llmnas/core/format.hpp"

namespace llmnas::sim {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string fmt_gene(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

}  // namespace

SimLandscape SimLandscape::make(int dimension, double noise, double failure_rate, std::uint64_t seed) {
  SimLandscape l;
  l.dimension = dimension;
  l.noise = noise;
  l.failure_rate = failure_rate;
  l.seed = seed;
  std::mt19937_64 rng(splitmix64(seed));
  for (int i = 0; i < dimension; ++i) l.optimum.push_back(2.0 * uniform01(rng) - 1.0);
  l.validate();
  return l;
}

void SimLandscape::validate() const {
  if (dimension < 1) throw ConfigError("sim.dimension must be at least 1");
  if (static_cast<int>(optimum.size()) != dimension) throw ConfigError("sim optimum has wrong length");
  if (!(noise >= 0.0)) throw ConfigError("sim.noise must be non-negative");
  if (!(failure_rate >= 0.0 && failure_rate <= 1.0)) throw ConfigError("sim.failure_rate must lie in [0, 1]");
}

double SimLandscape::score(std::span<const double> genes, std::string_view noise_key) const {
  double msd = 0.0;
  for (int i = 0; i < dimension; ++i) {
    const double d = genes[i] - optimum[i];
    msd += d * d;
  }
  msd /= dimension;
  double jitter = 0.0;
  if (noise > 0.0) {
    const std::string h = digest(noise_key);
    const std::uint64_t key = std::stoull(h.substr(0, 16), nullptr, 16);
    const double u = static_cast<double>(splitmix64(key ^ splitmix64(seed)) >> 11) * 0x1.0p-53;
    jitter = noise * (2.0 * u - 1.0);
  }
  return std::clamp(1.0 - msd + jitter, 0.0, 1.0);
}

std::string encode_genes(std::span<const double> genes) {
  std::string s = "class Net:\n    # simulated architecture encoding\n    genome = [";
  for (std::size_t i = 0; i < genes.size(); ++i) {
    if (i) s += ", ";
    s += fmt_gene(genes[i]);
  }
  s += "]";
  return s;
}

std::optional<std::vector<double>> decode_genes(std::string_view source, int dimension, std::string& error) {
  const auto key = source.find("genome = [");
  if (source.find("class Net") == std::string_view::npos || key == std::string_view::npos) {
    error = "NameError: candidate defines no genome";
    return std::nullopt;
  }
  const auto open = key + std::string_view("genome = [").size();
  const auto close = source.find(']', open);
  if (close == std::string_view::npos) {
    error = "SyntaxError: '[' was never closed";
    return std::nullopt;
  }
  std::vector<double> genes;
  std::string body(source.substr(open, close - open));
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto comma = body.find(',', pos);
    if (comma == std::string::npos) comma = body.size();
    const std::string item = body.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || !std::isfinite(v)) {
      error = "ValueError: invalid gene '" + item + "'";
      return std::nullopt;
    }
    genes.push_back(v);
    pos = comma + 1;
  }
  if (static_cast<int>(genes.size()) != dimension) {
    error = "output shape mismatch: got (2, " + std::to_string(genes.size()) + "), expected (2, " +
            std::to_string(dimension) + ")";
    return std::nullopt;
  }
  return genes;
}

std::string encode_hint(const CoordinateHint& hint) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "adjust coordinate %d by %+.6f", hint.coordinate,
                hint.sign * hint.step);
  return buf;
}

std::optional<CoordinateHint> parse_hint(std::string_view text) {
  static const std::regex kHint(R"(adjust coordinate (\d+) by ([+-])(\d+(?:\.\d+)?))");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(text.begin(), text.end(), m, kHint)) return std::nullopt;
  CoordinateHint h;
  h.coordinate = std::stoi(m[1].str());
  h.sign = m[2].str() == "-" ? -1 : 1;
  h.step = std::stod(m[3].str());
  return h;
}

std::string sim_generate(const SimLandscape& landscape, const std::optional<std::string>& best_source,
                         const std::optional<std::string>& suggestions, std::mt19937_64& rng) {
  const int d = landscape.dimension;
  std::optional<std::vector<double>> genes;
  if (best_source) {
    std::string ignored;
    genes = decode_genes(*best_source, d, ignored);
  }
  const bool has_reference = genes.has_value();
  if (!genes) {
    genes.emplace();
    for (int i = 0; i < d; ++i) genes->push_back(2.0 * uniform01(rng) - 1.0);
  }
  const auto hint = suggestions ? parse_hint(*suggestions) : std::nullopt;
  if (hint && hint->coordinate >= 0 && hint->coordinate < d) {
    (*genes)[hint->coordinate] += hint->sign * hint->step;
  } else if (has_reference) {
    for (auto& g : *genes) g += kUnguidedEditScale * standard_normal(rng);
  }

  std::string code = encode_genes(*genes);
  if (uniform01(rng) < landscape.failure_rate) {
    switch (rng() % 3) {
      case 0:  // truncated list
        code = code.substr(0, code.size() - 1);
        break;
      case 1:  // one gene missing
        code = code.substr(0, code.rfind(',')) + "]";
        break;
      default:
        code.replace(code.find('[') + 1, 0, "nan, ");
        break;
    }
  }
  return "Here is the revised architecture.\n```python\n" + code + "\n```\n";
}

EvaluationOutcome sim_evaluate(std::string_view source, const SimLandscape& landscape) {
  std::string error;
  const auto genes = decode_genes(source, landscape.dimension, error);
  if (!genes) return EvaluationOutcome::failure(OutcomeKind::ValidationError, error);
  return EvaluationOutcome::success(landscape.score(*genes, source));
}

ImproverOutput sim_improve(const std::string& best_source, double best_accuracy,
                           const std::string& current_source, const EvaluationOutcome& outcome,
                           const memory::HistoryWindow& window, int dimension) {
  (void)best_source;
  (void)current_source;
  const double step = std::clamp(std::sqrt(std::max(1.0 - best_accuracy, 0.0)), 0.01, 0.5);
  ImproverOutput out;
  out.inspiration = "coordinate-wise line search: keep moves that pay off, reverse those that do not";

  auto suggest = [&](CoordinateHint h, std::string reason) {
    out.reason = std::move(reason);
    out.suggestions = encode_hint(h);
    return out;
  };
  if (window.empty()) return suggest({0, 1, step}, "no attempts recorded yet");

  std::set<std::pair<int, int>> penalized;
  std::map<int, std::size_t> last_tried;
  std::size_t index = 0;
  for (const auto& e : window.entries()) {
    if (const auto h = parse_hint(e.suggestion)) {
      last_tried[h->coordinate] = index;
      if (e.outcome.is_success() && *e.outcome.accuracy() < best_accuracy) {
        penalized.insert({h->coordinate, h->sign});
      }
    }
    ++index;
  }

  const auto& newest = window.entries().back();
  const auto newest_hint = parse_hint(newest.suggestion);
  const std::string outcome_text = memory::render_outcome(outcome);
  int start = 0;
  if (newest_hint) {
    const auto& h = *newest_hint;
    if (newest.outcome.is_success() && *newest.outcome.accuracy() >= best_accuracy && best_accuracy > 0.0) {
      return suggest(h, "the last move reached a new best (" + outcome_text + ")");
    }
    if (newest.outcome.is_success() && !penalized.contains({h.coordinate, -h.sign})) {
      return suggest({h.coordinate, -h.sign, step},
                     "moving coordinate " + std::to_string(h.coordinate) + " that way lowered accuracy (" +
                         outcome_text + " vs best " + format_percent(best_accuracy) + ")");
    }
    start = (h.coordinate + 1) % dimension;
  }

  std::vector<int> order;
  for (int i = 0; i < dimension; ++i) order.push_back((start + i) % dimension);
  // Never-tried coordinates first (in cyclic order), then oldest attempt first.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const long la = last_tried.contains(a) ? static_cast<long>(last_tried[a]) : -1;
    const long lb = last_tried.contains(b) ? static_cast<long>(last_tried[b]) : -1;
    return la < lb;
  });
  const std::string why = outcome.is_success() ? "the last attempt did not improve on the best ("
                                               : "the last attempt failed (";
  for (int c : order) {
    for (int sign : {1, -1}) {
      if (!penalized.contains({c, sign})) {
        return suggest({c, sign, step}, why + outcome_text + "); trying the least recently explored coordinate");
      }
    }
  }
  return suggest({order.front(), 1, step / 2}, why + outcome_text + "); every direction in the window hurt, halving the step");
}

std::string render_improver_reply(const ImproverOutput& output) {
  return "REASON: " + output.reason + "\nINSPIRATION: " + output.inspiration +
         "\nSUGGESTIONS: " + output.suggestions + "\n";
}

}  // namespace llmnas::sim
