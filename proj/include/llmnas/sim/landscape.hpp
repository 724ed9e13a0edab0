#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "llmnas/core/types.hpp"
#include "llmnas/memory/history_window.hpp"

namespace llmnas::sim {

/// Noisy quadratic bowl standing in for one-epoch proxy accuracy.
///
/// A candidate is a real vector in [-1, 1]^d written as Python-looking text.
/// Its score is clamp(1 - mean squared distance to the optimum + noise, 0, 1),
/// where the noise term lies in [-noise, noise] and is a fixed function of
/// (seed, candidate text).
struct SimLandscape {
  int dimension = 8;
  std::vector<double> optimum;
  double noise = 0.02;
  double failure_rate = 0.2;
  std::uint64_t seed = 0;

  /// Optimum drawn uniformly from [-1, 1]^d using `seed`.
  static SimLandscape make(int dimension, double noise, double failure_rate, std::uint64_t seed);

  void validate() const;
  double score(std::span<const double> genes, std::string_view noise_key) const;
};

// Standard deviation of the unguided per-gene edit applied when the generator
// gets a reference but no suggestion.
inline constexpr double kUnguidedEditScale = 0.02;

// Portable draws from a 64-bit engine.
double uniform01(std::mt19937_64& rng);
double standard_normal(std::mt19937_64& rng);

/// `class Net` source text carrying `genes`.
std::string encode_genes(std::span<const double> genes);

/// Parses a candidate produced by encode_genes. Returns std::nullopt and
/// sets `error` for malformed text or the wrong number of genes.
std::optional<std::vector<double>> decode_genes(std::string_view source, int dimension,
                                                std::string& error);

struct CoordinateHint {
  int coordinate = 0;
  int sign = 1;  // +1 or -1
  double step = 0.5;

  friend bool operator==(const CoordinateHint&, const CoordinateHint&) = default;
};

std::string encode_hint(const CoordinateHint& hint);
std::optional<CoordinateHint> parse_hint(std::string_view text);

/// Simulated Code Generator reply (prose plus one fenced block). Starts
/// from the best genes when given, otherwise from a random vector; applies the
/// suggested hint when present, else a small unbiased random edit of the best.
/// With probability failure_rate the code is deliberately malformed.
std::string sim_generate(const SimLandscape& landscape, const std::optional<std::string>& best_source,
                         const std::optional<std::string>& suggestions, std::mt19937_64& rng);

/// ValidationError for malformed encodings, otherwise Success(score).
EvaluationOutcome sim_evaluate(std::string_view source, const SimLandscape& landscape);

/// Simulated Prompt Improver. Reads the hints and outcomes held in the
/// window: keeps a hint that just produced a new best, reverses one that made
/// things worse, and otherwise moves to the least recently tried coordinate,
/// skipping directions the window shows to have worsened the score.
ImproverOutput sim_improve(const std::string& best_source, double best_accuracy,
                           const std::string& current_source, const EvaluationOutcome& outcome,
                           const memory::HistoryWindow& window, int dimension);

// Reply text in the labelled REASON / INSPIRATION / SUGGESTIONS layout.
std::string render_improver_reply(const ImproverOutput& output);

}  // namespace llmnas::sim
