#include "llmnas/core/types.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "llmnas/core/digest.hpp"
#include "llmnas/core/errors.hpp"

namespace llmnas {

std::string truncate_utf8(std::string_view text, std::size_t max_bytes) {
  if (text.size() <= max_bytes) return std::string(text);
  std::size_t cut = max_bytes;
  // Back off over continuation bytes so the cut lands on a sequence boundary.
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  return std::string(text.substr(0, cut));
}

Candidate Candidate::from_source(std::int64_t id, std::int64_t iteration, std::string source) {
  Candidate c;
  c.id = id;
  c.iteration = iteration;
  c.source_hash = digest(source);
  c.source_text = std::move(source);
  return c;
}

namespace {
constexpr std::array<std::pair<OutcomeKind, std::string_view>, 5> kOutcomeNames{{
    {OutcomeKind::Success, "Success"},
    {OutcomeKind::ValidationError, "ValidationError"},
    {OutcomeKind::RuntimeError, "RuntimeError"},
    {OutcomeKind::Timeout, "Timeout"},
    {OutcomeKind::ExtractionError, "ExtractionError"},
}};

constexpr std::array<std::pair<Ablation, std::string_view>, 3> kAblationNames{{
    {Ablation::None, "none"},
    {Ablation::NoFeedback, "no_feedback"},
    {Ablation::NoReference, "no_reference"},
}};
}  // namespace

std::string_view to_string(OutcomeKind kind) {
  for (const auto& [k, name] : kOutcomeNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

OutcomeKind outcome_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kOutcomeNames) {
    if (n == name) return k;
  }
  throw Error("unknown outcome kind: " + std::string(name));
}

std::string_view to_string(Ablation ablation) {
  for (const auto& [a, name] : kAblationNames) {
    if (a == ablation) return name;
  }
  return "unknown";
}

Ablation ablation_from_string(std::string_view name) {
  for (const auto& [a, n] : kAblationNames) {
    if (n == name) return a;
  }
  throw ConfigError("ablation: expected one of none, no_feedback, no_reference; got '" +
                    std::string(name) + "'");
}

EvaluationOutcome EvaluationOutcome::success(double accuracy) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw Error("accuracy must lie in [0, 1], got " + std::to_string(accuracy));
  }
  return EvaluationOutcome(OutcomeKind::Success, accuracy, std::nullopt);
}

EvaluationOutcome EvaluationOutcome::failure(OutcomeKind kind, std::string_view message) {
  if (kind == OutcomeKind::Success) throw Error("failure outcome cannot have kind Success");
  return EvaluationOutcome(kind, std::nullopt, truncate_utf8(message));
}

void DatasetSpec::validate() const {
  if (input_channels <= 0) throw ConfigError("dataset.input_channels must be positive");
  if (input_height <= 0) throw ConfigError("dataset.input_height must be positive");
  if (input_width <= 0) throw ConfigError("dataset.input_width must be positive");
  if (num_classes < 2) throw ConfigError("dataset.num_classes must be at least 2");
}

void SamplingParams::validate() const {
  if (!(temperature >= 0.0)) throw ConfigError("sampling.temperature must be non-negative");
  if (!(top_p >= 0.0 && top_p <= 1.0)) throw ConfigError("sampling.top_p must lie in [0, 1]");
  if (max_new_tokens < 1) throw ConfigError("sampling.max_new_tokens must be at least 1");
  if (call_counter < 0) throw ConfigError("sampling.call_counter must be non-negative");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("train.batch_size must be at least 1");
  if (!(subset_fraction > 0.0 && subset_fraction <= 1.0)) {
    throw ConfigError("train.subset_fraction must lie in (0, 1]");
  }
  if (augmentation.crop_padding < 0) throw ConfigError("train.augmentation.crop_padding must be >= 0");
}

void RunConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
  if (window_size < 1) throw ConfigError("window_size must be at least 1");
  if (top_k_exemplars < 1) throw ConfigError("top_k_exemplars must be at least 1");
  if (evaluation_timeout.count() <= 0) throw ConfigError("evaluation_timeout must be positive");
  dataset.validate();
  sampling.validate();
  train.validate();
}

}  // namespace llmnas
