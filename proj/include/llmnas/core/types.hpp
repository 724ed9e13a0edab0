#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace llmnas {

// Error messages carried by outcomes and triples are cut to this many bytes.
inline constexpr std::size_t kMaxMessageLength = 2000;

/// Truncates `text` to at most `max_bytes` without splitting a UTF-8 sequence.
std::string truncate_utf8(std::string_view text, std::size_t max_bytes = kMaxMessageLength);

struct Candidate {
  std::int64_t id = 0;
  std::int64_t iteration = 0;
  std::string source_text;
  std::string source_hash;

  static Candidate from_source(std::int64_t id, std::int64_t iteration, std::string source);

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

enum class OutcomeKind { Success, ValidationError, RuntimeError, Timeout, ExtractionError };

std::string_view to_string(OutcomeKind kind);
OutcomeKind outcome_kind_from_string(std::string_view name);

/// Result of evaluating one candidate. Success carries an accuracy in [0, 1];
/// every other kind carries a (truncated) message. The factories enforce this.
class EvaluationOutcome {
 public:
  EvaluationOutcome() : EvaluationOutcome(success(0.0)) {}

  static EvaluationOutcome success(double accuracy);
  static EvaluationOutcome failure(OutcomeKind kind, std::string_view message);

  OutcomeKind kind() const { return kind_; }
  bool is_success() const { return kind_ == OutcomeKind::Success; }
  const std::optional<double>& accuracy() const { return accuracy_; }
  const std::optional<std::string>& message() const { return message_; }

  friend bool operator==(const EvaluationOutcome&, const EvaluationOutcome&) = default;

 private:
  EvaluationOutcome(OutcomeKind kind, std::optional<double> accuracy,
                    std::optional<std::string> message)
      : kind_(kind), accuracy_(accuracy), message_(std::move(message)) {}

  OutcomeKind kind_;
  std::optional<double> accuracy_;
  std::optional<std::string> message_;
};

struct DiagnosticTriple {
  std::string problem;
  std::string suggestion;
  EvaluationOutcome outcome;

  friend bool operator==(const DiagnosticTriple&, const DiagnosticTriple&) = default;
};

// Reason / inspiration / suggestions authored by the prompt improver.
struct ImproverOutput {
  std::string reason;
  std::string inspiration;
  std::string suggestions;

  friend bool operator==(const ImproverOutput&, const ImproverOutput&) = default;
};

struct DatasetSpec {
  std::string name;
  int input_channels = 3;
  int input_height = 32;
  int input_width = 32;
  int num_classes = 10;
  std::string task_description;

  /// Throws ConfigError when a dimension is non-positive or num_classes < 2.
  void validate() const;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

struct SamplingParams {
  double temperature = 0.7;
  double top_p = 0.9;
  int max_new_tokens = 2048;
  std::int64_t base_seed = 0;
  std::int64_t call_counter = 0;

  std::int64_t effective_seed() const { return base_seed + call_counter; }
  void validate() const;

  friend bool operator==(const SamplingParams&, const SamplingParams&) = default;
};

struct AugmentationFlags {
  bool random_crop_pad = true;
  int crop_padding = 4;
  bool horizontal_flip = true;
  bool normalize = true;

  friend bool operator==(const AugmentationFlags&, const AugmentationFlags&) = default;
};

// One-epoch proxy training protocol.
struct TrainConfig {
  int epochs = 1;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double learning_rate = 0.01;
  bool cosine_annealing = true;
  int batch_size = 128;
  AugmentationFlags augmentation;
  double subset_fraction = 1.0;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

enum class Ablation { None, NoFeedback, NoReference };

std::string_view to_string(Ablation ablation);
Ablation ablation_from_string(std::string_view name);

struct RunConfig {
  std::int64_t max_iterations = 1;
  std::size_t window_size = 5;
  DatasetSpec dataset;
  SamplingParams sampling;
  std::int64_t seed = 0;
  std::chrono::milliseconds evaluation_timeout = std::chrono::minutes(30);
  bool extended_prompt = false;
  std::size_t top_k_exemplars = 3;
  Ablation ablation = Ablation::None;
  TrainConfig train;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

struct RunLogRecord {
  std::int64_t iteration = 0;
  std::string timestamp;
  std::int64_t candidate_id = 0;
  std::string source_hash;
  std::string source_text;
  EvaluationOutcome outcome;
  DiagnosticTriple triple_appended;
  double best_accuracy_after = 0.0;
  std::string prompt_digest;
  // Absent when the improver was skipped (NoFeedback) or its call failed.
  std::optional<ImproverOutput> improver_output;
  std::int64_t llm_calls_after = 0;

  friend bool operator==(const RunLogRecord&, const RunLogRecord&) = default;
};

}  // namespace llmnas
