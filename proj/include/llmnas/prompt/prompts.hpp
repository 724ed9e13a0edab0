#pragma once

#include <optional>
#include <string>
#include <vector>

#include "llmnas/core/types.hpp"
#include "llmnas/memory/history_window.hpp"
#include "llmnas/prompt/templates.hpp"

namespace llmnas::prompt {

struct Exemplar {
  std::string source_text;
  double accuracy = 0.0;

  friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

struct Attempt {
  std::string source_text;
  EvaluationOutcome outcome;

  friend bool operator==(const Attempt&, const Attempt&) = default;
};

struct GeneratorPromptInputs {
  DatasetSpec dataset;
  std::optional<std::string> best_source;
  std::optional<double> best_accuracy;
  std::optional<ImproverOutput> previous_suggestions;
  bool extended = false;
  std::vector<Exemplar> exemplars;       // best first; extended only
  std::vector<Attempt> recent_attempts;  // oldest first; extended only
};

/// Code Generator prompt: role, task, reference code (or from-scratch
/// instruction), previous suggestions when present, extended exemplars and
/// attempts when requested, then the output contract. Throws TemplateError
/// when `extended` is set with no exemplars.
std::string build_generator_prompt(const PromptTemplates& templates,
                                   const GeneratorPromptInputs& inputs);

/// Prompt Improver prompt. `best_source` empty means no success yet; an
/// empty `current_source` means extraction failed.
std::string build_improver_prompt(const PromptTemplates& templates, const std::string& best_source,
                                  double best_accuracy, const std::string& current_source,
                                  const EvaluationOutcome& outcome,
                                  const memory::HistoryWindow& window);

}  // namespace llmnas::prompt
