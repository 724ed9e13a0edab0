#include "llmnas/prompt/prompts.hpp"

#include "llmnas/core/errors.hpp"
#include "llmnas/core/format.hpp"

namespace llmnas::prompt {

namespace {

std::string strip_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

class PromptWriter {
 public:
  void add(std::string section) {
    section = strip_trailing_newlines(std::move(section));
    if (!out_.empty()) out_ += "\n\n";
    out_ += section;
  }
  std::string finish() && { return std::move(out_) + "\n"; }

 private:
  std::string out_;
};

std::string shape_text(const DatasetSpec& d) {
  return std::to_string(d.input_channels) + ", " + std::to_string(d.input_height) + ", " +
         std::to_string(d.input_width);
}

}  // namespace

std::string build_generator_prompt(const PromptTemplates& templates,
                                   const GeneratorPromptInputs& inputs) {
  const auto& g = templates.generator;
  PromptWriter w;
  w.add(g.render("role", {}));
  w.add(g.render("task", {{"task_description", inputs.dataset.task_description},
                          {"input_shape", shape_text(inputs.dataset)},
                          {"num_classes", std::to_string(inputs.dataset.num_classes)}}));
  if (inputs.best_source) {
    const std::string acc =
        inputs.best_accuracy ? format_percent(*inputs.best_accuracy) : "unknown";
    w.add(g.render("reference", {{"best_source", *inputs.best_source}, {"best_accuracy", acc}}));
  } else {
    w.add(g.render("scratch", {}));
  }
  if (inputs.previous_suggestions) {
    const auto& s = *inputs.previous_suggestions;
    w.add(g.render("suggestions", {{"reason", s.reason},
                                   {"inspiration", s.inspiration},
                                   {"suggestions", s.suggestions}}));
  }
  if (inputs.extended) {
    if (inputs.exemplars.empty()) throw TemplateError("extended generator prompt needs exemplars");
    w.add(g.render("exemplars_header", {{"count", std::to_string(inputs.exemplars.size())}}));
    for (std::size_t i = 0; i < inputs.exemplars.size(); ++i) {
      const auto& e = inputs.exemplars[i];
      w.add(g.render("exemplar", {{"rank", std::to_string(i + 1)},
                                  {"accuracy", format_percent(e.accuracy)},
                                  {"source", e.source_text}}));
    }
    if (!inputs.recent_attempts.empty()) {
      w.add(g.render("attempts_header", {{"count", std::to_string(inputs.recent_attempts.size())}}));
      for (std::size_t i = 0; i < inputs.recent_attempts.size(); ++i) {
        const auto& a = inputs.recent_attempts[i];
        w.add(g.render("attempt", {{"index", std::to_string(i + 1)},
                                   {"outcome", memory::render_outcome(a.outcome)},
                                   {"source", a.source_text}}));
      }
    }
  }
  w.add(g.render("contract", {}));
  return std::move(w).finish();
}

std::string build_improver_prompt(const PromptTemplates& templates, const std::string& best_source,
                                  double best_accuracy, const std::string& current_source,
                                  const EvaluationOutcome& outcome,
                                  const memory::HistoryWindow& window) {
  const auto& t = templates.improver;
  PromptWriter w;
  w.add(t.render("role", {}));
  if (best_source.empty()) {
    w.add(t.render("no_best", {}));
  } else {
    w.add(t.render("best", {{"best_source", best_source},
                            {"best_accuracy", format_percent(best_accuracy)}}));
  }
  const std::string outcome_text = memory::render_outcome(outcome);
  if (current_source.empty()) {
    w.add(t.render("current_missing", {{"current_outcome", outcome_text}}));
  } else {
    w.add(t.render("current", {{"current_source", current_source},
                               {"current_outcome", outcome_text}}));
  }
  w.add(t.render("history", {{"history", memory::render_history(window)}}));
  w.add(t.render("response_format", {}));
  return std::move(w).finish();
}

}  // namespace llmnas::prompt
