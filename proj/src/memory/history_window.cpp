#include "llmnas/memory/history_window.hpp"

#include "llmnas/core/errors.hpp"
#include "llmnas/core/format.hpp"

namespace llmnas::memory {

HistoryWindow::HistoryWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("window_size must be at least 1");
}

HistoryWindow HistoryWindow::append(DiagnosticTriple triple) const {
  HistoryWindow next = *this;
  if (next.entries_.size() == capacity_) next.entries_.pop_front();
  next.entries_.push_back(std::move(triple));
  return next;
}

std::string render_outcome(const EvaluationOutcome& outcome) {
  if (outcome.is_success()) return "accuracy: " + format_percent(*outcome.accuracy());
  return "error (" + std::string(to_string(outcome.kind())) + "): " + *outcome.message();
}

std::string render_history(const HistoryWindow& window) {
  std::string out(kHistoryHeader);
  out += '\n';
  if (window.empty()) {
    out += kNoPriorAttempts;
    out += '\n';
    return out;
  }
  std::size_t n = 0;
  for (const auto& t : window.entries()) {
    ++n;
    out += "### Attempt " + std::to_string(n) + "\n";
    out += "Problem: " + (t.problem.empty() ? std::string("(none)") : t.problem) + "\n";
    out += "Suggestion: " + (t.suggestion.empty() ? std::string("(none)") : t.suggestion) + "\n";
    out += "Outcome: " + render_outcome(t.outcome) + "\n";
  }
  return out;
}

std::size_t render_history_bound(std::size_t capacity, std::size_t max_text_bytes) {
  const std::size_t header = kHistoryHeader.size() + 1 + kNoPriorAttempts.size() + 1;
  // "### Attempt N\n" + labels + the longest possible outcome rendering.
  const std::size_t per_entry = 32 + 2 * (max_text_bytes + 16) +
                                std::string_view("Outcome: error (ExtractionError): \n").size() +
                                kMaxMessageLength;
  return header + capacity * per_entry;
}

}  // namespace llmnas::memory
