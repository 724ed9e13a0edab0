#pragma once

#include <cstddef>
#include <deque>
#include <string>

#include "llmnas/core/types.hpp"

namespace llmnas::memory {

/// Bounded FIFO of the most recent diagnostic triples, oldest first.
///
/// The window is a value: `append` returns a new window and leaves the
/// receiver untouched. Eviction is strict first-in-first-out; failures are
/// kept exactly like successes.
class HistoryWindow {
 public:
  explicit HistoryWindow(std::size_t capacity = 5);

  [[nodiscard]] HistoryWindow append(DiagnosticTriple triple) const;

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::deque<DiagnosticTriple>& entries() const { return entries_; }

  friend bool operator==(const HistoryWindow&, const HistoryWindow&) = default;

 private:
  std::size_t capacity_;
  std::deque<DiagnosticTriple> entries_;
};

inline constexpr std::string_view kHistoryHeader = "Recent improvement attempts (oldest first):";
inline constexpr std::string_view kNoPriorAttempts = "(no prior attempts)";

/// "accuracy: 28.2%" for successes, "error (<Kind>): <message>" otherwise.
std::string render_outcome(const EvaluationOutcome& outcome);

/// Renders the window as numbered Problem / Suggestion / Outcome sections.
/// Depends only on the entries currently held.
std::string render_history(const HistoryWindow& window);

// Upper bound on render_history's length for any window of this capacity,
// given problem/suggestion texts of at most `max_text_bytes` each.
std::size_t render_history_bound(std::size_t capacity, std::size_t max_text_bytes);

}  // namespace llmnas::memory
