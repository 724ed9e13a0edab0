#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "llmnas/core/run_log.hpp"
#include "llmnas/core/types.hpp"
#include "llmnas/memory/history_window.hpp"
#include "llmnas/prompt/prompts.hpp"
#include "llmnas/prompt/templates.hpp"
#include "llmnas/search/backends.hpp"

namespace llmnas::search {

/// Loop variables carried between iterations. Everything here can be rebuilt
/// from a run log, which is what makes resume exact.
struct SearchState {
  std::int64_t iteration = 0;
  std::optional<Candidate> best_candidate;
  double best_accuracy = 0.0;
  std::optional<ImproverOutput> pending_suggestions;
  memory::HistoryWindow window;
  std::int64_t llm_calls = 0;
  std::int64_t successes = 0;
  // Extended-prompt material: best successes (best first) and the last K attempts.
  std::vector<prompt::Exemplar> top_exemplars;
  std::deque<prompt::Attempt> recent_attempts;

  static SearchState initial(const RunConfig& config);

  friend bool operator==(const SearchState&, const SearchState&) = default;
};

struct IterationResult {
  SearchState state;
  RunLogRecord record;
};

struct SearchResult {
  std::optional<Candidate> best_candidate;
  double best_accuracy = 0.0;
  std::int64_t total_iterations = 0;
  std::int64_t successful_evaluations = 0;
  std::filesystem::path log_path;
};

class SearchLoop {
 public:
  using RecordSink = std::function<void(const RunLogRecord&)>;
  using WarningSink = std::function<void(std::string_view)>;

  /// Validates `config`; throws ConfigError.
  SearchLoop(RunConfig config, Backends backends, prompt::PromptTemplates templates);

  /// One pass of the generate / evaluate / update / improve cycle. Candidate,
  /// LLM and worker failures become failed outcomes; nothing is written.
  IterationResult run_iteration(const SearchState& state);

  /// Iterates from the empty state to max_iterations, appending one record
  /// per iteration. Refuses to replace an existing log unless `overwrite`.
  SearchResult run(const std::filesystem::path& log_path, bool overwrite = false);

  /// Rebuilds the state from `log_path` and continues to max_iterations.
  /// A torn final line is cut off with a warning; earlier damage throws
  /// CorruptLog.
  SearchResult resume(const std::filesystem::path& log_path);

  /// State after replaying `records` (which must be iterations 1..n).
  static SearchState replay(const std::vector<RunLogRecord>& records, const RunConfig& config);

  void on_record(RecordSink sink) { record_sink_ = std::move(sink); }
  void on_warning(WarningSink sink) { warning_sink_ = std::move(sink); }

  const RunConfig& config() const { return config_; }

 private:
  SearchResult continue_run(SearchState state, RunLogWriter& writer);
  void warn(std::string_view message) const;

  RunConfig config_;
  Backends backends_;
  prompt::PromptTemplates templates_;
  RecordSink record_sink_;
  WarningSink warning_sink_;
};

// Folds one finished iteration into `state`: best tracking (first success or
// strictly better accuracy), window append, extended-prompt bookkeeping.
void absorb_outcome(SearchState& state, const RunConfig& config, const Candidate& candidate,
                    const EvaluationOutcome& outcome, const DiagnosticTriple& triple);

}  // namespace llmnas::search
