#include "llmnas/search/search_loop.hpp"

#include <algorithm>
#include <ctime>

#include "llmnas/core/digest.hpp"
#include "llmnas/core/errors.hpp"
#include "llmnas/prompt/response_parsing.hpp"

namespace llmnas::search {

namespace fs = std::filesystem;

std::string wall_clock_timestamp(std::int64_t) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  ::gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SearchState SearchState::initial(const RunConfig& config) {
  SearchState s;
  s.window = memory::HistoryWindow(config.window_size);
  return s;
}

void absorb_outcome(SearchState& state, const RunConfig& config, const Candidate& candidate,
                    const EvaluationOutcome& outcome, const DiagnosticTriple& triple) {
  state.iteration = candidate.iteration;
  if (outcome.is_success()) {
    const double acc = *outcome.accuracy();
    ++state.successes;
    if (!state.best_candidate || acc > state.best_accuracy) {
      state.best_candidate = candidate;
      state.best_accuracy = acc;
    }
    auto& ex = state.top_exemplars;
    // Insert after equal accuracies so earlier discoveries keep their rank.
    const auto pos = std::upper_bound(ex.begin(), ex.end(), acc,
                                      [](double a, const prompt::Exemplar& e) { return a > e.accuracy; });
    ex.insert(pos, prompt::Exemplar{candidate.source_text, acc});
    if (ex.size() > config.top_k_exemplars) ex.resize(config.top_k_exemplars);
  }
  state.window = state.window.append(triple);
  state.recent_attempts.push_back(prompt::Attempt{candidate.source_text, outcome});
  while (state.recent_attempts.size() > config.window_size) state.recent_attempts.pop_front();
}

SearchLoop::SearchLoop(RunConfig config, Backends backends, prompt::PromptTemplates templates)
    : config_(std::move(config)), backends_(std::move(backends)), templates_(std::move(templates)) {
  config_.validate();
}

void SearchLoop::warn(std::string_view message) const {
  if (warning_sink_) warning_sink_(message);
}

IterationResult SearchLoop::run_iteration(const SearchState& state) {
  if (state.iteration >= config_.max_iterations) {
    throw Error("run_iteration called after the final iteration");
  }
  const std::int64_t t = state.iteration + 1;
  SearchState next = state;

  SamplingParams sampling = config_.sampling;
  sampling.base_seed = config_.seed;

  // (1) Generate.
  prompt::GeneratorPromptInputs inputs;
  inputs.dataset = config_.dataset;
  if (config_.ablation != Ablation::NoReference && state.best_candidate) {
    inputs.best_source = state.best_candidate->source_text;
    inputs.best_accuracy = state.best_accuracy;
  }
  if (config_.ablation != Ablation::NoFeedback) inputs.previous_suggestions = state.pending_suggestions;
  // Exemplars are reference code too, so NoReference drops the extended block.
  if (config_.extended_prompt && config_.ablation != Ablation::NoReference &&
      !state.top_exemplars.empty()) {
    inputs.extended = true;
    inputs.exemplars = state.top_exemplars;
    inputs.recent_attempts.assign(state.recent_attempts.begin(), state.recent_attempts.end());
  }
  GenerationRequest gen{prompt::build_generator_prompt(templates_, inputs), sampling, inputs};
  gen.sampling.call_counter = next.llm_calls++;
  const std::string prompt_digest = digest(gen.prompt);

  std::optional<std::string> source;
  std::optional<EvaluationOutcome> outcome;
  try {
    source = prompt::extract_code(backends_.generator.generate(gen));
  } catch (const TransportError& e) {
    outcome = EvaluationOutcome::failure(OutcomeKind::RuntimeError, std::string("llm transport: ") + e.what());
  } catch (const EmptyResponse& e) {
    outcome = EvaluationOutcome::failure(OutcomeKind::ExtractionError, e.what());
  } catch (const ExtractionError& e) {
    outcome = EvaluationOutcome::failure(OutcomeKind::ExtractionError, e.what());
  }
  const Candidate candidate = Candidate::from_source(t, t, source.value_or(std::string{}));

  // (2) Validate, then train only what passed.
  if (!outcome) {
    try {
      outcome = backends_.evaluator.validate(candidate, config_.dataset);
      if (outcome && outcome->is_success()) {
        throw Error("evaluation backend reported a validation failure with kind Success");
      }
      if (!outcome) {
        outcome = backends_.evaluator.evaluate(candidate, config_.dataset, config_.train,
                                               config_.evaluation_timeout);
      }
    } catch (const std::exception& e) {
      outcome = EvaluationOutcome::failure(OutcomeKind::RuntimeError,
                                           std::string("evaluation backend: ") + e.what());
    }
  }

  // (3) Best update and (4) window append of (previous suggestion, this outcome).
  DiagnosticTriple triple;
  if (state.pending_suggestions) {
    triple.problem = truncate_utf8(state.pending_suggestions->reason);
    triple.suggestion = truncate_utf8(state.pending_suggestions->suggestions);
  }
  triple.outcome = *outcome;
  absorb_outcome(next, config_, candidate, *outcome, triple);

  // (5) Improve.
  next.pending_suggestions.reset();
  if (config_.ablation != Ablation::NoFeedback) {
    ImprovementRequest imp;
    imp.best_source = next.best_candidate ? next.best_candidate->source_text : std::string{};
    imp.best_accuracy = next.best_accuracy;
    imp.current_source = candidate.source_text;
    imp.outcome = *outcome;
    imp.window = next.window;
    imp.prompt = prompt::build_improver_prompt(templates_, imp.best_source, imp.best_accuracy,
                                               imp.current_source, imp.outcome, imp.window);
    imp.sampling = sampling;
    imp.sampling.call_counter = next.llm_calls++;
    try {
      next.pending_suggestions = prompt::parse_improver_response(backends_.improver.improve(imp));
    } catch (const TransportError& e) {
      warn("iteration " + std::to_string(t) + ": improver call failed: " + e.what());
    } catch (const EmptyResponse&) {
      warn("iteration " + std::to_string(t) + ": improver returned an empty reply");
    }
  }

  // (6) Record.
  RunLogRecord record;
  record.iteration = t;
  record.timestamp = backends_.timestamp(t);
  record.candidate_id = candidate.id;
  record.source_hash = candidate.source_hash;
  record.source_text = candidate.source_text;
  record.outcome = *outcome;
  record.triple_appended = triple;
  record.best_accuracy_after = next.best_accuracy;
  record.prompt_digest = prompt_digest;
  record.improver_output = next.pending_suggestions;
  record.llm_calls_after = next.llm_calls;
  return IterationResult{std::move(next), std::move(record)};
}

SearchResult SearchLoop::continue_run(SearchState state, RunLogWriter& writer) {
  while (state.iteration < config_.max_iterations) {
    auto step = run_iteration(state);
    writer.append(step.record);
    if (record_sink_) record_sink_(step.record);
    state = std::move(step.state);
  }
  return SearchResult{state.best_candidate, state.best_accuracy, state.iteration, state.successes,
                      writer.path()};
}

SearchResult SearchLoop::run(const fs::path& log_path, bool overwrite) {
  RunLogWriter writer(log_path, overwrite ? RunLogWriter::Mode::Overwrite : RunLogWriter::Mode::CreateNew);
  return continue_run(SearchState::initial(config_), writer);
}

SearchState SearchLoop::replay(const std::vector<RunLogRecord>& records, const RunConfig& config) {
  SearchState state = SearchState::initial(config);
  for (const auto& r : records) {
    if (r.iteration != state.iteration + 1) {
      throw CorruptLog("run log skips from iteration " + std::to_string(state.iteration) + " to " +
                       std::to_string(r.iteration));
    }
    Candidate c;
    c.id = r.candidate_id;
    c.iteration = r.iteration;
    c.source_text = r.source_text;
    c.source_hash = r.source_hash;
    absorb_outcome(state, config, c, r.outcome, r.triple_appended);
    state.pending_suggestions = r.improver_output;
    state.llm_calls = r.llm_calls_after;
  }
  return state;
}

SearchResult SearchLoop::resume(const fs::path& log_path) {
  if (!fs::exists(log_path)) throw CorruptLog("run log not found: " + log_path.string());
  auto read = read_run_log(log_path);
  if (read.torn_tail) {
    warn(read.warning);
    truncate_run_log(log_path, read.valid_bytes);
  }
  SearchState state = replay(read.records, config_);
  RunLogWriter writer(log_path, RunLogWriter::Mode::Append);
  return continue_run(std::move(state), writer);
}

}  // namespace llmnas::search
