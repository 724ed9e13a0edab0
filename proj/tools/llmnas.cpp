// Command-line front end: run, resume, analyze, simulate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "llmnas/analytics/summary.hpp"
#include "llmnas/analytics/trajectory.hpp"
#include "llmnas/config/run_config_file.hpp"
#include "llmnas/core/errors.hpp"
#include "llmnas/core/format.hpp"
#include "llmnas/core/run_log.hpp"
#include "llmnas/eval/worker_gateway.hpp"
#include "llmnas/llm/client.hpp"
#include "llmnas/prompt/templates.hpp"
#include "llmnas/search/search_loop.hpp"
#include "llmnas/sim/experiment.hpp"
#include "llmnas/sim/sim_backends.hpp"

namespace fs = std::filesystem;
using namespace llmnas;

namespace {

void progress(const RunLogRecord& r) {
  std::cerr << "iter " << r.iteration << "  " << to_string(r.outcome.kind());
  if (r.outcome.accuracy()) std::cerr << " " << format_percent(*r.outcome.accuracy());
  std::cerr << "  best " << format_percent(r.best_accuracy_after) << "\n";
}

void warn(std::string_view message) { std::cerr << "warning: " << message << "\n"; }

fs::path pick_log(const config::CliConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (cfg.log_path) return *cfg.log_path;
  throw ConfigError("no log path: pass --log or set 'log_path'");
}

void print_result(const search::SearchResult& r) {
  std::cout << "iterations=" << r.total_iterations << " successes=" << r.successful_evaluations
            << " best=" << (r.best_candidate ? format_percent(r.best_accuracy) : std::string("none"))
            << " log=" << r.log_path.string() << "\n";
}

search::SearchResult execute(const config::CliConfig& cfg, const fs::path& log, bool resume, bool force) {
  const auto templates = prompt::PromptTemplates::load(cfg.template_dir);

  if (cfg.backend == config::BackendKind::Sim) {
    const auto& p = cfg.sim.params;
    const auto landscape = sim::SimLandscape::make(p.dimension, p.noise, p.failure_rate, p.landscape_seed);
    sim::SimCodeGenerator gen(landscape);
    sim::SimPromptImprover imp(landscape);
    sim::SimEvaluator ev(landscape);
    search::SearchLoop loop(cfg.run, search::Backends{gen, imp, ev, sim::sim_timestamp}, templates);
    loop.on_record(progress);
    loop.on_warning(warn);
    return resume ? loop.resume(log) : loop.run(log, force);
  }

  llm::LlmClient gen_client(*cfg.generator_endpoint);
  llm::LlmClient imp_client(*cfg.improver_endpoint);
  llm::LlmCodeGenerator gen(gen_client);
  llm::LlmPromptImprover imp(imp_client);
  eval::WorkerCommand cmd{cfg.worker->command, eval::ProcessOptions{cfg.worker->working_dir, cfg.worker->env}};
  eval::SubprocessEvaluator ev(std::move(cmd), cfg.run.evaluation_timeout, cfg.worker->seed);
  search::SearchLoop loop(cfg.run, search::Backends{gen, imp, ev}, templates);
  loop.on_record(progress);
  loop.on_warning(warn);
  return resume ? loop.resume(log) : loop.run(log, force);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

template <typename Fn>
void write_csv(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  fn(out);
  if (!out) throw Error("cannot write " + path.string());
}

int analyze(const fs::path& log, const fs::path& out_dir, const std::string& basis, int permutations,
            std::size_t window) {
  auto read = read_run_log(log);
  if (read.torn_tail) warn(read.warning);
  analytics::SummaryOptions opts;
  opts.permutations = permutations;
  if (basis == "iteration") opts.basis = analytics::CorrelationBasis::IterationFilled;
  const auto report = analytics::summarize(read.records, opts);
  const auto series = analytics::build_trajectories(read.records, window);

  fs::create_directories(out_dir);
  write_file(out_dir / "summary.json", analytics::to_json(report).dump(2) + "\n");
  const std::string table = analytics::render_summary(report);
  write_file(out_dir / "summary.txt", table);
  write_csv(out_dir / "trajectory.csv", [&](std::ostream& o) { analytics::write_trajectory_csv(o, series); });
  write_csv(out_dir / "per_iteration.csv",
            [&](std::ostream& o) { analytics::write_series_csv(o, "accuracy", series.per_iteration); });
  write_csv(out_dir / "smoothed.csv",
            [&](std::ostream& o) { analytics::write_series_csv(o, "smoothed", series.smoothed); });
  write_csv(out_dir / "best_so_far.csv",
            [&](std::ostream& o) { analytics::write_series_csv(o, "best_so_far", series.best_so_far); });
  std::cout << table;
  if (!report.best_accuracy) std::cerr << "note: no successful evaluations in " << log.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLM-driven neural architecture search"};
  app.require_subcommand(1);

  std::string config_path, log_flag, out_dir = "analysis", basis = "success", backend;
  bool force = false;
  int permutations = 10000;
  std::size_t window = analytics::kDefaultSmoothingWindow;
  std::vector<std::int64_t> seeds;
  std::int64_t iterations = 0;
  std::string log_dir;

  auto* run = app.add_subcommand("run", "start a search and write its run log");
  run->add_option("-c,--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--log", log_flag, "run log path (overrides log_path)");
  run->add_option("--backend", backend, "llm or sim (overrides backend)")->check(CLI::IsMember({"llm", "sim"}));
  run->add_flag("--force", force, "overwrite an existing log");

  auto* resume = app.add_subcommand("resume", "continue a search from its run log");
  resume->add_option("-c,--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  resume->add_option("--log", log_flag, "run log path (overrides log_path)");
  resume->add_option("--backend", backend, "llm or sim")->check(CLI::IsMember({"llm", "sim"}));

  auto* an = app.add_subcommand("analyze", "summary table and trajectory CSVs for a run log");
  an->add_option("--log", log_flag, "run log")->required()->check(CLI::ExistingFile);
  an->add_option("--out", out_dir, "output directory");
  an->add_option("--basis", basis, "correlation basis")->check(CLI::IsMember({"success", "iteration"}));
  an->add_option("--permutations", permutations, "shuffles for p-values (0 disables)");
  an->add_option("--window", window, "smoothing window")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "ablation experiment on the simulated environment");
  simulate->add_option("-c,--config", config_path, "configuration file (sim section)")->check(CLI::ExistingFile);
  simulate->add_option("--seeds", seeds, "run seeds")->delimiter(',');
  simulate->add_option("--iterations", iterations, "iterations per run");
  simulate->add_option("--log-dir", log_dir, "keep per-run logs here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (an->parsed()) return analyze(log_flag, out_dir, basis, permutations, window);

    config::CliConfig cfg;
    if (!config_path.empty()) {
      if (!backend.empty()) {
        // Sim runs do not need endpoint or worker sections, so patch before validation.
        std::ifstream in(config_path);
        auto doc = nlohmann::json::parse(in);
        doc["backend"] = backend;
        cfg = config::parse_cli_config(doc, fs::path(config_path).parent_path());
      } else {
        cfg = config::load_cli_config(config_path);
      }
    } else {
      cfg = config::parse_cli_config(nlohmann::json{{"backend", "sim"}}, fs::current_path());
    }

    if (simulate->parsed()) {
      sim::AblationExperiment exp;
      exp.sim = cfg.sim.params;
      exp.window_size = cfg.run.window_size;
      exp.iterations = iterations > 0 ? iterations : cfg.sim.iterations;
      exp.seeds = !seeds.empty() ? seeds : cfg.sim.seeds;
      if (exp.seeds.empty()) {
        for (std::int64_t i = 1; i <= 20; ++i) exp.seeds.push_back(i * 100000);
      }
      if (!log_dir.empty()) exp.log_dir = log_dir;
      const auto report = sim::run_ablation_experiment(exp, prompt::PromptTemplates::load(cfg.template_dir));
      std::cout << sim::render_ablation_report(report);
      return 0;
    }

    const fs::path log = pick_log(cfg, log_flag);
    print_result(execute(cfg, log, resume->parsed(), force));
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
