#include "llmnas/sim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

#include "llmnas/core/datasets.hpp"
#include "llmnas/core/errors.hpp"
#include "llmnas/core/run_log.hpp"
#include "llmnas/sim/sim_backends.hpp"

namespace llmnas::sim {

namespace fs = std::filesystem;

namespace {

search::Backends sim_backends(SimCodeGenerator& g, SimPromptImprover& i, SimEvaluator& e) {
  return search::Backends{g, i, e, sim_timestamp};
}

}  // namespace

search::SearchResult run_sim_search(const RunConfig& config, const SimLandscape& landscape,
                                    const prompt::PromptTemplates& templates, const fs::path& log_path,
                                    bool overwrite) {
  SimCodeGenerator generator(landscape);
  SimPromptImprover improver(landscape);
  SimEvaluator evaluator(landscape);
  search::SearchLoop loop(config, sim_backends(generator, improver, evaluator), templates);
  return loop.run(log_path, overwrite);
}

search::SearchResult resume_sim_search(const RunConfig& config, const SimLandscape& landscape,
                                       const prompt::PromptTemplates& templates, const fs::path& log_path) {
  SimCodeGenerator generator(landscape);
  SimPromptImprover improver(landscape);
  SimEvaluator evaluator(landscape);
  search::SearchLoop loop(config, sim_backends(generator, improver, evaluator), templates);
  return loop.resume(log_path);
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

const VariantSummary& AblationReport::summary(Ablation ablation) const {
  for (const auto& s : summaries) {
    if (s.ablation == ablation) return s;
  }
  throw Error("ablation variant not part of this experiment: " + std::string(to_string(ablation)));
}

std::vector<const VariantRun*> AblationReport::runs_of(Ablation ablation) const {
  std::vector<const VariantRun*> out;
  for (const auto& r : runs) {
    if (r.ablation == ablation) out.push_back(&r);
  }
  return out;
}

double AblationReport::full_win_fraction(Ablation other) const {
  const auto full = runs_of(Ablation::None);
  const auto rival = runs_of(other);
  std::size_t wins = 0, paired = 0;
  for (const auto* f : full) {
    for (const auto* o : rival) {
      if (o->seed != f->seed) continue;
      ++paired;
      if (f->final_best > o->final_best) ++wins;
    }
  }
  return paired ? static_cast<double>(wins) / static_cast<double>(paired) : 0.0;
}

AblationReport run_ablation_experiment(const AblationExperiment& experiment,
                                       const prompt::PromptTemplates& templates) {
  if (experiment.seeds.empty()) throw ConfigError("simulate: at least one seed is required");
  const SimLandscape landscape = SimLandscape::make(experiment.sim.dimension, experiment.sim.noise,
                                                    experiment.sim.failure_rate,
                                                    experiment.sim.landscape_seed);

  fs::path dir;
  bool temporary = false;
  if (experiment.log_dir) {
    dir = *experiment.log_dir;
  } else {
    std::random_device rd;
    dir = fs::temp_directory_path() / ("llmnas-sim-" + std::to_string(rd()));
    temporary = true;
  }
  fs::create_directories(dir);

  struct Task {
    Ablation ablation;
    std::int64_t seed;
  };
  std::vector<Task> tasks;
  for (auto a : experiment.variants) {
    for (auto s : experiment.seeds) tasks.push_back({a, s});
  }
  std::vector<VariantRun> runs(tasks.size());
  std::vector<std::string> errors(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        RunConfig cfg;
        cfg.max_iterations = experiment.iterations;
        cfg.window_size = experiment.window_size;
        cfg.dataset = dataset_by_name("cifar10");
        cfg.seed = tasks[i].seed;
        cfg.ablation = tasks[i].ablation;
        const auto log = dir / (std::string(to_string(tasks[i].ablation)) + "_seed" +
                                std::to_string(tasks[i].seed) + ".jsonl");
        const auto result = run_sim_search(cfg, landscape, templates, log, true);
        const auto records = read_run_log(log).records;
        VariantRun run{tasks[i].ablation, tasks[i].seed, result.best_accuracy, std::nullopt,
                       result.successful_evaluations};
        for (const auto& r : records) {
          if (r.outcome.is_success()) {
            run.first_success = *r.outcome.accuracy();
            break;
          }
        }
        runs[i] = run;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  unsigned n_threads = experiment.threads ? experiment.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (temporary) {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error("simulated run failed: " + e);
  }

  AblationReport report;
  report.runs = std::move(runs);
  for (auto a : experiment.variants) {
    VariantSummary s;
    s.ablation = a;
    std::vector<double> finals, gains;
    double rate = 0.0;
    const auto mine = report.runs_of(a);
    for (const auto* r : mine) {
      finals.push_back(r->final_best);
      gains.push_back(r->first_success ? r->final_best - *r->first_success : 0.0);
      rate += static_cast<double>(r->successes) / static_cast<double>(experiment.iterations);
    }
    s.median_final_best = median(finals);
    s.median_improvement = median(gains);
    s.mean_success_rate = mine.empty() ? 0.0 : rate / static_cast<double>(mine.size());
    report.summaries.push_back(s);
  }
  return report;
}

std::string render_ablation_report(const AblationReport& report) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %8s %14s %14s %12s\n", "variant", "runs", "median best",
                "median gain", "succ. rate");
  out << buf;
  for (const auto& s : report.summaries) {
    std::snprintf(buf, sizeof buf, "%-14s %8zu %14.4f %14.4f %11.1f%%\n",
                  std::string(to_string(s.ablation)).c_str(), report.runs_of(s.ablation).size(),
                  s.median_final_best, s.median_improvement, 100.0 * s.mean_success_rate);
    out << buf;
  }
  for (const auto& s : report.summaries) {
    if (s.ablation == Ablation::None) continue;
    if (report.runs_of(Ablation::None).empty()) break;
    std::snprintf(buf, sizeof buf, "full loop beats %s on %.0f%% of seeds\n",
                  std::string(to_string(s.ablation)).c_str(),
                  100.0 * report.full_win_fraction(s.ablation));
    out << buf;
  }
  return out.str();
}

}  // namespace llmnas::sim
