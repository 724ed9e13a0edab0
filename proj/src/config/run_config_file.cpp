#include "llmnas/config/run_config_file.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "llmnas/core/datasets.hpp"
#include "llmnas/core/errors.hpp"
#include "llmnas/core/serialization.hpp"
#include "llmnas/prompt/templates.hpp"

namespace llmnas::config {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(BackendKind kind) { return kind == BackendKind::Llm ? "llm" : "sim"; }

namespace {

// Typed access to one JSON object with field-qualified error messages.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected an object");
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    const std::set<std::string_view> allowed(keys);
    for (const auto& [k, _] : j_.items()) {
      if (!allowed.contains(k)) throw ConfigError("unknown key '" + qualify(k) + "'");
    }
  }

  const std::string& path() const { return path_; }
  bool has(std::string_view key) const { return j_.contains(key); }
  const json& raw(std::string_view key) const { return j_.at(std::string(key)); }
  std::string qualify(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  template <typename T>
  void read(std::string_view key, T& out) const {
    if (!has(key)) return;
    const auto& v = raw(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("field '" + qualify(key) + "': expected " + type_name<T>() + ", got " +
                        v.type_name());
    }
  }

  template <typename T>
  T get_or(std::string_view key, T fallback) const {
    read(key, fallback);
    return fallback;
  }

  Section child(std::string_view key) const { return Section(raw(key), qualify(key)); }

 private:
  template <typename T>
  static std::string type_name() {
    if constexpr (std::is_same_v<T, bool>) return "boolean";
    else if constexpr (std::is_integral_v<T>) return "integer";
    else if constexpr (std::is_floating_point_v<T>) return "number";
    else return "string";
  }
  std::string where() const { return path_.empty() ? "config: " : "field '" + path_ + "': "; }

  const json& j_;
  std::string path_;
};

fs::path resolve(const fs::path& p, const fs::path& base) { return p.is_absolute() ? p : base / p; }

llm::LlmEndpoint parse_endpoint(const Section& s, const fs::path& base) {
  s.allow_only({"base_url", "model", "api_key_env", "request_timeout_s", "max_retries",
                "initial_backoff_ms", "debug_log"});
  llm::LlmEndpoint e;
  s.read("base_url", e.base_url);
  s.read("model", e.model_name);
  if (s.has("api_key_env")) {
    const auto var = s.get_or<std::string>("api_key_env", "");
    if (const char* v = std::getenv(var.c_str()); v && *v) e.api_key = v;
  }
  const double timeout_s = s.get_or<double>("request_timeout_s", 600.0);
  if (!(timeout_s > 0)) throw ConfigError("field '" + s.qualify("request_timeout_s") + "' must be positive");
  e.request_timeout = std::chrono::milliseconds(static_cast<std::int64_t>(timeout_s * 1000));
  e.max_retries = s.get_or<int>("max_retries", 3);
  e.initial_backoff = std::chrono::milliseconds(s.get_or<std::int64_t>("initial_backoff_ms", 500));
  if (s.has("debug_log")) e.debug_log = resolve(s.get_or<std::string>("debug_log", ""), base);
  try {
    e.validate();
  } catch (const ConfigError& err) {
    throw ConfigError("field '" + s.path() + "': " + err.what());
  }
  return e;
}

DatasetSpec parse_dataset(const json& doc) {
  if (doc.is_string()) return dataset_by_name(doc.get<std::string>());
  Section s(doc, "dataset");
  s.allow_only({"name", "input_channels", "input_height", "input_width", "num_classes", "task_description"});
  DatasetSpec d;
  s.read("name", d.name);
  s.read("input_channels", d.input_channels);
  s.read("input_height", d.input_height);
  s.read("input_width", d.input_width);
  s.read("num_classes", d.num_classes);
  s.read("task_description", d.task_description);
  return d;
}

TrainConfig parse_train(const Section& s) {
  s.allow_only({"epochs", "momentum", "weight_decay", "learning_rate", "cosine_annealing", "batch_size",
                "augmentation", "subset_fraction"});
  TrainConfig t;
  s.read("epochs", t.epochs);
  s.read("momentum", t.momentum);
  s.read("weight_decay", t.weight_decay);
  s.read("learning_rate", t.learning_rate);
  s.read("cosine_annealing", t.cosine_annealing);
  s.read("batch_size", t.batch_size);
  s.read("subset_fraction", t.subset_fraction);
  if (s.has("augmentation")) {
    const auto a = s.child("augmentation");
    a.allow_only({"random_crop_pad", "crop_padding", "horizontal_flip", "normalize"});
    a.read("random_crop_pad", t.augmentation.random_crop_pad);
    a.read("crop_padding", t.augmentation.crop_padding);
    a.read("horizontal_flip", t.augmentation.horizontal_flip);
    a.read("normalize", t.augmentation.normalize);
  }
  return t;
}

}  // namespace

CliConfig parse_cli_config(const json& doc, const fs::path& base_dir) {
  const Section top(doc, "");
  top.allow_only({"max_iterations", "window_size", "seed", "evaluation_timeout_s", "extended_prompt",
                  "top_k_exemplars", "ablation", "dataset", "sampling", "train", "backend",
                  "generator_endpoint", "improver_endpoint", "worker", "template_dir", "log_path", "sim"});
  CliConfig c;
  RunConfig& r = c.run;

  r.max_iterations = top.get_or<std::int64_t>("max_iterations", 100);
  const auto k = top.get_or<std::int64_t>("window_size", 5);
  if (k < 1) throw ConfigError("field 'window_size': must be at least 1 (got " + std::to_string(k) + ")");
  r.window_size = static_cast<std::size_t>(k);
  r.seed = top.get_or<std::int64_t>("seed", 0);
  const double timeout_s = top.get_or<double>("evaluation_timeout_s", 1800.0);
  if (!(timeout_s > 0)) throw ConfigError("field 'evaluation_timeout_s': must be positive");
  r.evaluation_timeout = std::chrono::milliseconds(static_cast<std::int64_t>(timeout_s * 1000));
  r.extended_prompt = top.get_or<bool>("extended_prompt", false);
  const auto top_k = top.get_or<std::int64_t>("top_k_exemplars", 3);
  if (top_k < 1) throw ConfigError("field 'top_k_exemplars': must be at least 1");
  r.top_k_exemplars = static_cast<std::size_t>(top_k);
  r.ablation = ablation_from_string(top.get_or<std::string>("ablation", "none"));
  r.dataset = top.has("dataset") ? parse_dataset(top.raw("dataset")) : dataset_by_name("cifar10");

  if (top.has("sampling")) {
    const auto s = top.child("sampling");
    s.allow_only({"temperature", "top_p", "max_new_tokens"});
    s.read("temperature", r.sampling.temperature);
    s.read("top_p", r.sampling.top_p);
    s.read("max_new_tokens", r.sampling.max_new_tokens);
  }
  if (top.has("train")) r.train = parse_train(top.child("train"));

  const auto backend = top.get_or<std::string>("backend", "llm");
  if (backend == "llm") c.backend = BackendKind::Llm;
  else if (backend == "sim") c.backend = BackendKind::Sim;
  else throw ConfigError("field 'backend': expected 'llm' or 'sim', got '" + backend + "'");

  if (top.has("generator_endpoint")) c.generator_endpoint = parse_endpoint(top.child("generator_endpoint"), base_dir);
  if (top.has("improver_endpoint")) c.improver_endpoint = parse_endpoint(top.child("improver_endpoint"), base_dir);
  if (!c.improver_endpoint) c.improver_endpoint = c.generator_endpoint;

  if (top.has("worker")) {
    const auto w = top.child("worker");
    w.allow_only({"command", "working_dir", "env", "seed"});
    WorkerConfig wc;
    if (!w.has("command") || !w.raw("command").is_array() || w.raw("command").empty()) {
      throw ConfigError("field 'worker.command': expected a non-empty array of strings");
    }
    for (const auto& a : w.raw("command")) {
      if (!a.is_string()) throw ConfigError("field 'worker.command': expected a non-empty array of strings");
      wc.command.push_back(a.get<std::string>());
    }
    if (w.has("working_dir")) wc.working_dir = resolve(w.get_or<std::string>("working_dir", ""), base_dir);
    if (w.has("env")) {
      const auto env = w.child("env");
      for (const auto& [key, value] : w.raw("env").items()) {
        if (!value.is_string()) throw ConfigError("field '" + env.qualify(key) + "': expected string");
        wc.env.emplace_back(key, value.get<std::string>());
      }
    }
    wc.seed = w.get_or<std::int64_t>("seed", 43);
    c.worker = std::move(wc);
  }

  c.template_dir = top.has("template_dir") ? resolve(top.get_or<std::string>("template_dir", ""), base_dir)
                                           : prompt::default_template_dir();
  if (top.has("log_path")) c.log_path = resolve(top.get_or<std::string>("log_path", ""), base_dir);

  if (top.has("sim")) {
    const auto s = top.child("sim");
    s.allow_only({"dimension", "noise", "failure_rate", "landscape_seed", "seeds", "iterations"});
    s.read("dimension", c.sim.params.dimension);
    s.read("noise", c.sim.params.noise);
    s.read("failure_rate", c.sim.params.failure_rate);
    s.read("landscape_seed", c.sim.params.landscape_seed);
    s.read("iterations", c.sim.iterations);
    if (s.has("seeds")) {
      const auto& seeds = s.raw("seeds");
      if (!seeds.is_array()) throw ConfigError("field 'sim.seeds': expected an array of integers");
      for (const auto& v : seeds) {
        if (!v.is_number_integer()) throw ConfigError("field 'sim.seeds': expected an array of integers");
        c.sim.seeds.push_back(v.get<std::int64_t>());
      }
    }
    if (c.sim.params.dimension < 1) throw ConfigError("field 'sim.dimension': must be at least 1");
    if (!(c.sim.params.noise >= 0)) throw ConfigError("field 'sim.noise': must be non-negative");
    if (!(c.sim.params.failure_rate >= 0 && c.sim.params.failure_rate <= 1)) {
      throw ConfigError("field 'sim.failure_rate': must lie in [0, 1]");
    }
    if (c.sim.iterations < 1) throw ConfigError("field 'sim.iterations': must be at least 1");
  }

  r.validate();
  if (c.backend == BackendKind::Llm) {
    if (!c.generator_endpoint) throw ConfigError("field 'generator_endpoint': required when backend is 'llm'");
    if (!c.worker) throw ConfigError("field 'worker': required when backend is 'llm'");
  }
  return c;
}

CliConfig load_cli_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return parse_cli_config(doc, path.has_parent_path() ? path.parent_path() : fs::path("."));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace llmnas::config
