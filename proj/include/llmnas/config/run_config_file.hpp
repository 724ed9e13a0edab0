#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "llmnas/core/types.hpp"
#include "llmnas/llm/client.hpp"
#include "llmnas/sim/experiment.hpp"

namespace llmnas::config {

enum class BackendKind { Llm, Sim };

struct WorkerConfig {
  std::vector<std::string> command;
  std::optional<std::filesystem::path> working_dir;
  std::vector<std::pair<std::string, std::string>> env;
  std::int64_t seed = 43;
};

struct SimSection {
  sim::SimParams params;
  std::vector<std::int64_t> seeds;
  std::int64_t iterations = 150;
};

/// On-disk run configuration (JSON, schema in docs/config_schema.md).
struct CliConfig {
  RunConfig run;
  BackendKind backend = BackendKind::Llm;
  std::optional<llm::LlmEndpoint> generator_endpoint;
  std::optional<llm::LlmEndpoint> improver_endpoint;
  std::optional<WorkerConfig> worker;
  std::filesystem::path template_dir;
  std::optional<std::filesystem::path> log_path;
  SimSection sim;
};

/// Parses and validates a configuration document. Relative paths are
/// resolved against `base_dir`. Unknown keys, wrong types and out-of-range
/// values raise ConfigError naming the field; API keys are read from the
/// environment variables the document names.
CliConfig parse_cli_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads `path`; JSON syntax errors are reported with line and column.
CliConfig load_cli_config(const std::filesystem::path& path);

std::string_view to_string(BackendKind kind);

}  // namespace llmnas::config
