#pragma once

// JSON mappings for the domain types. The field names here are the run-log
// schema documented in docs/run_log_schema.md.

#include <json.hpp>

#include "llmnas/core/types.hpp"

namespace llmnas {

void to_json(nlohmann::json& j, const Candidate& c);
void from_json(const nlohmann::json& j, Candidate& c);

void to_json(nlohmann::json& j, const EvaluationOutcome& o);
void from_json(const nlohmann::json& j, EvaluationOutcome& o);

void to_json(nlohmann::json& j, const DiagnosticTriple& t);
void from_json(const nlohmann::json& j, DiagnosticTriple& t);

void to_json(nlohmann::json& j, const ImproverOutput& o);
void from_json(const nlohmann::json& j, ImproverOutput& o);

void to_json(nlohmann::json& j, const DatasetSpec& d);
void from_json(const nlohmann::json& j, DatasetSpec& d);

void to_json(nlohmann::json& j, const TrainConfig& t);
void from_json(const nlohmann::json& j, TrainConfig& t);

void to_json(nlohmann::json& j, const RunLogRecord& r);
void from_json(const nlohmann::json& j, RunLogRecord& r);

// Single-line JSON; invalid UTF-8 is replaced rather than thrown on.
std::string dump_line(const nlohmann::json& j);

}  // namespace llmnas
