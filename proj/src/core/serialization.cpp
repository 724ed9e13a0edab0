#include "llmnas/core/serialization.hpp"

#include "llmnas/core/errors.hpp"

namespace llmnas {

using nlohmann::json;

std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

void to_json(json& j, const Candidate& c) {
  j = json{{"id", c.id},
           {"iteration", c.iteration},
           {"source_text", c.source_text},
           {"source_hash", c.source_hash}};
}

void from_json(const json& j, Candidate& c) {
  j.at("id").get_to(c.id);
  j.at("iteration").get_to(c.iteration);
  j.at("source_text").get_to(c.source_text);
  j.at("source_hash").get_to(c.source_hash);
}

void to_json(json& j, const EvaluationOutcome& o) {
  j = json{{"kind", std::string(to_string(o.kind()))}};
  if (o.accuracy()) j["accuracy"] = *o.accuracy();
  if (o.message()) j["message"] = *o.message();
}

void from_json(const json& j, EvaluationOutcome& o) {
  const auto kind = outcome_kind_from_string(j.at("kind").get<std::string>());
  const bool has_acc = j.contains("accuracy");
  const bool has_msg = j.contains("message");
  if (kind == OutcomeKind::Success) {
    if (!has_acc || has_msg) throw Error("Success outcome must carry accuracy and no message");
    o = EvaluationOutcome::success(j.at("accuracy").get<double>());
  } else {
    if (has_acc || !has_msg) throw Error("failure outcome must carry message and no accuracy");
    o = EvaluationOutcome::failure(kind, j.at("message").get<std::string>());
  }
}

void to_json(json& j, const DiagnosticTriple& t) {
  j = json{{"problem", t.problem}, {"suggestion", t.suggestion}, {"outcome", t.outcome}};
}

void from_json(const json& j, DiagnosticTriple& t) {
  j.at("problem").get_to(t.problem);
  j.at("suggestion").get_to(t.suggestion);
  j.at("outcome").get_to(t.outcome);
}

void to_json(json& j, const ImproverOutput& o) {
  j = json{{"reason", o.reason}, {"inspiration", o.inspiration}, {"suggestions", o.suggestions}};
}

void from_json(const json& j, ImproverOutput& o) {
  j.at("reason").get_to(o.reason);
  j.at("inspiration").get_to(o.inspiration);
  j.at("suggestions").get_to(o.suggestions);
}

void to_json(json& j, const DatasetSpec& d) {
  j = json{{"name", d.name},
           {"input_channels", d.input_channels},
           {"input_height", d.input_height},
           {"input_width", d.input_width},
           {"num_classes", d.num_classes},
           {"task_description", d.task_description}};
}

void from_json(const json& j, DatasetSpec& d) {
  j.at("name").get_to(d.name);
  j.at("input_channels").get_to(d.input_channels);
  j.at("input_height").get_to(d.input_height);
  j.at("input_width").get_to(d.input_width);
  j.at("num_classes").get_to(d.num_classes);
  d.task_description = j.value("task_description", std::string{});
}

void to_json(json& j, const TrainConfig& t) {
  j = json{{"epochs", t.epochs},
           {"optimizer", {{"name", "sgd"}, {"momentum", t.momentum}, {"weight_decay", t.weight_decay}}},
           {"learning_rate", t.learning_rate},
           {"cosine_annealing", t.cosine_annealing},
           {"batch_size", t.batch_size},
           {"augmentation",
            {{"random_crop_pad", t.augmentation.random_crop_pad},
             {"crop_padding", t.augmentation.crop_padding},
             {"horizontal_flip", t.augmentation.horizontal_flip},
             {"normalize", t.augmentation.normalize}}},
           {"subset_fraction", t.subset_fraction}};
}

void from_json(const json& j, TrainConfig& t) {
  j.at("epochs").get_to(t.epochs);
  const auto& opt = j.at("optimizer");
  opt.at("momentum").get_to(t.momentum);
  opt.at("weight_decay").get_to(t.weight_decay);
  j.at("learning_rate").get_to(t.learning_rate);
  j.at("cosine_annealing").get_to(t.cosine_annealing);
  j.at("batch_size").get_to(t.batch_size);
  const auto& aug = j.at("augmentation");
  aug.at("random_crop_pad").get_to(t.augmentation.random_crop_pad);
  aug.at("crop_padding").get_to(t.augmentation.crop_padding);
  aug.at("horizontal_flip").get_to(t.augmentation.horizontal_flip);
  aug.at("normalize").get_to(t.augmentation.normalize);
  j.at("subset_fraction").get_to(t.subset_fraction);
}

void to_json(json& j, const RunLogRecord& r) {
  j = json{{"iteration", r.iteration},
           {"timestamp", r.timestamp},
           {"candidate_id", r.candidate_id},
           {"source_hash", r.source_hash},
           {"source_text", r.source_text},
           {"outcome", r.outcome},
           {"triple_appended", r.triple_appended},
           {"best_accuracy_after", r.best_accuracy_after},
           {"prompt_digest", r.prompt_digest}};
  if (r.improver_output) j["improver_output"] = *r.improver_output;
  j["llm_calls_after"] = r.llm_calls_after;
}

void from_json(const json& j, RunLogRecord& r) {
  j.at("iteration").get_to(r.iteration);
  j.at("timestamp").get_to(r.timestamp);
  j.at("candidate_id").get_to(r.candidate_id);
  j.at("source_hash").get_to(r.source_hash);
  j.at("source_text").get_to(r.source_text);
  j.at("outcome").get_to(r.outcome);
  j.at("triple_appended").get_to(r.triple_appended);
  j.at("best_accuracy_after").get_to(r.best_accuracy_after);
  j.at("prompt_digest").get_to(r.prompt_digest);
  if (j.contains("improver_output")) {
    r.improver_output = j.at("improver_output").get<ImproverOutput>();
  } else {
    r.improver_output.reset();
  }
  j.at("llm_calls_after").get_to(r.llm_calls_after);
}

}  // namespace llmnas
