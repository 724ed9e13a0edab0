#include <doctest.h>

#include "llmnas/core/digest.hpp"
#include "llmnas/core/errors.hpp"
#include "llmnas/core/run_log.hpp"
#include "llmnas/core/serialization.hpp"
#include "scripted.hpp"

using namespace llmnas;
using llmnas::testing::read_file;
using llmnas::testing::TempDir;
using llmnas::testing::write_file;

namespace {
RunLogRecord record(std::int64_t it, double acc) {
  RunLogRecord r;
  r.iteration = it;
  r.candidate_id = it;
  r.timestamp = "t";
  r.source_text = "class Net: pass";
  r.source_hash = digest(r.source_text);
  r.outcome = EvaluationOutcome::success(acc);
  r.triple_appended.outcome = r.outcome;
  r.best_accuracy_after = acc;
  return r;
}
}  // namespace

TEST_SUITE("run_log") {

TEST_CASE("writer and reader agree") {
  TempDir dir;
  const auto path = dir / "run.jsonl";
  {
    RunLogWriter w(path, RunLogWriter::Mode::CreateNew);
    for (int i = 1; i <= 5; ++i) w.append(record(i, i / 10.0));
  }
  const auto r = read_run_log(path);
  CHECK_FALSE(r.torn_tail);
  REQUIRE(r.records.size() == 5);
  CHECK(r.records[2] == record(3, 0.3));
  CHECK(r.valid_bytes == std::filesystem::file_size(path));
}

TEST_CASE("CreateNew refuses to clobber, Overwrite and Append do not") {
  TempDir dir;
  const auto path = dir / "run.jsonl";
  { RunLogWriter w(path, RunLogWriter::Mode::CreateNew); w.append(record(1, 0.1)); }
  CHECK_THROWS_AS(RunLogWriter(path, RunLogWriter::Mode::CreateNew), LogWriteError);
  { RunLogWriter w(path, RunLogWriter::Mode::Append); w.append(record(2, 0.2)); }
  CHECK(read_run_log(path).records.size() == 2);
  { RunLogWriter w(path, RunLogWriter::Mode::Overwrite); w.append(record(1, 0.3)); }
  CHECK(read_run_log(path).records.size() == 1);
}

TEST_CASE("an unwritable location is a LogWriteError") {
  TempDir dir;
  write_file(dir / "file", "x");
  CHECK_THROWS_AS(RunLogWriter(dir / "file" / "run.jsonl", RunLogWriter::Mode::CreateNew), LogWriteError);
}

TEST_CASE("a torn final line is reported and can be truncated") {
  TempDir dir;
  const auto path = dir / "run.jsonl";
  { RunLogWriter w(path, RunLogWriter::Mode::CreateNew); for (int i = 1; i <= 3; ++i) w.append(record(i, 0.1)); }
  const auto intact = read_file(path);
  for (std::size_t cut : {std::size_t{1}, std::size_t{10}, std::size_t{40}}) {
    write_file(path, intact + nlohmann::json(record(4, 0.2)).dump().substr(0, cut));
    const auto r = read_run_log(path);
    CHECK(r.torn_tail);
    CHECK(r.records.size() == 3);
    CHECK(r.warning.find("line 4") != std::string::npos);
    truncate_run_log(path, r.valid_bytes);
    CHECK(read_file(path) == intact);
  }
  // Terminated but unparseable last line is also treated as torn.
  write_file(path, intact + "{\"iteration\":\n");
  CHECK(read_run_log(path).torn_tail);
}

TEST_CASE("damage before the last line is CorruptLog") {
  TempDir dir;
  const auto path = dir / "run.jsonl";
  const auto l1 = nlohmann::json(record(1, 0.1)).dump() + "\n";
  const auto l3 = nlohmann::json(record(3, 0.1)).dump() + "\n";
  write_file(path, l1 + "garbage\n" + l3);
  CHECK_THROWS_AS(read_run_log(path), CorruptLog);
  write_file(path, l3 + l1);
  CHECK_THROWS_AS(read_run_log(path), CorruptLog);
  CHECK_THROWS_AS(read_run_log(dir / "missing.jsonl"), CorruptLog);
}

TEST_CASE("empty file reads as empty log") {
  TempDir dir;
  write_file(dir / "e.jsonl", "");
  const auto r = read_run_log(dir / "e.jsonl");
  CHECK(r.records.empty());
  CHECK_FALSE(r.torn_tail);
}

}  // TEST_SUITE
