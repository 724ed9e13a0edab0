#include <doctest.h>

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <thread>

#include "llmnas/core/datasets.hpp"
#include "llmnas/core/errors.hpp"
#include "llmnas/eval/subprocess.hpp"
#include "llmnas/eval/worker_gateway.hpp"
#include "scripted.hpp"

using namespace llmnas;
using namespace llmnas::eval;
using namespace std::chrono_literals;

namespace {

SubprocessEvaluator evaluator(const std::string& script, ProcessOptions options = {}) {
  return SubprocessEvaluator(WorkerCommand{{"/bin/sh", testing::worker_script(script).string()}, options}, 5s);
}

Candidate candidate() { return Candidate::from_source(1, 1, "class Net:\n    pass"); }

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("run_process captures output, exit status and stdin") {
  const auto r = run_process({"/bin/sh", "-c", "cat; echo err >&2; exit 3"}, "hello", 5s);
  CHECK(r.exit_code == 3);
  CHECK(r.stdout_text == "hello");
  CHECK(r.stderr_text == "err\n");
  CHECK_FALSE(r.timed_out);
  CHECK_FALSE(r.exited_cleanly());
}

TEST_CASE("run_process reports signals") {
  const auto r = run_process({"/bin/sh", "-c", "kill -9 $$"}, "", 5s);
  CHECK(r.term_signal == SIGKILL);
}

TEST_CASE("run_process kills the whole process group on timeout") {
  testing::TempDir dir;
  const auto marker = dir / "survivor";
  const auto start = std::chrono::steady_clock::now();
  // The grandchild would create the marker after 2 s if it outlived the kill.
  const auto r = run_process({"/bin/sh", "-c", "(sleep 2; touch '" + marker.string() + "') & sleep 30"}, "", 500ms);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(r.timed_out);
  CHECK(elapsed < 3s);
  std::this_thread::sleep_for(2500ms);
  CHECK_FALSE(std::filesystem::exists(marker));
}

TEST_CASE("run_process applies working dir and environment") {
  testing::TempDir dir;
  ProcessOptions opt{dir.path(), {{"LLMNAS_PROBE", "42"}}};
  const auto r = run_process({"/bin/sh", "-c", "pwd; echo $LLMNAS_PROBE"}, "", 5s, opt);
  CHECK(r.stdout_text.find(std::filesystem::canonical(dir.path()).string()) != std::string::npos);
  CHECK(r.stdout_text.find("42") != std::string::npos);
}

TEST_CASE("a missing executable is reported") {
  CHECK_THROWS_AS(run_process({"/nonexistent/worker"}, "", 5s), Error);
}

TEST_CASE("request JSON follows the protocol") {
  TrainProtocolRequest req;
  req.request_kind = RequestKind::TrainEval;
  req.source_text = "class Net: pass";
  req.dataset = dataset_by_name("cifar10");
  const auto j = req.to_json();
  CHECK(j["protocol_version"] == "1");
  CHECK(j["request_kind"] == "TrainEval");
  CHECK(j["seed"] == 43);
  CHECK(j["dataset"]["num_classes"] == 10);
  CHECK(j["train"]["epochs"] == 1);
}

TEST_CASE("reply parsing") {
  std::string err;
  auto ok = parse_worker_reply(R"({"protocol_version":"1","status":"ok","accuracy":0.61})", err);
  REQUIRE(ok);
  CHECK(ok->accuracy == 0.61);
  CHECK_FALSE(parse_worker_reply("", err));
  CHECK(err == "worker produced no reply");
  CHECK_FALSE(parse_worker_reply("nope", err));
  CHECK_FALSE(parse_worker_reply(R"({"status":"ok","accuracy":1.5})", err));
  CHECK_FALSE(parse_worker_reply(R"({"status":"maybe"})", err));
  CHECK_FALSE(parse_worker_reply(R"({"protocol_version":"2","status":"ok"})", err));
  CHECK_FALSE(parse_worker_reply("[1,2]", err));
}

TEST_CASE("last_nonempty_line") {
  CHECK(last_nonempty_line("a\nb\n\n  \n") == "b");
  CHECK(last_nonempty_line("") == "");
  CHECK(last_nonempty_line("only") == "only");
}

TEST_CASE("worker fixtures map to outcome kinds") {
  const auto ds = dataset_by_name("cifar10");
  const TrainConfig train;

  SUBCASE("ok") {
    auto ev = evaluator("ok.sh");
    CHECK_FALSE(ev.validate(candidate(), ds));
    CHECK(ev.evaluate(candidate(), ds, train, 5s) == EvaluationOutcome::success(0.5));
  }
  SUBCASE("wrong output shape") {
    auto ev = evaluator("wrong_shape.sh");
    const auto v = ev.validate(candidate(), ds);
    REQUIRE(v);
    CHECK(v->kind() == OutcomeKind::ValidationError);
    CHECK(v->message()->find("output shape mismatch") != std::string::npos);
  }
  SUBCASE("crash") {
    const auto o = evaluator("crash.sh").evaluate(candidate(), ds, train, 5s);
    CHECK(o.kind() == OutcomeKind::RuntimeError);
    CHECK(o.message()->find("signal 9") != std::string::npos);
    CHECK(o.message()->find("illegal memory access") != std::string::npos);
  }
  SUBCASE("non-zero exit") {
    const auto o = evaluator("exit_nonzero.sh").evaluate(candidate(), ds, train, 5s);
    CHECK(o.kind() == OutcomeKind::RuntimeError);
    CHECK(o.message()->find("ZeroDivisionError") != std::string::npos);
  }
  SUBCASE("hang") {
    const auto start = std::chrono::steady_clock::now();
    const auto o = evaluator("hang.sh").evaluate(candidate(), ds, train, 1s);
    CHECK(o.kind() == OutcomeKind::Timeout);
    CHECK(std::chrono::steady_clock::now() - start < 4s);
  }
  SUBCASE("empty output") {
    const auto o = evaluator("empty.sh").evaluate(candidate(), ds, train, 5s);
    CHECK(o.kind() == OutcomeKind::RuntimeError);
    CHECK(o.message()->find("no reply") != std::string::npos);
  }
  SUBCASE("malformed output") {
    CHECK(evaluator("malformed.sh").evaluate(candidate(), ds, train, 5s).kind() == OutcomeKind::RuntimeError);
  }
  SUBCASE("protocol version mismatch") {
    const auto o = evaluator("wrong_version.sh").evaluate(candidate(), ds, train, 5s);
    CHECK(o.kind() == OutcomeKind::RuntimeError);
    CHECK(o.message()->find("protocol version") != std::string::npos);
  }
  SUBCASE("missing worker executable") {
    SubprocessEvaluator ev(WorkerCommand{{"/nonexistent/worker"}, {}}, 5s);
    CHECK(ev.evaluate(candidate(), ds, train, 5s).kind() == OutcomeKind::RuntimeError);
  }
}

TEST_CASE("the worker receives the candidate and the training protocol") {
  testing::TempDir dir;
  const auto capture = dir / "request.json";
  auto ev = evaluator("capture.sh", ProcessOptions{std::nullopt, {{"CAPTURE_FILE", capture.string()}}});
  TrainConfig train;
  train.subset_fraction = 0.1;
  CHECK(ev.evaluate(candidate(), dataset_by_name("cifar100"), train, 5s) == EvaluationOutcome::success(0.25));
  const auto j = nlohmann::json::parse(testing::read_file(capture));
  CHECK(j["source_text"] == candidate().source_text);
  CHECK(j["dataset"]["num_classes"] == 100);
  CHECK(j["train"]["subset_fraction"] == 0.1);
  CHECK(j["request_kind"] == "TrainEval");
}

}  // TEST_SUITE
