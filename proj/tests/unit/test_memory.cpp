#include <doctest.h>

#include <random>

#include "llmnas/core/errors.hpp"
#include "llmnas/memory/history_window.hpp"

using namespace llmnas;
using namespace llmnas::memory;

namespace {
DiagnosticTriple triple(int i) {
  return DiagnosticTriple{"p" + std::to_string(i), "s" + std::to_string(i),
                          i % 3 == 0 ? EvaluationOutcome::failure(OutcomeKind::RuntimeError, "e" + std::to_string(i))
                                     : EvaluationOutcome::success(i / 100.0)};
}
}  // namespace

TEST_SUITE("memory") {

TEST_CASE("capacity zero is rejected") { CHECK_THROWS_AS(HistoryWindow(0), ConfigError); }

TEST_CASE("append is pure and evicts the oldest entry") {
  HistoryWindow w(3);
  const auto w1 = w.append(triple(1));
  CHECK(w.empty());
  CHECK(w1.size() == 1);
  auto cur = w1;
  for (int i = 2; i <= 5; ++i) cur = cur.append(triple(i));
  REQUIRE(cur.size() == 3);
  CHECK(cur.entries()[0] == triple(3));
  CHECK(cur.entries()[2] == triple(5));
}

TEST_CASE("window equals the last min(n, K) appends") {
  std::mt19937_64 rng(5);
  for (std::size_t k : {1u, 2u, 5u}) {
    HistoryWindow w(k);
    std::vector<DiagnosticTriple> all;
    for (int i = 0; i < 20; ++i) {
      all.push_back(triple(static_cast<int>(rng() % 100)));
      w = w.append(all.back());
      const std::size_t expect = std::min(all.size(), k);
      REQUIRE(w.size() == expect);
      for (std::size_t j = 0; j < expect; ++j) CHECK(w.entries()[j] == all[all.size() - expect + j]);
    }
  }
}

TEST_CASE("render_history golden text") {
  HistoryWindow w(2);
  CHECK(render_history(w) == "Recent improvement attempts (oldest first):\n(no prior attempts)\n");
  w = w.append(DiagnosticTriple{"", "", EvaluationOutcome::success(0.4123)});
  w = w.append(DiagnosticTriple{"too shallow", "add a residual block",
                                EvaluationOutcome::failure(OutcomeKind::Timeout, "took too long")});
  CHECK(render_history(w) ==
        "Recent improvement attempts (oldest first):\n"
        "### Attempt 1\n"
        "Problem: (none)\n"
        "Suggestion: (none)\n"
        "Outcome: accuracy: 41.2%\n"
        "### Attempt 2\n"
        "Problem: too shallow\n"
        "Suggestion: add a residual block\n"
        "Outcome: error (Timeout): took too long\n");
}

TEST_CASE("rendering depends only on the window contents") {
  HistoryWindow a(2), b(2);
  for (int i = 0; i < 10; ++i) a = a.append(triple(i));
  for (int i = 50; i < 60; ++i) b = b.append(triple(i));
  a = a.append(triple(7)).append(triple(8));
  b = b.append(triple(7)).append(triple(8));
  CHECK(a == b);
  CHECK(render_history(a) == render_history(b));
}

TEST_CASE("rendered size stays under the bound") {
  HistoryWindow w(4);
  const std::string big(kMaxMessageLength, 'x');
  for (int i = 0; i < 10; ++i) {
    w = w.append(DiagnosticTriple{big, big, EvaluationOutcome::failure(OutcomeKind::ExtractionError, big)});
  }
  CHECK(render_history(w).size() <= render_history_bound(4, kMaxMessageLength));
}

}  // TEST_SUITE
