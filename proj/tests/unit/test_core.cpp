// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <atomic>
#include <set>
#include <stdexcept>

#include "helpers.hpp"
#include "rsim/core/error.hpp"
#include "rsim/core/parallel.hpp"
#include "rsim/core/rng.hpp"
#include "rsim/core/strategy.hpp"

using namespace rsim;
using rsim::test::vocab;

TEST_CASE("standard vocabulary layout") {
  const auto& v = vocab();
  CHECK(v.size() == 27);
  CHECK(v.symbol(v.pad()) == "<pad>");
  CHECK(v.symbol(v.sep()) == "<sep>");
  CHECK(v.symbol(v.ans()) == "<ans>");
  CHECK(v.digit_value(v.digit(7)) == 7);
  CHECK_FALSE(v.digit_value(v.ok()).has_value());
  CHECK_FALSE(v.marker(Strategy::kTermination).has_value());
  for (int k = 1; k <= 8; ++k) {
    const auto m = v.marker(strategy_from_index(k));
    REQUIRE(m.has_value());
    CHECK(v.symbol(*m) == "M" + std::to_string(k));
    CHECK(v.marker_strategy(*m) == strategy_from_index(k));
  }
  CHECK_FALSE(v.is_marker(v.ok()));
}

TEST_CASE("encode and decode round trip") {
  const auto& v = vocab();
  const std::string text = "<bos> 3 + 4 * 2 M2 <ans> 4 <sep>";
  CHECK(v.decode(v.encode(text)) == text);
  CHECK(v.encode("").empty());
}

TEST_CASE("vocabulary errors") {
  const auto& v = vocab();
  try {
    v.id("NOPE");
    FAIL("expected UnknownToken");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownToken);
  }
  CHECK_THROWS_AS(v.symbol(99), Error);
  auto tokens = v.tokens();
  tokens.push_back("OK");
  try {
    Vocab dup(tokens);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigError);
  }
  auto missing = v.tokens();
  missing.pop_back();  // drops M8
  CHECK_THROWS_AS(Vocab{missing}, Error);
}

TEST_CASE("vocabulary hash tracks content") {
  auto tokens = vocab().tokens();
  std::swap(tokens[4], tokens[5]);
  CHECK(Vocab(tokens).hash() != vocab().hash());
  CHECK(Vocab::standard().hash() == vocab().hash());
}

TEST_CASE("builtin strategy table") {
  const auto& t = StrategyTable::builtin();
  CHECK(t.at(Strategy::kTermination).name == "Termination");
  CHECK_FALSE(t.at(Strategy::kTermination).marker.has_value());
  CHECK(t.at(Strategy::kSubPlanning).marker == "M8");
  const auto countable = t.countable();
  REQUIRE(countable.size() == 7);
  CHECK(countable.front() == Strategy::kSelfReflection);
  CHECK(countable.back() == Strategy::kSubPlanning);
  CHECK(t.at(Strategy::kContinuation).keywords.empty());
  CHECK(t.at(Strategy::kDecomposition).keywords.at(1) == "break down");
  CHECK(t.at(Strategy::kDeliberativeThinking).label == "deep thinking");
  CHECK(StrategyTable::from_json(t.canonical_json()).hash() == t.hash());
}

TEST_CASE("strategy ids") {
  for (int i = 0; i < kNumStrategies; ++i) CHECK(to_index(strategy_from_index(i)) == i);
  CHECK_THROWS_AS(strategy_from_index(9), Error);
  CHECK_THROWS_AS(strategy_from_index(-1), Error);
  CHECK(parse_strategy("Validation") == Strategy::kValidation);
  CHECK_FALSE(parse_strategy("Guessing").has_value());
}

TEST_CASE("malformed strategy table is rejected") {
  CHECK_THROWS(StrategyTable::from_json("{\"version\": 1}"));
  CHECK_THROWS(StrategyTable::from_json("not json"));
}

TEST_CASE("derived seeds are stable and distinct") {
  CHECK(derive_seed(7, {1, 2}) == derive_seed(7, {1, 2}));
  CHECK(derive_seed(7, {1, 2}) != derive_seed(7, {2, 1}));
  CHECK(derive_seed(7, {1}) != derive_seed(8, {1}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t q = 0; q < 100; ++q) {
    for (std::uint64_t g = 0; g < 16; ++g) seen.insert(derive_seed(3, {q, g}));
  }
  CHECK(seen.size() == 1600);
}

TEST_CASE("rng draws stay in range") {
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.below(9) < 9);
  }
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("parallel_for visits every index once") {
  for (int threads : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("parallel_for rethrows worker errors") {
  auto boom = [](std::size_t i) {
    if (i == 5) throw std::runtime_error("boom");
  };
  CHECK_THROWS_AS(parallel_for(20, 4, boom), std::runtime_error);
  CHECK_THROWS_AS(parallel_for(20, 1, boom), std::runtime_error);
}

TEST_CASE("answer extraction reads the final step") {
  using rsim::test::rollout;
  using rsim::test::step;
  auto r = rollout({step(2, "M2 OK <sep>"), step(1, "M1 <ans> 4 <sep>")});
  REQUIRE(r.extracted_answer.has_value());
  CHECK(vocab().decode(*r.extracted_answer) == "4");
  // An ANS in an earlier step is not an answer.
  r = rollout({step(1, "M1 <ans> 4 <sep>"), step(2, "M2 OK <sep>")});
  CHECK_FALSE(r.extracted_answer.has_value());
  // Truncated step without SEP still yields the tokens after ANS.
  r = rollout({step(1, "M1 <ans> 4 5")});
  CHECK(vocab().decode(*r.extracted_answer) == "4 5");
  r = rollout({step(1, "M1 <ans> <sep>")});
  REQUIRE(r.extracted_answer.has_value());
  CHECK(r.extracted_answer->empty());
  CHECK_FALSE(rollout({}).extracted_answer.has_value());
}

TEST_CASE("trace context interleaves markers and steps") {
  using rsim::test::step;
  const auto q = rsim::test::lock_question({2, 5});
  const auto ctx = trace_context(q, {step(2, "M2 OK <sep>")}, vocab());
  CHECK(vocab().decode(ctx) == "<bos> LOCK 2 5 M2 M2 OK <sep>");
  // Continuation has a marker too; Termination never appears in a trace.
  const auto c = trace_context(q, {step(7, "1 <sep>")}, vocab());
  CHECK(vocab().decode(c) == "<bos> LOCK 2 5 M7 1 <sep>");
}

TEST_CASE("rollout plan list includes the final plan") {
  using rsim::test::rollout;
  using rsim::test::step;
  const auto r = rollout({step(2, "M2 <sep>"), step(4, "M4 1")}, 3);
  CHECK(r.plans() == std::vector<Strategy>{Strategy::kDecomposition, Strategy::kValidation,
                                           Strategy::kDeliberativeThinking});
  CHECK(r.token_count() == 4);
  CHECK(r.truncated);
}

TEST_CASE("run config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  auto expect_bad = [](RunConfig bad) {
    try {
      bad.validate();
      FAIL("expected ConfigError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfigError);
    }
  };
  RunConfig b = c;
  b.group_size = 1;
  expect_bad(b);
  b = c;
  b.lambda_stage1 = 1.5;
  expect_bad(b);
  b = c;
  b.grad_accum = b.batch_questions + 1;
  expect_bad(b);
  b = c;
  b.n_max = 0;
  expect_bad(b);
  b = c;
  b.threads = 0;
  expect_bad(b);
  CHECK(c.total_updates() == 200);
}

TEST_CASE("error code names") {
  CHECK(error_code_name(ErrorCode::kConfigError) == "ConfigError");
  CHECK(error_code_name(ErrorCode::kVocabMismatch) == "VocabMismatch");
  CHECK(error_code_name(ErrorCode::kCorruptCheckpoint) == "CorruptCheckpoint");
  CHECK(error_code_name(ErrorCode::kNumericError) == "NumericError");
  ParseError pe(3, "bad");
  CHECK(pe.line() == 3);
  CHECK(pe.code() == ErrorCode::kParseError);
}
