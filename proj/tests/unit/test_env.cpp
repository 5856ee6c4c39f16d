// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "rsim/core/error.hpp"
#include "rsim/env/tasks.hpp"

using namespace rsim;
using namespace rsim::env;
using rsim::test::chain_question;
using rsim::test::lock_question;
using rsim::test::rollout;
using rsim::test::step;
using rsim::test::vocab;

namespace {

// Independent evaluator: parse the decoded prompt text.
int brute_force(const std::string& text) {
  std::istringstream in(text);
  int acc = 0;
  in >> acc;
  std::string op;
  int x = 0;
  while (in >> op >> x) {
    if (op == "+") acc += x;
    if (op == "-") acc -= x;
    if (op == "*") acc *= x;
    acc %= 10;
    if (acc < 0) acc += 10;
  }
  return acc;
}

}  // namespace

TEST_CASE("chain fold examples") {
  CHECK(chain_fold(vocab().encode("3 + 4 * 2"), vocab()) == 4);
  CHECK(chain_fold(vocab().encode("5 - 7"), vocab()) == 8);
  CHECK(chain_fold(vocab().encode("0 + 0"), vocab()) == 0);
  CHECK(chain_fold(vocab().encode("9 * 9 * 9"), vocab()) == 9);
  CHECK_THROWS_AS(chain_fold(vocab().encode("3 +"), vocab()), Error);
  CHECK_THROWS_AS(chain_fold(vocab().encode("3 4 5"), vocab()), Error);
}

TEST_CASE("generated arithmetic matches a brute-force evaluator") {
  TaskSpec t;
  t.depth = 3;
  const auto qs = generate_questions(t, 77, 500, vocab());
  for (const auto& q : qs) {
    CHECK(q.prompt_tokens.size() == 7);
    REQUIRE(q.ground_truth.size() == 1);
    CHECK(*vocab().digit_value(q.ground_truth[0]) ==
          brute_force(vocab().decode(q.prompt_tokens)));
    CHECK(q.lock_sequence.empty());
  }
}

TEST_CASE("question generation is reproducible") {
  const auto t = parse_task("StrategyLock:3");
  const auto a = generate_questions(t, 5, 20, vocab(), 100);
  const auto b = generate_questions(t, 5, 20, vocab(), 100);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == 100 + static_cast<std::int64_t>(i));
    CHECK(a[i].prompt_tokens == b[i].prompt_tokens);
    CHECK(a[i].lock_sequence == b[i].lock_sequence);
  }
  const auto c = generate_questions(t, 6, 20, vocab(), 100);
  int same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i].prompt_tokens == c[i].prompt_tokens;
  CHECK(same < 5);
}

TEST_CASE("lock questions") {
  auto t = parse_task("StrategyLock-B:2");
  CHECK(t.kind == TaskKind::kStrategyLock);
  CHECK(t.depth == 2);
  CHECK(t.label() == "StrategyLock-B:2");
  for (const auto& q : generate_questions(t, 1, 200, vocab())) {
    REQUIRE(q.lock_sequence.size() == 2);
    CHECK(q.prompt_tokens.front() == vocab().lock());
    CHECK(q.ground_truth == TokenSeq{vocab().ok()});
    for (std::size_t i = 0; i < 2; ++i) {
      const int k = to_index(q.lock_sequence[i]);
      CHECK(k >= 5);
      CHECK(k <= 8);
      CHECK(q.prompt_tokens[i + 1] == vocab().digit(k));
    }
  }
  t.mixed_lengths = true;
  t.depth = 3;
  std::set<std::size_t> lengths;
  for (const auto& q : generate_questions(t, 1, 200, vocab())) lengths.insert(q.lock_sequence.size());
  CHECK(lengths == std::set<std::size_t>{1, 2, 3});
}

TEST_CASE("task presets and validation") {
  CHECK(parse_task("ChainArithmetic").depth == 3);
  CHECK(parse_task("StrategyLock-A:3").lock_alphabet == std::vector<int>{1, 2, 3, 4});
  CHECK(parse_task("StrategyLock:2").lock_alphabet.size() == 8);
  CHECK_THROWS_AS(parse_task("Sudoku"), Error);
  CHECK_THROWS_AS(parse_task("StrategyLock:x"), Error);
  auto t = parse_task("StrategyLock:3");
  CHECK_NOTHROW(t.validate(4));
  CHECK_THROWS_AS(t.validate(3), Error);
  t.depth = 0;
  CHECK_THROWS_AS(t.validate(8), Error);
  t = parse_task("StrategyLock:1");
  t.lock_alphabet = {0};
  CHECK_THROWS_AS(t.validate(8), Error);
  CHECK_THROWS_AS(generate_questions(parse_task("ChainArithmetic"), 1, 0, vocab()), Error);
}

TEST_CASE("verify") {
  const auto q = chain_question("3 + 4 * 2", 4);
  CHECK(verify(q, TokenSeq{vocab().digit(4)}));
  CHECK_FALSE(verify(q, TokenSeq{vocab().digit(7)}));
  CHECK_FALSE(verify(q, std::nullopt));
  CHECK_FALSE(verify(q, TokenSeq{vocab().digit(4), vocab().digit(4)}));
}

TEST_CASE("format check") {
  CHECK(format_ok(rollout({step(2, "M2 OK <sep>"), step(1, "M1 <ans> 4 <sep>")}), vocab(), 16));
  CHECK_FALSE(format_ok(rollout({step(2, "M2 OK")}), vocab(), 16));
  CHECK_FALSE(format_ok(rollout({step(7, "<ans> 4 <sep>"), step(1, "M1 <ans> 4 <sep>")}), vocab(), 16));
  CHECK_FALSE(format_ok(rollout({}), vocab(), 16));
  // ANS needs at least one answer token before SEP.
  CHECK_FALSE(format_ok(rollout({step(1, "M1 <ans> <sep>")}), vocab(), 16));
  // ANS outside the final step.
  CHECK_FALSE(format_ok(rollout({step(1, "M1 <ans> 4 <sep>"), step(2, "M2 <sep>")}), vocab(), 16));
  // Step longer than l_max.
  CHECK(format_ok(rollout({step(1, "M1 <ans> 4 <sep>")}), vocab(), 4));
  CHECK_FALSE(format_ok(rollout({step(1, "M1 <ans> 4 <sep>")}), vocab(), 3));
}

TEST_CASE("lock accuracy") {
  const auto q = lock_question({2, 5});
  CHECK(lock_accuracy(q, rollout({step(2, "M2 OK <sep>"), step(5, "M5 OK <ans> OK <sep>")}), vocab()));
  CHECK_FALSE(lock_accuracy(q, rollout({step(2, "M2 OK <sep>"), step(2, "M2 OK <ans> OK <sep>")}), vocab()));
  CHECK_FALSE(lock_accuracy(q, rollout({step(2, "M2 OK <sep>"), step(5, "M5 OK <ans> OK <sep>")}, 3), vocab()));
  // Step shape: marker then OK, final step ANS OK.
  CHECK_FALSE(lock_accuracy(q, rollout({step(2, "M2 1 <sep>"), step(5, "M5 OK <ans> OK <sep>")}), vocab()));
  CHECK_FALSE(lock_accuracy(q, rollout({step(2, "M2 OK <sep>"), step(5, "M5 OK <ans> 4 <sep>")}), vocab()));
  CHECK_THROWS_AS(lock_accuracy(chain_question("1 + 1", 2), rollout({}), vocab()), Error);
}

TEST_CASE("judge") {
  const auto lock = lock_question({2, 5});
  const auto good = rollout({step(2, "M2 <sep>"), step(5, "M5 <ans> OK <sep>")});
  CHECK(plans_match_lock(lock, good));
  CHECK(judge(lock, good));
  // Right answer, wrong plans.
  CHECK_FALSE(judge(lock, rollout({step(3, "M3 <sep>"), step(5, "M5 <ans> OK <sep>")})));
  // Right plans, wrong answer.
  CHECK_FALSE(judge(lock, rollout({step(2, "M2 <sep>"), step(5, "M5 <ans> 1 <sep>")})));
  // Truncated.
  CHECK_FALSE(judge(lock, rollout({step(2, "M2 <sep>"), step(5, "M5 <ans> OK <sep>")}, 4)));
  const auto chain = chain_question("3 + 4 * 2", 4);
  CHECK(judge(chain, rollout({step(7, "7 <sep>"), step(4, "M4 <ans> 4 <sep>")})));
  CHECK_FALSE(judge(chain, rollout({step(4, "M4 <ans> 5 <sep>")})));
}

TEST_CASE("question export") {
  std::ostringstream out;
  auto qs = generate_questions(parse_task("StrategyLock:2"), 3, 2, vocab(), -2);
  qs.push_back(chain_question("3 + 4 * 2", 4));
  write_questions_jsonl(out, qs, vocab());
  std::istringstream in(out.str());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    if (n < 2) {
      CHECK(j["task"] == "StrategyLock");
      CHECK(j["ground_truth"] == "OK");
      CHECK(j["lock_sequence"].size() == 2);
      CHECK(j["id"] == -2 + n);
    } else {
      CHECK(j["prompt"] == "3 + 4 * 2");
      CHECK(j["ground_truth"] == "4");
      CHECK_FALSE(j.contains("lock_sequence"));
    }
    ++n;
  }
  CHECK(n == 3);
}
