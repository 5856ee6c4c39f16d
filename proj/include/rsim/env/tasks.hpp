// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsim/core/types.hpp"

namespace rsim::env {

struct TaskSpec {
  TaskKind kind = TaskKind::kChainArithmetic;
  // ChainArithmetic: number of operators. StrategyLock: lock length.
  int depth = 3;
  int modulus = 10;
  // StrategyLock: strategy ids a lock may draw from (subset of 1..8).
  std::vector<int> lock_alphabet{1, 2, 3, 4, 5, 6, 7, 8};
  // StrategyLock: when true, lock lengths are drawn uniformly from
  // 1..depth instead of being exactly `depth`.
  bool mixed_lengths = false;

  // Throws InvalidSpec. `n_max` bounds the lock length (depth <= n_max - 1).
  void validate(int n_max) const;
  std::string label() const;
};

// Presets: "ChainArithmetic", "StrategyLock" (ids 1..8), "StrategyLock-A"
// (ids 1..4) and "StrategyLock-B" (ids 5..8), optionally with ":depth".
TaskSpec parse_task(const std::string& text);

// Deterministic in (task, seed). Question ids are id_base .. id_base+count-1.
std::vector<Question> generate_questions(const TaskSpec& task, std::uint64_t seed,
                                         std::size_t count, const Vocab& vocab,
                                         std::int64_t id_base = 0);

// Left-to-right fold of a ChainArithmetic prompt with a non-negative
// mod-`modulus` reduction after every operation.
int chain_fold(const TokenSeq& prompt, const Vocab& vocab, int modulus = 10);

bool verify(const Question& q, const std::optional<TokenSeq>& answer);

// n >= 1, every step ends with SEP and fits in l_max tokens, and the trace
// holds exactly one ANS marker, located in the final step and followed by at
// least one token before SEP.
bool format_ok(const Rollout& rollout, const Vocab& vocab, int l_max);

// Plans (without the final Termination) equal the lock, the planner
// terminated, and every step is [marker, OK, ...] with the final step
// carrying ANS OK. Throws WrongTask for non-StrategyLock questions.
bool lock_accuracy(const Question& q, const Rollout& rollout, const Vocab& vocab);

// Step plans equal the lock sequence and the planner terminated right after.
bool plans_match_lock(const Question& q, const Rollout& rollout);

// The rule-based accuracy signal R_acc. ChainArithmetic: verify on the
// extracted answer. StrategyLock: the answer must be OK *and* the planner
// must have injected exactly the lock sequence before terminating.
bool judge(const Question& q, const Rollout& rollout);

// One JSON object per line: id, task, prompt, ground_truth, lock_sequence?.
void write_questions_jsonl(std::ostream& out, const std::vector<Question>& qs,
                           const Vocab& vocab);

}  // namespace rsim::env
