// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "rsim/core/types.hpp"
#include "rsim/core/vocab.hpp"

namespace rsim::test {

inline const Vocab& vocab() {
  static const Vocab v = Vocab::standard();
  return v;
}

inline Strategy S(int id) { return strategy_from_index(id); }

// A step under plan `id` whose tokens are the space-separated `text`.
inline Step step(int id, const std::string& text) {
  Step s;
  s.strategy = S(id);
  s.tokens = vocab().encode(text);
  s.old_token_logprobs.assign(s.tokens.size(), -1.0);
  s.old_plan_logprob = -1.0;
  return s;
}

// Rollout from steps; `final_plan` 0 means the planner terminated.
inline Rollout rollout(std::vector<Step> steps, int final_plan = 0) {
  Rollout r;
  r.steps = std::move(steps);
  r.final_plan = S(final_plan);
  r.final_plan_logprob = -1.0;
  r.terminated_by_planner = final_plan == 0;
  r.truncated = !r.terminated_by_planner;
  r.extracted_answer = extract_answer(r, vocab());
  return r;
}

inline Question lock_question(std::initializer_list<int> lock) {
  Question q;
  q.task = TaskKind::kStrategyLock;
  q.prompt_tokens.push_back(vocab().lock());
  for (int k : lock) {
    q.prompt_tokens.push_back(vocab().digit(k));
    q.lock_sequence.push_back(S(k));
  }
  q.ground_truth = {vocab().ok()};
  return q;
}

inline Question chain_question(const std::string& prompt, int answer) {
  Question q;
  q.task = TaskKind::kChainArithmetic;
  q.prompt_tokens = vocab().encode(prompt);
  q.ground_truth = {vocab().digit(answer)};
  return q;
}

}  // namespace rsim::test
