// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "rsim/core/types.hpp"
#include "rsim/marl/sampler.hpp"
#include "rsim/model/policy.hpp"

namespace rsim::marl {

struct EvalConfig {
  double planner_temperature = 0.0;
  double reasoner_temperature = 0.3;
  int n_max = 8;
  int l_max = 16;
  std::uint64_t seed = 0;
  std::optional<Strategy> mask;
  int threads = 1;
};

struct EvalReport {
  std::size_t questions = 0;
  double accuracy = 0.0;                 // pass@1 via the task judge
  double mean_strategies = 0.0;          // injected plans minus Continuation
  double mean_steps = 0.0;
  double mean_trace_tokens = 0.0;
  double plan_accuracy = 0.0;            // StrategyLock: exact plan sequence
  double lock_accuracy = 0.0;            // StrategyLock: plans and step shape
  double terminal_rate = 0.0;
};

// One rollout per question with a greedy planner (masked strategy falls back
// to the second-best action) and a sampled reasoner. Throws EmptyEvalSet and
// VocabMismatch.
EvalReport evaluate(const PlannerSource& planner, const model::PolicyParams& reasoner,
                    std::span<const Question> questions, const Vocab& vocab,
                    const EvalConfig& cfg);

}  // namespace rsim::marl
