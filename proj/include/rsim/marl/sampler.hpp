// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "rsim/core/rng.hpp"
#include "rsim/core/types.hpp"
#include "rsim/model/fast_policy.hpp"
#include "rsim/model/policy.hpp"
#include "rsim/model/sampling.hpp"

namespace rsim::marl {

// Where plans come from: a planner policy, or a uniform draw over the nine
// strategies (the strategy-free baseline). `mask` forbids one strategy; the
// planner then falls back to its best remaining action.
struct PlannerSource {
  std::shared_ptr<const model::FastPolicy> policy;
  bool uniform = false;
  std::optional<Strategy> mask;

  static PlannerSource from(const model::PolicyParams& p) {
    return {std::make_shared<const model::FastPolicy>(p), false, {}};
  }
  static PlannerSource from(std::shared_ptr<const model::FastPolicy> p) {
    return {std::move(p), false, {}};
  }
  static PlannerSource random() { return {nullptr, true, {}}; }
};

struct SamplingConfig {
  int group_size = 16;
  double planner_temperature = 0.9;
  double reasoner_temperature = 0.9;
  int n_max = 8;
  int l_max = 16;
  std::uint64_t seed = 0;
};

// One plan decision given the planner context.
model::Sample sample_plan(const PlannerSource& planner,
                          std::span<const TokenId> context, double temperature,
                          Rng& rng);

// One interleaved rollout: plan, step, plan, step, ... until the planner
// picks Termination or n_max steps exist. Each step is decoded from the
// reasoner with the injected marker appended to (question || trace) until
// SEP or l_max tokens. A last plan is always sampled after the final step.
Rollout sample_rollout(const Question& q, const PlannerSource& planner,
                       const model::FastPolicy& reasoner, const Vocab& vocab,
                       const SamplingConfig& cfg, Rng& rng);

// G rollouts; rollout g draws from the stream (seed, question id, g).
std::vector<Rollout> interactive_sample(const Question& q,
                                        const PlannerSource& planner,
                                        const model::FastPolicy& reasoner,
                                        const Vocab& vocab,
                                        const SamplingConfig& cfg);

}  // namespace rsim::marl
