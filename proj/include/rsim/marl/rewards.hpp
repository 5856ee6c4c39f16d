// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "rsim/core/types.hpp"

namespace rsim::marl {

struct PlannerReward {
  double r_acc = 0.0;
  double r_terminal = 0.0;
  double r_penalty = 0.0;
};

struct ReasonerReward {
  double r_acc = 0.0;
  double r_format = 0.0;
  double r_follow = 0.0;
};

// r_terminal = +1 iff the planner terminated; r_penalty = -(count of the
// most frequent plan / number of plans), counting every selected plan
// including the final one.
PlannerReward planner_reward(const Rollout& rollout, bool correct);

// r_follow = fraction of steps that follow their plan (0 for an empty trace).
ReasonerReward reasoner_reward(const Rollout& rollout, bool correct,
                               bool format_ok, const Vocab& vocab);

// A step follows a Continuation plan iff it does not open with a strategy
// marker, and any other plan iff it opens with that plan's marker.
bool step_follows_plan(const Step& step, const Vocab& vocab);

RewardBreakdown combine(const PlannerReward& p, const ReasonerReward& r);

// Judge, format check and both reward heads for one rollout. The planner is
// credited by the task judge; the reasoner by answer exact-match unless
// shared_accuracy, in which case it gets the judge verdict too.
RewardBreakdown compute_rewards(const Question& q, const Rollout& rollout,
                                const Vocab& vocab, int l_max,
                                bool shared_accuracy = false);

// (R_j - mean) / population std; all zeros when std < 1e-12.
// Throws GroupTooSmall for fewer than two rewards.
std::vector<double> group_advantages(std::span<const double> rewards);

}  // namespace rsim::marl
