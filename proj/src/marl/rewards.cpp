// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/marl/rewards.hpp"

#include <array>
#include <cmath>

#include "rsim/core/error.hpp"
#include "rsim/env/tasks.hpp"

namespace rsim::marl {

PlannerReward planner_reward(const Rollout& rollout, bool correct) {
  const auto plans = rollout.plans();
  std::array<int, kNumStrategies> counts{};
  int modal = 0;
  for (auto p : plans) modal = std::max(modal, ++counts[to_index(p)]);
  PlannerReward r;
  r.r_acc = correct ? 1.0 : 0.0;
  r.r_terminal = rollout.terminated_by_planner ? 1.0 : -1.0;
  r.r_penalty = -static_cast<double>(modal) / static_cast<double>(plans.size());
  return r;
}

bool step_follows_plan(const Step& step, const Vocab& vocab) {
  if (step.tokens.empty()) return false;
  const TokenId first = step.tokens.front();
  if (step.strategy == Strategy::kContinuation) return !vocab.is_marker(first);
  const auto marker = vocab.marker(step.strategy);
  return marker.has_value() && first == *marker;
}

ReasonerReward reasoner_reward(const Rollout& rollout, bool correct,
                               bool format_ok, const Vocab& vocab) {
  ReasonerReward r;
  r.r_acc = correct ? 1.0 : 0.0;
  r.r_format = format_ok ? 1.0 : 0.0;
  if (!rollout.steps.empty()) {
    std::size_t follow = 0;
    for (const auto& s : rollout.steps) follow += step_follows_plan(s, vocab) ? 1 : 0;
    r.r_follow = static_cast<double>(follow) / static_cast<double>(rollout.steps.size());
  }
  return r;
}

RewardBreakdown combine(const PlannerReward& p, const ReasonerReward& r) {
  RewardBreakdown b;
  b.r_acc = p.r_acc;
  b.r_format = r.r_format;
  b.r_follow = r.r_follow;
  b.r_terminal = p.r_terminal;
  b.r_penalty = p.r_penalty;
  b.planner_total = p.r_acc + p.r_terminal + p.r_penalty;
  b.reasoner_total = r.r_acc + r.r_format + r.r_follow;
  return b;
}

RewardBreakdown compute_rewards(const Question& q, const Rollout& rollout,
                                const Vocab& vocab, int l_max,
                                bool shared_accuracy) {
  const bool correct = env::judge(q, rollout);
  const bool answered =
      shared_accuracy ? correct : env::verify(q, rollout.extracted_answer);
  const bool formatted = env::format_ok(rollout, vocab, l_max);
  return combine(planner_reward(rollout, correct),
                 reasoner_reward(rollout, answered, formatted, vocab));
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) {
    throw Error(ErrorCode::kGroupTooSmall, "group advantages need G >= 2");
  }
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> out(rewards.size(), 0.0);
  if (sd < 1e-12) return out;
  for (std::size_t j = 0; j < rewards.size(); ++j) out[j] = (rewards[j] - mean) / sd;
  return out;
}

}  // namespace rsim::marl
