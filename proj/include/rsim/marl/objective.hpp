// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "rsim/core/types.hpp"
#include "rsim/model/fast_policy.hpp"
#include "rsim/model/policy.hpp"

namespace rsim::marl {

// G rollouts of one question with rewards and group-normalised advantages.
struct GroupBatch {
  Question question;
  std::vector<Rollout> rollouts;
  std::vector<RewardBreakdown> rewards;
  std::vector<double> planner_advantages;
  std::vector<double> reasoner_advantages;
};

GroupBatch make_group_batch(Question q, std::vector<Rollout> rollouts,
                            const Vocab& vocab, int l_max,
                            bool shared_accuracy = false);

// Non-negative per-token KL estimate r - log r - 1 with
// r = exp(logprob_reference - logprob_current).
double kl_token(double logprob_current, double logprob_reference);

// Log-probabilities of every plan (steps then the final plan) and every
// generated token of a rollout under some policy pair.
struct RolloutLogprobs {
  std::vector<double> plans;
  std::vector<std::vector<double>> tokens;
};

RolloutLogprobs behavior_logprobs(const Rollout& rollout);

struct TokenCredit {
  std::size_t step = 0;
  double planner_advantage = 0.0;
  double planner_ratio = 1.0;
  double reasoner_advantage = 0.0;
  double reasoner_ratio = 1.0;
};

// One entry per generated token. Every token of step i carries the rollout's
// planner advantage with the ratio of plan i, and the rollout's reasoner
// advantage with its own token ratio. Throws StaleRollout when behaviour
// log-probabilities are missing.
std::vector<TokenCredit> token_advantages(const Rollout& rollout,
                                          double planner_advantage,
                                          double reasoner_advantage,
                                          const RolloutLogprobs& current);

struct ObjectiveConfig {
  double lambda = 0.7;
  double beta = 0.04;
  double clip_eps = 0.2;
  double temperature = 0.9;  // policy temperature the rollouts were drawn at
};

struct JointLossResult {
  double loss = 0.0;                // minimised: -(surrogate - beta * KL)
  double surrogate_planner = 0.0;   // lambda-weighted, token averaged
  double surrogate_reasoner = 0.0;  // (1 - lambda)-weighted, token averaged
  double kl_planner = 0.0;          // mean per-position KL to the reference
  double kl_reasoner = 0.0;
  double clip_fraction = 0.0;       // share of positions with a clipped term
  model::Gradients planner_grads;
  model::Gradients reasoner_grads;
};

// Token-averaged two-agent surrogate for every rollout of every group:
//   J_j = 1/|o_j| sum_t [ lambda * (min(r^p A^p, clip(r^p) A^p) - beta kl^p)
//                       + (1-lambda) * (min(r A, clip(r) A) - beta kl) ]
// averaged over rollouts and groups. Positions are the generated tokens plus
// one slot for the final plan, which carries only the planner term. A null
// reference means "identical to the current policy". Terms whose weight is
// zero are skipped, so their gradients are exactly zero.
JointLossResult joint_loss_and_grads(std::span<const GroupBatch> groups,
                                     const model::PolicyParams& planner,
                                     const model::PolicyParams& reasoner,
                                     const model::PolicyParams* planner_ref,
                                     const model::PolicyParams* reasoner_ref,
                                     const ObjectiveConfig& cfg, const Vocab& vocab,
                                     int threads = 1);

// Same, on prebuilt fast views (the training loop builds them once per update).
JointLossResult joint_loss_and_grads(std::span<const GroupBatch> groups,
                                     const model::FastPolicy& planner,
                                     const model::FastPolicy& reasoner,
                                     const model::FastPolicy* planner_ref,
                                     const model::FastPolicy* reasoner_ref,
                                     const ObjectiveConfig& cfg, const Vocab& vocab,
                                     int threads = 1);

}  // namespace rsim::marl
