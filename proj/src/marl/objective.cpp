// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/marl/objective.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rsim/core/error.hpp"
#include "rsim/core/parallel.hpp"
#include "rsim/marl/rewards.hpp"
#include "rsim/model/sampling.hpp"

namespace rsim::marl {

GroupBatch make_group_batch(Question q, std::vector<Rollout> rollouts,
                            const Vocab& vocab, int l_max,
                            bool shared_accuracy) {
  GroupBatch g;
  g.rewards.reserve(rollouts.size());
  std::vector<double> rp, rr;
  for (const auto& r : rollouts) {
    g.rewards.push_back(compute_rewards(q, r, vocab, l_max, shared_accuracy));
    rp.push_back(g.rewards.back().planner_total);
    rr.push_back(g.rewards.back().reasoner_total);
  }
  g.planner_advantages = group_advantages(rp);
  g.reasoner_advantages = group_advantages(rr);
  g.question = std::move(q);
  g.rollouts = std::move(rollouts);
  return g;
}

double kl_token(double logprob_current, double logprob_reference) {
  const double log_r = logprob_reference - logprob_current;
  return std::exp(log_r) - log_r - 1.0;
}

namespace {

void check_behavior(const Rollout& r) {
  for (const auto& s : r.steps) {
    if (s.old_token_logprobs.size() != s.tokens.size()) {
      throw Error(ErrorCode::kStaleRollout,
                  "rollout lacks behaviour log-probabilities for its tokens");
    }
    for (double lp : s.old_token_logprobs) {
      if (!std::isfinite(lp) || lp > 0.0) {
        throw Error(ErrorCode::kStaleRollout, "invalid behaviour log-probability");
      }
    }
    if (!std::isfinite(s.old_plan_logprob)) {
      throw Error(ErrorCode::kStaleRollout, "missing behaviour plan log-probability");
    }
  }
  if (!std::isfinite(r.final_plan_logprob)) {
    throw Error(ErrorCode::kStaleRollout, "missing final plan log-probability");
  }
}

struct Clipped {
  double value;
  double dvalue;  // d value / d log pi
  bool clipped;
};

// min(rho A, clip(rho, 1-eps, 1+eps) A) and its derivative in log pi.
Clipped clipped_surrogate(double log_ratio, double adv, double eps) {
  const double rho = std::exp(log_ratio);
  const double plain = rho * adv;
  const double bounded = std::clamp(rho, 1.0 - eps, 1.0 + eps) * adv;
  if (plain <= bounded) return {plain, plain, false};
  return {bounded, 0.0, true};
}

struct PartialLoss {
  double objective = 0.0;
  double surr_p = 0.0, surr_r = 0.0;
  double kl_p = 0.0, kl_r = 0.0;
  double positions_p = 0.0, positions_r = 0.0;
  double clipped = 0.0, positions = 0.0;
};

// Accumulates one rollout's contribution, already scaled by `scale`.
void rollout_loss(const Question& q, const Rollout& r, double adv_p, double adv_r,
                  double scale, const model::FastPolicy& planner,
                  const model::FastPolicy& reasoner, const model::FastPolicy* planner_ref,
                  const model::FastPolicy* reasoner_ref, const ObjectiveConfig& cfg,
                  const Vocab& vocab, model::FastGradients& g_planner,
                  model::FastGradients& g_reasoner, PartialLoss& out) {
  check_behavior(r);
  const bool planner_on = cfg.lambda != 0.0;
  const bool reasoner_on = cfg.lambda != 1.0;
  const double w_p = cfg.lambda;
  const double w_r = 1.0 - cfg.lambda;
  const double tau = cfg.temperature;
  const double per_pos = scale / static_cast<double>(r.token_count() + 1);

  model::FastPolicy::Acts acts, ref_acts;
  auto ref_logprob = [&](const model::FastPolicy* ref, std::span<const TokenId> ctx,
                         int target, double current) {
    if (ref == nullptr) return current;
    ref->forward(ctx, ref_acts);
    return model::log_softmax(ref_acts.logits, tau)[target];
  };

  TokenSeq ctx = trace_context(q, {}, vocab);
  const std::size_t n = r.steps.size();
  for (std::size_t i = 0; i <= n; ++i) {
    const bool final_plan = i == n;
    const int plan = to_index(final_plan ? r.final_plan : r.steps[i].strategy);
    const double old_lp = final_plan ? r.final_plan_logprob : r.steps[i].old_plan_logprob;
    const double mult = final_plan ? 1.0 : static_cast<double>(r.steps[i].tokens.size());

    if (planner_on) {
      planner.forward(ctx, acts);
      const double lp = model::log_softmax(acts.logits, tau)[plan];
      const double lp_ref = ref_logprob(planner_ref, ctx, plan, lp);
      const auto s = clipped_surrogate(lp - old_lp, adv_p, cfg.clip_eps);
      const double kl = kl_token(lp, lp_ref);
      const double dkl = 1.0 - std::exp(lp_ref - lp);
      out.objective += per_pos * mult * w_p * (s.value - cfg.beta * kl);
      out.surr_p += per_pos * mult * w_p * s.value;
      out.kl_p += mult * kl;
      out.positions_p += mult;
      out.clipped += s.clipped ? mult : 0.0;
      out.positions += mult;
      const double upstream = -per_pos * mult * w_p * (s.dvalue - cfg.beta * dkl);
      g_planner.accumulate(planner, acts, plan, upstream, tau);
    }
    if (final_plan) break;

    const Step& step = r.steps[i];
    ctx.push_back(*vocab.marker(step.strategy));
    for (std::size_t t = 0; t < step.tokens.size(); ++t) {
      const int tok = step.tokens[t];
      if (reasoner_on) {
        reasoner.forward(ctx, acts);
        const double lp = model::log_softmax(acts.logits, tau)[tok];
        const double lp_ref = ref_logprob(reasoner_ref, ctx, tok, lp);
        const auto s = clipped_surrogate(lp - step.old_token_logprobs[t], adv_r, cfg.clip_eps);
        const double kl = kl_token(lp, lp_ref);
        const double dkl = 1.0 - std::exp(lp_ref - lp);
        out.objective += per_pos * w_r * (s.value - cfg.beta * kl);
        out.surr_r += per_pos * w_r * s.value;
        out.kl_r += kl;
        out.positions_r += 1.0;
        out.clipped += s.clipped ? 1.0 : 0.0;
        out.positions += 1.0;
        const double upstream = -per_pos * w_r * (s.dvalue - cfg.beta * dkl);
        g_reasoner.accumulate(reasoner, acts, tok, upstream, tau);
      }
      ctx.push_back(tok);
    }
  }
}

}  // namespace

RolloutLogprobs behavior_logprobs(const Rollout& rollout) {
  RolloutLogprobs lp;
  for (const auto& s : rollout.steps) {
    lp.plans.push_back(s.old_plan_logprob);
    lp.tokens.push_back(s.old_token_logprobs);
  }
  lp.plans.push_back(rollout.final_plan_logprob);
  return lp;
}

std::vector<TokenCredit> token_advantages(const Rollout& rollout,
                                          double planner_advantage,
                                          double reasoner_advantage,
                                          const RolloutLogprobs& current) {
  check_behavior(rollout);
  if (current.plans.size() != rollout.steps.size() + 1 ||
      current.tokens.size() != rollout.steps.size()) {
    throw Error(ErrorCode::kShapeMismatch, "log-probabilities do not match rollout");
  }
  std::vector<TokenCredit> out;
  for (std::size_t i = 0; i < rollout.steps.size(); ++i) {
    const Step& s = rollout.steps[i];
    if (current.tokens[i].size() != s.tokens.size()) {
      throw Error(ErrorCode::kShapeMismatch, "token log-probabilities do not match step");
    }
    const double plan_ratio = std::exp(current.plans[i] - s.old_plan_logprob);
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
      out.push_back({i, planner_advantage, plan_ratio, reasoner_advantage,
                     std::exp(current.tokens[i][t] - s.old_token_logprobs[t])});
    }
  }
  return out;
}

JointLossResult joint_loss_and_grads(std::span<const GroupBatch> groups,
                                     const model::FastPolicy& planner,
                                     const model::FastPolicy& reasoner,
                                     const model::FastPolicy* planner_ref,
                                     const model::FastPolicy* reasoner_ref,
                                     const ObjectiveConfig& cfg, const Vocab& vocab,
                                     int threads) {
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0) || !(cfg.clip_eps > 0.0) ||
      !(cfg.temperature > 0.0)) {
    throw Error(ErrorCode::kConfigError, "invalid objective configuration");
  }
  JointLossResult result{0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                         planner.params().zeros_like(), reasoner.params().zeros_like()};
  if (groups.empty()) return result;

  struct GroupOut {
    model::FastGradients gp, gr;
    PartialLoss loss;
  };
  std::vector<GroupOut> parts;
  parts.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    parts.push_back({model::FastGradients(planner), model::FastGradients(reasoner), {}});
  }
  const double n_groups = static_cast<double>(groups.size());

  parallel_for(groups.size(), threads, [&](std::size_t gi) {
    const GroupBatch& g = groups[gi];
    const std::size_t G = g.rollouts.size();
    if (g.planner_advantages.size() != G || g.reasoner_advantages.size() != G) {
      throw Error(ErrorCode::kShapeMismatch, "group advantages do not match rollouts");
    }
    const double scale = 1.0 / (n_groups * static_cast<double>(G));
    for (std::size_t j = 0; j < G; ++j) {
      rollout_loss(g.question, g.rollouts[j], g.planner_advantages[j],
                   g.reasoner_advantages[j], scale, planner, reasoner, planner_ref,
                   reasoner_ref, cfg, vocab, parts[gi].gp, parts[gi].gr, parts[gi].loss);
    }
  });

  // Reduce in group order so the result is independent of scheduling.
  PartialLoss total;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    parts[0].gp.add(parts[i].gp);
    parts[0].gr.add(parts[i].gr);
  }
  result.planner_grads = parts[0].gp.finalize(planner);
  result.reasoner_grads = parts[0].gr.finalize(reasoner);
  for (auto& p : parts) {
    total.objective += p.loss.objective;
    total.surr_p += p.loss.surr_p;
    total.surr_r += p.loss.surr_r;
    total.kl_p += p.loss.kl_p;
    total.kl_r += p.loss.kl_r;
    total.positions_p += p.loss.positions_p;
    total.positions_r += p.loss.positions_r;
    total.clipped += p.loss.clipped;
    total.positions += p.loss.positions;
  }
  result.loss = -total.objective;
  result.surrogate_planner = total.surr_p;
  result.surrogate_reasoner = total.surr_r;
  result.kl_planner = total.positions_p > 0 ? total.kl_p / total.positions_p : 0.0;
  result.kl_reasoner = total.positions_r > 0 ? total.kl_r / total.positions_r : 0.0;
  result.clip_fraction = total.positions > 0 ? total.clipped / total.positions : 0.0;
  return result;
}

JointLossResult joint_loss_and_grads(std::span<const GroupBatch> groups,
                                     const model::PolicyParams& planner,
                                     const model::PolicyParams& reasoner,
                                     const model::PolicyParams* planner_ref,
                                     const model::PolicyParams* reasoner_ref,
                                     const ObjectiveConfig& cfg, const Vocab& vocab,
                                     int threads) {
  const model::FastPolicy fp(planner), fr(reasoner);
  std::optional<model::FastPolicy> fp_ref, fr_ref;
  if (planner_ref) fp_ref.emplace(*planner_ref);
  if (reasoner_ref) fr_ref.emplace(*reasoner_ref);
  return joint_loss_and_grads(groups, fp, fr, fp_ref ? &*fp_ref : nullptr,
                              fr_ref ? &*fr_ref : nullptr, cfg, vocab, threads);
}

}  // namespace rsim::marl
