// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/marl/sampler.hpp"

#include <cmath>

#include "rsim/core/error.hpp"
#include "rsim/model/sampling.hpp"

namespace rsim::marl {

model::Sample sample_plan(const PlannerSource& planner,
                          std::span<const TokenId> context, double temperature,
                          Rng& rng) {
  std::optional<int> excluded;
  if (planner.mask) excluded = to_index(*planner.mask);
  if (planner.uniform) {
    const int choices = kNumStrategies - (excluded ? 1 : 0);
    int idx = static_cast<int>(rng.below(static_cast<std::uint64_t>(choices)));
    if (excluded && idx >= *excluded) ++idx;
    return {idx, -std::log(static_cast<double>(choices))};
  }
  if (planner.policy == nullptr) {
    throw Error(ErrorCode::kInvalidSpec, "planner source has no policy");
  }
  const auto logits = planner.policy->logits(context);
  return model::sample_categorical(logits, temperature, rng, excluded);
}

Rollout sample_rollout(const Question& q, const PlannerSource& planner,
                       const model::FastPolicy& reasoner, const Vocab& vocab,
                       const SamplingConfig& cfg, Rng& rng) {
  if (cfg.n_max < 1 || cfg.l_max < 1) {
    throw Error(ErrorCode::kInvalidSpec, "n_max and l_max must be >= 1");
  }
  Rollout r;
  r.question_id = q.id;
  TokenSeq ctx = trace_context(q, {}, vocab);
  model::FastPolicy::Acts acts;

  model::Sample plan = sample_plan(planner, ctx, cfg.planner_temperature, rng);
  while (plan.index != to_index(Strategy::kTermination) &&
         static_cast<int>(r.steps.size()) < cfg.n_max) {
    Step step;
    step.strategy = strategy_from_index(plan.index);
    step.old_plan_logprob = plan.logprob;
    ctx.push_back(*vocab.marker(step.strategy));
    for (int t = 0; t < cfg.l_max; ++t) {
      reasoner.forward(ctx, acts);
      const auto tok = model::sample_categorical(acts.logits, cfg.reasoner_temperature, rng);
      step.tokens.push_back(static_cast<TokenId>(tok.index));
      step.old_token_logprobs.push_back(tok.logprob);
      ctx.push_back(static_cast<TokenId>(tok.index));
      if (tok.index == vocab.sep()) break;
    }
    r.steps.push_back(std::move(step));
    plan = sample_plan(planner, ctx, cfg.planner_temperature, rng);
  }
  r.final_plan = strategy_from_index(plan.index);
  r.final_plan_logprob = plan.logprob;
  r.terminated_by_planner = r.final_plan == Strategy::kTermination;
  r.truncated = !r.terminated_by_planner;
  r.extracted_answer = extract_answer(r, vocab);
  return r;
}

std::vector<Rollout> interactive_sample(const Question& q,
                                        const PlannerSource& planner,
                                        const model::FastPolicy& reasoner,
                                        const Vocab& vocab,
                                        const SamplingConfig& cfg) {
  if (cfg.group_size < 1) {
    throw Error(ErrorCode::kInvalidSpec, "group size must be >= 1");
  }
  std::vector<Rollout> out;
  out.reserve(static_cast<std::size_t>(cfg.group_size));
  for (int g = 0; g < cfg.group_size; ++g) {
    Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(q.id),
                                   static_cast<std::uint64_t>(g)}));
    out.push_back(sample_rollout(q, planner, reasoner, vocab, cfg, rng));
  }
  return out;
}

}  // namespace rsim::marl
