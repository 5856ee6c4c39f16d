// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/marl/evaluate.hpp"

#include <vector>

#include "rsim/analysis/strategy_count.hpp"
#include "rsim/core/error.hpp"
#include "rsim/core/parallel.hpp"
#include "rsim/env/tasks.hpp"

namespace rsim::marl {

EvalReport evaluate(const PlannerSource& planner, const model::PolicyParams& reasoner,
                    std::span<const Question> questions, const Vocab& vocab,
                    const EvalConfig& cfg) {
  if (questions.empty()) {
    throw Error(ErrorCode::kEmptyEvalSet, "evaluation needs at least one question");
  }
  const auto V = static_cast<int>(vocab.size());
  if (reasoner.spec().vocab_size != V || reasoner.spec().output_arity != V ||
      (planner.policy && planner.policy->spec().vocab_size != V)) {
    throw Error(ErrorCode::kVocabMismatch, "policy vocabulary does not match");
  }

  SamplingConfig sc;
  sc.group_size = 1;
  sc.planner_temperature = cfg.planner_temperature;
  sc.reasoner_temperature = cfg.reasoner_temperature;
  sc.n_max = cfg.n_max;
  sc.l_max = cfg.l_max;
  sc.seed = cfg.seed;

  PlannerSource source = planner;
  if (cfg.mask) source.mask = cfg.mask;
  const model::FastPolicy fast_reasoner(reasoner);
  std::vector<Rollout> rollouts(questions.size());
  parallel_for(questions.size(), cfg.threads, [&](std::size_t i) {
    rollouts[i] = interactive_sample(questions[i], source, fast_reasoner, vocab, sc).front();
  });

  EvalReport rep;
  rep.questions = questions.size();
  std::size_t lock_questions = 0;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& q = questions[i];
    const auto& r = rollouts[i];
    rep.accuracy += env::judge(q, r) ? 1.0 : 0.0;
    rep.mean_strategies += static_cast<double>(analysis::count_strategies_rollout(r));
    rep.mean_steps += static_cast<double>(r.steps.size());
    rep.mean_trace_tokens += static_cast<double>(r.token_count());
    rep.terminal_rate += r.terminated_by_planner ? 1.0 : 0.0;
    if (q.task == TaskKind::kStrategyLock) {
      ++lock_questions;
      rep.plan_accuracy += env::plans_match_lock(q, r) ? 1.0 : 0.0;
      rep.lock_accuracy += env::lock_accuracy(q, r, vocab) ? 1.0 : 0.0;
    }
  }
  const double n = static_cast<double>(questions.size());
  rep.accuracy /= n;
  rep.mean_strategies /= n;
  rep.mean_steps /= n;
  rep.mean_trace_tokens /= n;
  rep.terminal_rate /= n;
  if (lock_questions > 0) {
    rep.plan_accuracy /= static_cast<double>(lock_questions);
    rep.lock_accuracy /= static_cast<double>(lock_questions);
  }
  return rep;
}

}  // namespace rsim::marl
