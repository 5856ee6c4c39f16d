// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/marl/trainer.hpp"

#include <cmath>

#include "rsim/core/error.hpp"
#include "rsim/core/parallel.hpp"
#include "rsim/core/rng.hpp"
#include "rsim/marl/objective.hpp"
#include "rsim/marl/sampler.hpp"
#include "rsim/model/optim.hpp"

namespace rsim::marl {

namespace {

// Sub-stream tags for derive_seed.
constexpr std::uint64_t kQuestionStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr std::uint64_t kWarmupStream = 5;

void check_compatible(const model::PolicyParams& planner,
                      const model::PolicyParams& reasoner, const Vocab& vocab) {
  const auto V = static_cast<int>(vocab.size());
  if (planner.spec().vocab_size != V || reasoner.spec().vocab_size != V ||
      reasoner.spec().output_arity != V || planner.spec().output_arity != kNumStrategies) {
    throw Error(ErrorCode::kVocabMismatch, "policy shapes do not match the vocabulary");
  }
}

}  // namespace

nlohmann::ordered_json to_json(const UpdateMetrics& m) {
  nlohmann::ordered_json j;
  j["update"] = m.update;
  j["epoch"] = m.epoch;
  j["stage"] = m.stage;
  j["lambda"] = m.lambda;
  j["lr"] = m.lr;
  j["mean_planner_reward"] = m.mean_planner_reward;
  j["mean_reasoner_reward"] = m.mean_reasoner_reward;
  j["mean_r_acc"] = m.mean_r_acc;
  j["mean_r_follow"] = m.mean_r_follow;
  j["mean_r_penalty"] = m.mean_r_penalty;
  j["terminal_rate"] = m.terminal_rate;
  j["kl_planner"] = m.kl_planner;
  j["kl_reasoner"] = m.kl_reasoner;
  j["loss"] = m.loss;
  if (m.eval_accuracy) j["eval_accuracy"] = *m.eval_accuracy;
  if (m.mean_strategies_per_question) {
    j["mean_strategies_per_question"] = *m.mean_strategies_per_question;
  }
  return j;
}

double lambda_for_update(const RunConfig& run, std::int64_t completed_updates) {
  return completed_updates < run.stage_boundary ? run.lambda_stage1 : run.lambda_stage2;
}

std::vector<Question> eval_questions(const TrainOptions& opts, const Vocab& vocab) {
  return env::generate_questions(opts.task, opts.eval_seed, opts.eval_questions, vocab,
                                 -static_cast<std::int64_t>(opts.eval_questions));
}

EvalConfig eval_config(const RunConfig& run, std::uint64_t seed) {
  EvalConfig ec;
  ec.planner_temperature = run.temp_eval_planner;
  ec.reasoner_temperature = run.temp_eval_reasoner;
  ec.n_max = run.n_max;
  ec.l_max = run.l_max;
  ec.seed = seed;
  ec.threads = run.threads;
  return ec;
}

TrainResult train(const TrainOptions& opts, model::PolicyParams planner,
                  model::PolicyParams reasoner, const Vocab& vocab,
                  const TrainCallbacks& callbacks) {
  const RunConfig& run = opts.run;
  run.validate();
  opts.task.validate(run.n_max);
  if (opts.eval_every < 0) throw Error(ErrorCode::kConfigError, "eval_every must be >= 0");
  check_compatible(planner, reasoner, vocab);

  const bool planner_trainable = !opts.random_planner && !opts.freeze_planner;
  const bool reasoner_trainable = !opts.freeze_reasoner;
  if (reasoner_trainable && opts.warmup.updates > 0) {
    FormatWarmupConfig wc = opts.warmup;
    wc.seed = derive_seed(run.seed, {kWarmupStream});
    format_warmup(reasoner, opts.task, run, wc, vocab);
  }
  model::OptimizerState opt_planner(planner);
  model::OptimizerState opt_reasoner(reasoner);

  std::vector<Question> held_out;
  if (opts.eval_questions > 0) held_out = eval_questions(opts, vocab);
  auto source = [&]() {
    return opts.random_planner ? PlannerSource::random() : PlannerSource::from(planner);
  };
  auto run_eval = [&]() {
    return evaluate(source(), reasoner, held_out, vocab, eval_config(run, opts.eval_seed));
  };

  TrainResult result{planner, reasoner, 0, {}, std::nullopt};
  const std::int64_t total = run.total_updates();
  const auto batch = static_cast<std::size_t>(run.batch_questions);
  std::int64_t done = 0;

  for (int epoch = 1; epoch <= run.epochs; ++epoch) {
    const model::FastPolicy planner_ref(planner);
    const model::FastPolicy reasoner_ref(reasoner);

    for (int step = 0; step < run.steps_per_epoch; ++step) {
      const auto u = static_cast<std::uint64_t>(done);
      UpdateMetrics m;
      m.update = done + 1;
      m.epoch = epoch;
      m.lambda = lambda_for_update(run, done);
      m.stage = done < run.stage_boundary ? 1 : 2;
      m.lr = model::cosine_lr(done, total, run.lr_max, run.lr_min);

      const auto questions = env::generate_questions(
          opts.task, derive_seed(run.seed, {kQuestionStream, u}), batch, vocab,
          static_cast<std::int64_t>(u * batch));

      SamplingConfig sc;
      sc.group_size = run.group_size;
      sc.planner_temperature = run.temp_train;
      sc.reasoner_temperature = run.temp_train;
      sc.n_max = run.n_max;
      sc.l_max = run.l_max;
      sc.seed = derive_seed(run.seed, {kSampleStream, u});

      const auto fast_planner = std::make_shared<const model::FastPolicy>(planner);
      const model::FastPolicy fast_reasoner(reasoner);
      const PlannerSource src = opts.random_planner ? PlannerSource::random()
                                                    : PlannerSource::from(fast_planner);
      std::vector<GroupBatch> groups(batch);
      parallel_for(batch, run.threads, [&](std::size_t i) {
        auto rollouts = interactive_sample(questions[i], src, fast_reasoner, vocab, sc);
        groups[i] = make_group_batch(questions[i], std::move(rollouts), vocab, run.l_max,
                                     run.shared_accuracy);
      });

      double n_rollouts = 0.0;
      for (const auto& g : groups) {
        for (std::size_t j = 0; j < g.rollouts.size(); ++j) {
          const auto& rw = g.rewards[j];
          m.mean_planner_reward += rw.planner_total;
          m.mean_reasoner_reward += rw.reasoner_total;
          m.mean_r_acc += rw.r_acc;
          m.mean_r_follow += rw.r_follow;
          m.mean_r_penalty += rw.r_penalty;
          m.terminal_rate += g.rollouts[j].terminated_by_planner ? 1.0 : 0.0;
          n_rollouts += 1.0;
        }
      }
      m.mean_planner_reward /= n_rollouts;
      m.mean_reasoner_reward /= n_rollouts;
      m.mean_r_acc /= n_rollouts;
      m.mean_r_follow /= n_rollouts;
      m.mean_r_penalty /= n_rollouts;
      m.terminal_rate /= n_rollouts;

      ObjectiveConfig oc;
      oc.lambda = m.lambda;
      if (!planner_trainable) oc.lambda = 0.0;
      if (!reasoner_trainable) oc.lambda = planner_trainable ? 1.0 : m.lambda;
      oc.beta = run.beta_kl;
      oc.clip_eps = run.clip_eps;
      oc.temperature = run.temp_train > 0.0 ? run.temp_train : 1.0;

      model::Gradients g_planner = planner.zeros_like();
      model::Gradients g_reasoner = reasoner.zeros_like();
      const auto accum = static_cast<std::size_t>(run.grad_accum);
      for (std::size_t c = 0; c < accum; ++c) {
        const std::size_t lo = c * batch / accum;
        const std::size_t hi = (c + 1) * batch / accum;
        if (lo == hi) continue;
        const double w = static_cast<double>(hi - lo) / static_cast<double>(batch);
        auto part = joint_loss_and_grads(
            std::span<const GroupBatch>(groups).subspan(lo, hi - lo), *fast_planner,
            fast_reasoner, &planner_ref, &reasoner_ref, oc, vocab, run.threads);
        g_planner.add(part.planner_grads, w);
        g_reasoner.add(part.reasoner_grads, w);
        m.loss += w * part.loss;
        m.kl_planner += w * part.kl_planner;
        m.kl_reasoner += w * part.kl_reasoner;
      }
      if (!std::isfinite(m.loss)) {
        throw Error(ErrorCode::kNumericError,
                    "non-finite loss at update " + std::to_string(m.update));
      }
      // The weight a stage gives each agent, after freezing is applied.
      if (planner_trainable && oc.lambda != 0.0) {
        model::adamw_step(planner, g_planner, opt_planner, m.lr);
      }
      if (reasoner_trainable && oc.lambda != 1.0) {
        model::adamw_step(reasoner, g_reasoner, opt_reasoner, m.lr);
      }
      ++done;

      const bool last = done == total;
      if (!held_out.empty() &&
          ((opts.eval_every > 0 && done % opts.eval_every == 0) || last)) {
        const auto rep = run_eval();
        m.eval_accuracy = rep.accuracy;
        m.mean_strategies_per_question = rep.mean_strategies;
        if (last) result.final_eval = rep;
      }
      result.metrics.push_back(m);
      if (callbacks.on_update) callbacks.on_update(m);
    }
    if (callbacks.on_epoch) callbacks.on_epoch(epoch, planner, reasoner, done);
  }
  if (!result.final_eval && !held_out.empty()) result.final_eval = run_eval();

  result.planner = std::move(planner);
  result.reasoner = std::move(reasoner);
  result.updates = done;
  return result;
}

PluginReport plugin_eval(const model::PolicyParams& planner,
                         const model::PolicyParams& reasoner,
                         std::span<const Question> questions, const Vocab& vocab,
                         const EvalConfig& cfg) {
  const model::PolicyParams before = planner;
  PlannerSource src = PlannerSource::from(planner);
  src.mask = cfg.mask;
  PluginReport out;
  out.report = evaluate(src, reasoner, questions, vocab, cfg);
  out.planner_unchanged = before == planner;
  return out;
}

ContinueReport continue_train(const TrainOptions& opts, const env::TaskSpec& original,
                              model::PolicyParams planner, model::PolicyParams reasoner,
                              const Vocab& vocab, const TrainCallbacks& callbacks) {
  TrainOptions orig_opts = opts;
  orig_opts.task = original;
  const auto new_qs = eval_questions(opts, vocab);
  const auto orig_qs = eval_questions(orig_opts, vocab);
  const auto ec = eval_config(opts.run, opts.eval_seed);

  const auto new_before = evaluate(PlannerSource::from(planner), reasoner, new_qs, vocab, ec);
  const auto orig_before = evaluate(PlannerSource::from(planner), reasoner, orig_qs, vocab, ec);
  auto res = train(opts, std::move(planner), std::move(reasoner), vocab, callbacks);
  const auto trained = PlannerSource::from(res.planner);
  const auto new_after = evaluate(trained, res.reasoner, new_qs, vocab, ec);
  const auto orig_after = evaluate(trained, res.reasoner, orig_qs, vocab, ec);
  ContinueReport rep{new_before, new_after, orig_before, orig_after, std::move(res)};
  return rep;
}

}  // namespace rsim::marl
