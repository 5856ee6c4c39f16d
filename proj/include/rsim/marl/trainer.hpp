// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "rsim/core/types.hpp"
#include "rsim/env/tasks.hpp"
#include "rsim/marl/evaluate.hpp"
#include "rsim/marl/warmup.hpp"
#include "rsim/model/policy.hpp"

namespace rsim::marl {

struct TrainOptions {
  RunConfig run;
  env::TaskSpec task;
  // Held-out evaluation every `eval_every` updates (0 = only at the end).
  int eval_every = 0;
  std::size_t eval_questions = 50;
  std::uint64_t eval_seed = 1000003;
  // Strategy-free baseline: plans come from a uniform source and the
  // planner is never updated.
  bool random_planner = false;
  bool freeze_planner = false;
  bool freeze_reasoner = false;
  // Optional step-format warm-up of the reasoner before RL (off by default).
  FormatWarmupConfig warmup;
};

struct UpdateMetrics {
  std::int64_t update = 0;  // 1-based global update index
  int epoch = 0;            // 1-based
  int stage = 1;
  double lambda = 0.0;
  double lr = 0.0;
  double mean_planner_reward = 0.0;
  double mean_reasoner_reward = 0.0;
  double mean_r_acc = 0.0;
  double mean_r_follow = 0.0;
  double mean_r_penalty = 0.0;
  double terminal_rate = 0.0;
  double kl_planner = 0.0;
  double kl_reasoner = 0.0;
  double loss = 0.0;
  std::optional<double> eval_accuracy;
  std::optional<double> mean_strategies_per_question;
};

// One metrics record with the documented key order.
nlohmann::ordered_json to_json(const UpdateMetrics& m);

struct TrainCallbacks {
  std::function<void(const UpdateMetrics&)> on_update;
  // Called after every epoch with the current policies.
  std::function<void(int epoch, const model::PolicyParams& planner,
                     const model::PolicyParams& reasoner, std::int64_t updates)>
      on_epoch;
};

struct TrainResult {
  model::PolicyParams planner;
  model::PolicyParams reasoner;
  std::int64_t updates = 0;
  std::vector<UpdateMetrics> metrics;
  std::optional<EvalReport> final_eval;
};

// lambda_stage1 while `completed_updates` < N, lambda_stage2 afterwards.
double lambda_for_update(const RunConfig& run, std::int64_t completed_updates);

// Held-out questions used by the periodic evaluation.
std::vector<Question> eval_questions(const TrainOptions& opts, const Vocab& vocab);

EvalConfig eval_config(const RunConfig& run, std::uint64_t seed);

// Two-stage joint training. Each update samples `batch_questions` fresh
// questions, draws G rollouts per question, and accumulates the joint
// objective over `grad_accum` micro-batches before one AdamW step per
// agent. Agents whose objective weight is zero (or that are frozen) are not
// stepped at all. References are refreshed at the start of every epoch.
// Throws ConfigError for invalid options and NumericError on a non-finite
// loss.
TrainResult train(const TrainOptions& opts, model::PolicyParams planner,
                  model::PolicyParams reasoner, const Vocab& vocab,
                  const TrainCallbacks& callbacks = {});

struct PluginReport {
  EvalReport report;
  bool planner_unchanged = true;
};

// Frozen planner + given reasoner; no parameter updates.
PluginReport plugin_eval(const model::PolicyParams& planner,
                         const model::PolicyParams& reasoner,
                         std::span<const Question> questions, const Vocab& vocab,
                         const EvalConfig& cfg);

struct ContinueReport {
  EvalReport new_before, new_after;
  EvalReport original_before, original_after;
  double new_delta() const { return new_after.accuracy - new_before.accuracy; }
  double original_delta() const {
    return original_after.accuracy - original_before.accuracy;
  }
  TrainResult result;
};

// Resumes planner training (fresh optimiser state) on `opts.task` and
// evaluates both tasks before and after.
ContinueReport continue_train(const TrainOptions& opts, const env::TaskSpec& original,
                              model::PolicyParams planner, model::PolicyParams reasoner,
                              const Vocab& vocab, const TrainCallbacks& callbacks = {});

}  // namespace rsim::marl
