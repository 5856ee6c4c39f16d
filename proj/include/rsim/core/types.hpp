// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsim/core/strategy.hpp"
#include "rsim/core/vocab.hpp"

namespace rsim {

enum class TaskKind { kChainArithmetic, kStrategyLock };

std::string_view task_kind_name(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);  // throws ConfigError

struct Question {
  std::int64_t id = 0;
  TaskKind task = TaskKind::kChainArithmetic;
  TokenSeq prompt_tokens;
  TokenSeq ground_truth;
  std::vector<Strategy> lock_sequence;  // StrategyLock only
};

// One reasoning step z_i generated under the injected plan p_i.
struct Step {
  Strategy strategy = Strategy::kContinuation;
  TokenSeq tokens;
  std::vector<double> old_token_logprobs;
  double old_plan_logprob = 0.0;
};

// Interleaved plan/step trace for one question. Every rollout ends with one
// more planner decision after its last step (`final_plan`): Termination
// when the planner stopped, anything else when the step cap cut it off.
struct Rollout {
  std::int64_t question_id = 0;
  std::vector<Step> steps;
  Strategy final_plan = Strategy::kTermination;
  double final_plan_logprob = 0.0;
  bool terminated_by_planner = true;
  bool truncated = false;
  std::optional<TokenSeq> extracted_answer;

  // Every plan the planner selected, in order: the step plans followed by
  // the final plan.
  std::vector<Strategy> plans() const;
  std::size_t token_count() const;
};

struct RewardBreakdown {
  double r_acc = 0.0;
  double r_format = 0.0;
  double r_follow = 0.0;
  double r_terminal = 0.0;
  double r_penalty = 0.0;
  double planner_total = 0.0;
  double reasoner_total = 0.0;
};

// Tokens strictly between the first ANS marker of the last step and the
// step's closing SEP (or the end of the step when it was cut at l_max).
// Absent when there are no steps or the last step has no ANS marker.
std::optional<TokenSeq> extract_answer(const Rollout& rollout,
                                       const Vocab& vocab);

// Context the reasoner and planner see: BOS, the prompt, then for every
// completed step its injected marker followed by its generated tokens.
TokenSeq trace_context(const Question& q, const std::vector<Step>& steps,
                       const Vocab& vocab);

struct RunConfig {
  int group_size = 16;
  double temp_train = 0.9;
  double temp_eval_planner = 0.0;
  double temp_eval_reasoner = 0.3;
  double beta_kl = 0.04;
  double clip_eps = 0.2;
  double lambda_stage1 = 0.7;
  double lambda_stage2 = 0.3;
  std::int64_t stage_boundary = 100;
  int epochs = 1;
  int steps_per_epoch = 200;
  int batch_questions = 16;
  int grad_accum = 4;
  double lr_max = 1e-2;
  double lr_min = 1e-4;
  int n_max = 8;
  int l_max = 16;
  std::uint64_t seed = 0;
  int threads = 1;
  // When false the reasoner's accuracy term is answer exact-match only, while
  // the planner keeps the task judge (which may also check the plan).
  bool shared_accuracy = false;

  // Throws ConfigError naming the first violated invariant.
  void validate() const;
  std::int64_t total_updates() const {
    return static_cast<std::int64_t>(epochs) * steps_per_epoch;
  }
};

}  // namespace rsim
