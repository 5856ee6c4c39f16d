// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/core/types.hpp"

#include <algorithm>
#include <cmath>

#include "rsim/core/error.hpp"

namespace rsim {

std::string_view task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kChainArithmetic: return "ChainArithmetic";
    case TaskKind::kStrategyLock: return "StrategyLock";
  }
  return "Unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "ChainArithmetic") return TaskKind::kChainArithmetic;
  if (name == "StrategyLock") return TaskKind::kStrategyLock;
  throw Error(ErrorCode::kConfigError, "unknown task '" + std::string(name) + "'");
}

std::vector<Strategy> Rollout::plans() const {
  std::vector<Strategy> out;
  out.reserve(steps.size() + 1);
  for (const auto& s : steps) out.push_back(s.strategy);
  out.push_back(final_plan);
  return out;
}

std::size_t Rollout::token_count() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.tokens.size();
  return n;
}

std::optional<TokenSeq> extract_answer(const Rollout& rollout,
                                       const Vocab& vocab) {
  if (rollout.steps.empty()) return std::nullopt;
  const TokenSeq& last = rollout.steps.back().tokens;
  auto ans = std::find(last.begin(), last.end(), vocab.ans());
  if (ans == last.end()) return std::nullopt;
  auto end = last.end();
  if (!last.empty() && last.back() == vocab.sep()) --end;
  if (ans + 1 > end) return TokenSeq{};
  return TokenSeq(ans + 1, end);
}

TokenSeq trace_context(const Question& q, const std::vector<Step>& steps,
                       const Vocab& vocab) {
  TokenSeq ctx;
  ctx.reserve(1 + q.prompt_tokens.size() + steps.size() * 6);
  ctx.push_back(vocab.bos());
  ctx.insert(ctx.end(), q.prompt_tokens.begin(), q.prompt_tokens.end());
  for (const auto& s : steps) {
    if (auto m = vocab.marker(s.strategy)) ctx.push_back(*m);
    ctx.insert(ctx.end(), s.tokens.begin(), s.tokens.end());
  }
  return ctx;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfigError, what);
  };
  if (group_size < 2) fail("G must be >= 2");
  if (!(temp_train >= 0) || !(temp_eval_planner >= 0) ||
      !(temp_eval_reasoner >= 0)) {
    fail("temperatures must be >= 0");
  }
  if (!(lambda_stage1 >= 0 && lambda_stage1 <= 1) ||
      !(lambda_stage2 >= 0 && lambda_stage2 <= 1)) {
    fail("lambda must lie in [0, 1]");
  }
  if (!(clip_eps > 0)) fail("clip_eps must be > 0");
  if (!(beta_kl >= 0) || !std::isfinite(beta_kl)) fail("beta_kl must be >= 0");
  if (n_max < 1) fail("n_max must be >= 1");
  if (l_max < 2) fail("l_max must be >= 2");
  if (stage_boundary < 0) fail("stage_boundary must be >= 0");
  if (epochs < 0 || steps_per_epoch < 0) fail("epochs and steps_per_epoch must be >= 0");
  if (batch_questions < 1) fail("batch_questions must be >= 1");
  if (grad_accum < 1 || grad_accum > batch_questions) {
    fail("grad_accum must lie in 1..batch_questions");
  }
  if (!(lr_max >= 0) || !(lr_min >= 0) || !std::isfinite(lr_max)) {
    fail("learning rates must be finite and >= 0");
  }
  if (threads < 1) fail("threads must be >= 1");
}

}  // namespace rsim
