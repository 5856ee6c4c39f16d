// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/env/tasks.hpp"

#include <json.hpp>

#include <algorithm>
#include <ostream>

#include "rsim/core/error.hpp"
#include "rsim/core/rng.hpp"

namespace rsim::env {

void TaskSpec::validate(int n_max) const {
  if (depth < 1) throw Error(ErrorCode::kInvalidSpec, "task depth must be >= 1");
  if (kind == TaskKind::kChainArithmetic) {
    if (modulus != 10) {
      throw Error(ErrorCode::kInvalidSpec, "ChainArithmetic uses modulus 10");
    }
    return;
  }
  if (depth > n_max - 1) {
    throw Error(ErrorCode::kInvalidSpec,
                "lock length " + std::to_string(depth) + " exceeds n_max - 1");
  }
  if (lock_alphabet.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "lock alphabet is empty");
  }
  for (int k : lock_alphabet) {
    if (k < 1 || k > 8) {
      throw Error(ErrorCode::kInvalidSpec,
                  "lock strategies must be non-Termination ids 1..8");
    }
  }
}

std::string TaskSpec::label() const {
  std::string name(task_kind_name(kind));
  if (kind == TaskKind::kStrategyLock) {
    if (lock_alphabet == std::vector<int>{1, 2, 3, 4}) name += "-A";
    if (lock_alphabet == std::vector<int>{5, 6, 7, 8}) name += "-B";
  }
  return name + ":" + std::to_string(depth);
}

TaskSpec parse_task(const std::string& text) {
  TaskSpec spec;
  std::string name = text;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    name = text.substr(0, colon);
    try {
      spec.depth = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError, "bad task depth in '" + text + "'");
    }
  }
  if (name == "StrategyLock-A") {
    spec.kind = TaskKind::kStrategyLock;
    spec.lock_alphabet = {1, 2, 3, 4};
  } else if (name == "StrategyLock-B") {
    spec.kind = TaskKind::kStrategyLock;
    spec.lock_alphabet = {5, 6, 7, 8};
  } else {
    spec.kind = parse_task_kind(name);
  }
  return spec;
}

namespace {

int apply_op(int acc, TokenId op, int operand, const Vocab& vocab, int modulus) {
  const std::string& sym = vocab.symbol(op);
  int r = 0;
  if (sym == "+") {
    r = acc + operand;
  } else if (sym == "-") {
    r = acc - operand;
  } else if (sym == "*") {
    r = acc * operand;
  } else {
    throw Error(ErrorCode::kInvalidSpec, "not an operator: " + sym);
  }
  return ((r % modulus) + modulus) % modulus;
}

}  // namespace

int chain_fold(const TokenSeq& prompt, const Vocab& vocab, int modulus) {
  if (prompt.empty() || prompt.size() % 2 == 0) {
    throw Error(ErrorCode::kInvalidSpec, "malformed arithmetic prompt");
  }
  auto digit = [&](TokenId t) {
    auto d = vocab.digit_value(t);
    if (!d) throw Error(ErrorCode::kInvalidSpec, "expected a digit operand");
    return *d;
  };
  int acc = digit(prompt[0]) % modulus;
  for (std::size_t i = 1; i + 1 < prompt.size(); i += 2) {
    acc = apply_op(acc, prompt[i], digit(prompt[i + 1]), vocab, modulus);
  }
  return acc;
}

std::vector<Question> generate_questions(const TaskSpec& task, std::uint64_t seed,
                                         std::size_t count, const Vocab& vocab,
                                         std::int64_t id_base) {
  if (count < 1) {
    throw Error(ErrorCode::kInvalidSpec, "question count must be >= 1");
  }
  if (task.depth < 1) {
    throw Error(ErrorCode::kInvalidSpec, "task depth must be >= 1");
  }
  const TokenId ops[3] = {vocab.id("+"), vocab.id("-"), vocab.id("*")};
  std::vector<Question> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(task.kind), i}));
    Question q;
    q.id = id_base + static_cast<std::int64_t>(i);
    q.task = task.kind;
    if (task.kind == TaskKind::kChainArithmetic) {
      q.prompt_tokens.push_back(vocab.digit(static_cast<int>(rng.below(10))));
      for (int d = 0; d < task.depth; ++d) {
        q.prompt_tokens.push_back(ops[rng.below(3)]);
        q.prompt_tokens.push_back(vocab.digit(static_cast<int>(rng.below(10))));
      }
      q.ground_truth = {vocab.digit(chain_fold(q.prompt_tokens, vocab, task.modulus))};
    } else {
      const int len = task.mixed_lengths
                          ? 1 + static_cast<int>(rng.below(task.depth))
                          : task.depth;
      q.prompt_tokens.push_back(vocab.lock());
      for (int d = 0; d < len; ++d) {
        const int k = task.lock_alphabet[rng.below(task.lock_alphabet.size())];
        q.prompt_tokens.push_back(vocab.digit(k));
        q.lock_sequence.push_back(strategy_from_index(k));
      }
      q.ground_truth = {vocab.ok()};
    }
    out.push_back(std::move(q));
  }
  return out;
}

bool verify(const Question& q, const std::optional<TokenSeq>& answer) {
  return answer.has_value() && *answer == q.ground_truth;
}

bool format_ok(const Rollout& rollout, const Vocab& vocab, int l_max) {
  if (rollout.steps.empty()) return false;
  std::size_t ans_total = 0;
  for (const auto& step : rollout.steps) {
    if (step.tokens.empty() || step.tokens.back() != vocab.sep()) return false;
    if (step.tokens.size() > static_cast<std::size_t>(l_max)) return false;
    ans_total += static_cast<std::size_t>(
        std::count(step.tokens.begin(), step.tokens.end(), vocab.ans()));
  }
  if (ans_total != 1) return false;
  const TokenSeq& last = rollout.steps.back().tokens;
  auto ans = std::find(last.begin(), last.end(), vocab.ans());
  if (ans == last.end()) return false;
  // At least one answer token between ANS and the closing SEP.
  return (last.end() - ans) >= 3;
}

bool plans_match_lock(const Question& q, const Rollout& rollout) {
  if (!rollout.terminated_by_planner) return false;
  if (rollout.steps.size() != q.lock_sequence.size()) return false;
  for (std::size_t i = 0; i < rollout.steps.size(); ++i) {
    if (rollout.steps[i].strategy != q.lock_sequence[i]) return false;
  }
  return true;
}

bool lock_accuracy(const Question& q, const Rollout& rollout, const Vocab& vocab) {
  if (q.task != TaskKind::kStrategyLock) {
    throw Error(ErrorCode::kWrongTask, "lock_accuracy needs a StrategyLock question");
  }
  if (!plans_match_lock(q, rollout) || rollout.steps.empty()) return false;
  for (std::size_t i = 0; i < rollout.steps.size(); ++i) {
    const auto& t = rollout.steps[i].tokens;
    const auto marker = vocab.marker(rollout.steps[i].strategy);
    if (t.size() < 2 || !marker || t[0] != *marker || t[1] != vocab.ok()) {
      return false;
    }
    if (i + 1 == rollout.steps.size()) {
      if (t.size() < 4 || t[2] != vocab.ans() || t[3] != vocab.ok()) return false;
    }
  }
  return true;
}

bool judge(const Question& q, const Rollout& rollout) {
  if (!verify(q, rollout.extracted_answer)) return false;
  if (q.task == TaskKind::kStrategyLock) return plans_match_lock(q, rollout);
  return true;
}

void write_questions_jsonl(std::ostream& out, const std::vector<Question>& qs,
                           const Vocab& vocab) {
  for (const auto& q : qs) {
    nlohmann::json j;
    j["id"] = q.id;
    j["task"] = task_kind_name(q.task);
    j["prompt"] = vocab.decode(q.prompt_tokens);
    j["ground_truth"] = vocab.decode(q.ground_truth);
    if (!q.lock_sequence.empty()) {
      std::vector<int> lock;
      for (auto s : q.lock_sequence) lock.push_back(to_index(s));
      j["lock_sequence"] = lock;
    }
    out << j.dump() << '\n';
  }
}

}  // namespace rsim::env
