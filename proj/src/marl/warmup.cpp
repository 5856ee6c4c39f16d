// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/marl/warmup.hpp"

#include "rsim/core/error.hpp"
#include "rsim/core/rng.hpp"
#include "rsim/model/fast_policy.hpp"
#include "rsim/model/optim.hpp"
#include "rsim/model/sampling.hpp"

namespace rsim::marl {

namespace {

constexpr std::uint64_t kWarmupQuestionStream = 11;
constexpr std::uint64_t kWarmupTraceStream = 12;

}  // namespace

std::vector<WarmupTrace> format_warmup_traces(const env::TaskSpec& task,
                                              const RunConfig& run, std::uint64_t seed,
                                              std::size_t count, const Vocab& vocab) {
  if (run.l_max < 3) throw Error(ErrorCode::kConfigError, "warm-up needs l_max >= 3");
  std::vector<TokenId> content, answers;
  for (TokenId t = 0; t < static_cast<TokenId>(vocab.size()); ++t) {
    if (t == vocab.pad() || t == vocab.bos() || t == vocab.sep() || t == vocab.ans()) continue;
    content.push_back(t);
  }
  for (int d = 0; d < 10; ++d) answers.push_back(vocab.digit(d));
  answers.push_back(vocab.ok());

  const auto qs = env::generate_questions(task, derive_seed(seed, {kWarmupQuestionStream}),
                                          count, vocab);
  std::vector<WarmupTrace> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, {kWarmupTraceStream, i}));
    WarmupTrace tr{qs[i], {}};
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(run.n_max)));
    for (int s = 0; s < n; ++s) {
      Step step;
      step.strategy = strategy_from_index(1 + static_cast<int>(rng.below(8)));
      const bool last = s + 1 == n;
      // Room for the body: non-final "body SEP", final "body ANS answer SEP".
      const int room = run.l_max - (last ? 3 : 1);
      const int body = last ? static_cast<int>(rng.below(static_cast<std::uint64_t>(room + 1)))
                            : 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(room)));
      for (int b = 0; b < body; ++b) step.tokens.push_back(content[rng.below(content.size())]);
      if (last) {
        step.tokens.push_back(vocab.ans());
        step.tokens.push_back(answers[rng.below(answers.size())]);
      }
      step.tokens.push_back(vocab.sep());
      tr.steps.push_back(std::move(step));
    }
    out.push_back(std::move(tr));
  }
  return out;
}

double format_warmup(model::PolicyParams& reasoner, const env::TaskSpec& task,
                     const RunConfig& run, const FormatWarmupConfig& cfg,
                     const Vocab& vocab) {
  if (cfg.updates <= 0) return 0.0;
  if (cfg.traces_per_update < 1 || !(cfg.lr > 0.0)) {
    throw Error(ErrorCode::kConfigError, "invalid warm-up configuration");
  }
  model::OptimizerState opt(reasoner);
  double last_loss = 0.0;
  for (int u = 0; u < cfg.updates; ++u) {
    const auto traces = format_warmup_traces(
        task, run, derive_seed(cfg.seed, {static_cast<std::uint64_t>(u)}),
        static_cast<std::size_t>(cfg.traces_per_update), vocab);
    const model::FastPolicy fast(reasoner);
    model::FastGradients grads(fast);
    model::FastPolicy::Acts acts;
    std::size_t n_tokens = 0;
    for (const auto& tr : traces) {
      for (const auto& s : tr.steps) n_tokens += s.tokens.size();
    }
    const double w = 1.0 / static_cast<double>(n_tokens);
    double loss = 0.0;
    for (const auto& tr : traces) {
      TokenSeq ctx = trace_context(tr.question, {}, vocab);
      for (const auto& s : tr.steps) {
        ctx.push_back(*vocab.marker(s.strategy));
        for (TokenId t : s.tokens) {
          fast.forward(ctx, acts);
          loss -= w * model::log_softmax(acts.logits, 1.0)[t];
          grads.accumulate(fast, acts, t, -w, 1.0);
          ctx.push_back(t);
        }
      }
    }
    model::adamw_step(reasoner, grads.finalize(fast), opt, cfg.lr);
    last_loss = loss;
  }
  return last_loss;
}

}  // namespace rsim::marl
