// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "rsim/core/types.hpp"
#include "rsim/env/tasks.hpp"
#include "rsim/model/policy.hpp"

namespace rsim::marl {

// Step-format warm-up of the reasoner: teacher-forced cross-entropy on
// synthetic traces that are well formed (every step closed by SEP, one ANS
// in the last step) but carry no solution information. Step bodies are
// uniform over content tokens and the answer token is drawn independently of
// the question from the digits plus OK, so the reasoner learns the shape of
// a trace, never which answer or which strategy sequence is right.
struct FormatWarmupConfig {
  int updates = 0;  // 0 disables the warm-up
  int traces_per_update = 32;
  double lr = 1e-2;
  std::uint64_t seed = 0;
};

// One synthetic trace: prompt from the task generator, random injected
// plans, well-formed step tokens.
struct WarmupTrace {
  Question question;
  std::vector<Step> steps;  // tokens only; log-probabilities are unused
};

std::vector<WarmupTrace> format_warmup_traces(const env::TaskSpec& task,
                                              const RunConfig& run, std::uint64_t seed,
                                              std::size_t count, const Vocab& vocab);

// Returns the mean per-token cross-entropy of the last update (0 when
// disabled).
double format_warmup(model::PolicyParams& reasoner, const env::TaskSpec& task,
                     const RunConfig& run, const FormatWarmupConfig& cfg,
                     const Vocab& vocab);

}  // namespace rsim::marl
