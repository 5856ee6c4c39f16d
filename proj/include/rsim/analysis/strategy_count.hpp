// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <string_view>

#include "rsim/core/strategy.hpp"
#include "rsim/core/types.hpp"

namespace rsim::analysis {

// Indexed by strategy id; uncounted strategies stay zero.
using StrategyCounts = std::array<int, kNumStrategies>;

// Splits `text` into steps at every "\n\n" and, per step, adds one to each
// strategy with at least one keyword present. Keywords match whole words
// (or whole contiguous word sequences for phrases), ignoring ASCII case.
StrategyCounts count_strategies_text(std::string_view text,
                                     const StrategyTable& table = StrategyTable::builtin());

// Injected plans excluding Continuation and Termination.
int count_strategies_rollout(const Rollout& rollout);

// "label,count" per countable strategy, in id order.
std::string format_counts(const StrategyCounts& counts,
                          const StrategyTable& table = StrategyTable::builtin());

}  // namespace rsim::analysis
