// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rsim/core/rng.hpp"

namespace rsim::model {

// log softmax(logits / temperature); temperature must be > 0.
std::vector<double> log_softmax(std::span<const double> logits,
                                double temperature = 1.0);

// Lowest index among the maximal entries, optionally skipping `excluded`.
int argmax(std::span<const double> logits, std::optional<int> excluded = {});

struct Sample {
  int index = 0;
  double logprob = 0.0;
};

// Temperature 0: argmax (ties to the lowest index) with the temperature-1
// log-probability of the chosen index. Temperature t > 0: a draw from
// softmax(logits / t) with its log-probability under that distribution.
// `excluded` removes one index from consideration (strategy masking).
// Throws NonFiniteLogits.
Sample sample_categorical(std::span<const double> logits, double temperature,
                          Rng& rng, std::optional<int> excluded = {});

}  // namespace rsim::model
