// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "rsim/model/policy.hpp"

namespace rsim::model {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct OptimizerState {
  explicit OptimizerState(const PolicyParams& like, AdamWConfig cfg = {})
      : config(cfg), first_moment(like.zeros_like()),
        second_moment(like.zeros_like()) {}

  AdamWConfig config;
  PolicyParams first_moment;
  PolicyParams second_moment;
  std::int64_t step = 0;
};

// Decoupled weight decay followed by the bias-corrected Adam update.
// Throws ShapeMismatch or NonFiniteGradient; params are untouched on error.
void adamw_step(PolicyParams& params, const Gradients& grads,
                OptimizerState& state, double lr);

// lr_min + (lr_max - lr_min) * (1 + cos(pi * step / total_steps)) / 2.
// Throws StepOutOfRange unless 0 <= step <= total_steps.
double cosine_lr(std::int64_t step, std::int64_t total_steps, double lr_max,
                 double lr_min);

}  // namespace rsim::model
