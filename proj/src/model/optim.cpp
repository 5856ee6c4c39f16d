// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/model/optim.hpp"

#include <cmath>
#include <numbers>

#include "rsim/core/error.hpp"

namespace rsim::model {

void adamw_step(PolicyParams& params, const Gradients& grads,
                OptimizerState& state, double lr) {
  if (!params.same_shape(grads) || !params.same_shape(state.first_moment) ||
      !params.same_shape(state.second_moment)) {
    throw Error(ErrorCode::kShapeMismatch, "adamw: shape mismatch");
  }
  if (!grads.all_finite()) {
    throw Error(ErrorCode::kNonFiniteGradient, "adamw: non-finite gradient");
  }
  const AdamWConfig& c = state.config;
  state.step += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  const double decay = 1.0 - lr * c.weight_decay;

  auto& pt = params.tensors();
  const auto& gt = grads.tensors();
  auto& mt = state.first_moment.tensors();
  auto& vt = state.second_moment.tensors();
  for (std::size_t t = 0; t < pt.size(); ++t) {
    auto& p = pt[t].values;
    const auto& g = gt[t].values;
    auto& m = mt[t].values;
    auto& v = vt[t].values;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] = p[i] * decay - lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
  }
}

double cosine_lr(std::int64_t step, std::int64_t total_steps, double lr_max,
                 double lr_min) {
  if (step < 0 || step > total_steps) {
    throw Error(ErrorCode::kStepOutOfRange,
                "step " + std::to_string(step) + " outside [0, " +
                    std::to_string(total_steps) + "]");
  }
  if (total_steps == 0) return lr_max;
  const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * frac));
}

}  // namespace rsim::model
