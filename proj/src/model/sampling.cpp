// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/model/sampling.hpp"

#include <cmath>
#include <limits>

#include "rsim/core/error.hpp"

namespace rsim::model {

namespace {

void check_finite(std::span<const double> logits) {
  for (double x : logits) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kNonFiniteLogits, "non-finite logit");
    }
  }
}

std::vector<double> masked_log_softmax(std::span<const double> logits,
                                       double temperature,
                                       std::optional<int> excluded) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  double max_z = neg_inf;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (excluded && static_cast<int>(i) == *excluded) continue;
    max_z = std::max(max_z, logits[i] / temperature);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (excluded && static_cast<int>(i) == *excluded) continue;
    sum += std::exp(logits[i] / temperature - max_z);
  }
  const double log_z = max_z + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = (excluded && static_cast<int>(i) == *excluded)
                 ? neg_inf
                 : logits[i] / temperature - log_z;
  }
  return out;
}

}  // namespace

std::vector<double> log_softmax(std::span<const double> logits,
                                double temperature) {
  return masked_log_softmax(logits, temperature, std::nullopt);
}

int argmax(std::span<const double> logits, std::optional<int> excluded) {
  int best = -1;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (excluded && static_cast<int>(i) == *excluded) continue;
    if (best < 0 || logits[i] > logits[best]) best = static_cast<int>(i);
  }
  return best;
}

Sample sample_categorical(std::span<const double> logits, double temperature,
                          Rng& rng, std::optional<int> excluded) {
  check_finite(logits);
  if (logits.empty() || (excluded && logits.size() < 2)) {
    throw Error(ErrorCode::kInvalidSpec, "nothing to sample from");
  }
  if (!(temperature >= 0)) {
    throw Error(ErrorCode::kInvalidSpec, "temperature must be >= 0");
  }
  if (temperature == 0.0) {
    const int idx = argmax(logits, excluded);
    return {idx, masked_log_softmax(logits, 1.0, excluded)[idx]};
  }
  const auto lp = masked_log_softmax(logits, temperature, excluded);
  const double u = rng.uniform();
  double acc = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    if (excluded && static_cast<int>(i) == *excluded) continue;
    last = static_cast<int>(i);
    acc += std::exp(lp[i]);
    if (u < acc) return {last, lp[i]};
  }
  // Rounding left u beyond the accumulated mass.
  return {last, lp[last]};
}

}  // namespace rsim::model
