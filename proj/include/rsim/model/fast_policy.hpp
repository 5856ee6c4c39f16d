// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "rsim/model/policy.hpp"

namespace rsim::model {

// Inference/training view of a frozen parameter snapshot. The first linear
// map after the embedding concat is folded into a lookup table
//   T[k][v] = embedding[v] . W0[k-th input block]
// so a forward pass costs K row additions instead of a (K*E x H) product.
// Mathematically identical to forward()/backward_accumulate(); results
// differ only by floating-point summation order.
class FastPolicy {
 public:
  explicit FastPolicy(const PolicyParams& params);

  const PolicyParams& params() const { return params_; }
  const PolicySpec& spec() const { return params_.spec(); }

  struct Acts {
    std::vector<TokenId> window;
    std::vector<std::vector<double>> hidden;  // tanh outputs per hidden layer
    std::vector<double> logits;
  };

  // Throws EmptyContext / UnknownToken like forward().
  void forward(std::span<const TokenId> context, Acts& acts) const;
  std::vector<double> logits(std::span<const TokenId> context) const;

  std::size_t first_width() const { return n0_; }
  const std::vector<double>& table() const { return table_; }

 private:
  PolicyParams params_;
  std::size_t n0_ = 0;          // output width of the first map
  std::vector<double> table_;   // [K][V][n0]
};

// Gradient accumulator matching FastPolicy. Gradients of the first map are
// held in table space and converted exactly by finalize().
class FastGradients {
 public:
  explicit FastGradients(const FastPolicy& policy);

  // += upstream * d log softmax(logits / temperature)[target] / d params.
  void accumulate(const FastPolicy& policy, const FastPolicy::Acts& acts, int target,
                  double upstream, double temperature = 1.0);
  void add(const FastGradients& other);
  Gradients finalize(const FastPolicy& policy) const;

 private:
  Gradients dense_;              // everything except embedding and first weight
  std::vector<double> d_table_;  // [K][V][n0]
  std::vector<double> delta_, d_in_;
};

}  // namespace rsim::model
