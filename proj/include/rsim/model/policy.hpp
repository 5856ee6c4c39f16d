// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsim/core/vocab.hpp"

namespace rsim::model {

// Fixed-window policy: the embeddings of the last `context_window` tokens
// (left-padded with PAD) are concatenated, passed through tanh layers and a
// linear head. The reasoner's head spans the vocabulary, the planner's head
// spans the nine strategies.
struct PolicySpec {
  int vocab_size = 27;
  int embed_dim = 16;
  int context_window = 32;
  std::vector<int> hidden_dims{64};
  int output_arity = 27;
  TokenId pad_token = 0;

  // Throws InvalidSpec. output_arity must equal vocab_size or 9.
  void validate() const;
  int input_dim() const { return embed_dim * context_window; }
  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

PolicySpec reasoner_spec(const Vocab& vocab);
PolicySpec planner_spec(const Vocab& vocab);

struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;  // row-major
};

// Parameters (or a gradient buffer) of one policy. Canonical tensor order:
//   embedding [vocab, embed]
//   layer{l}.weight [in, out], layer{l}.bias [out]   for each hidden layer
//   head.weight [hidden, arity], head.bias [arity]
class PolicyParams {
 public:
  explicit PolicyParams(PolicySpec spec);  // all zeros

  // Uniform in [-scale, scale] from `seed`.
  static PolicyParams init_uniform(PolicySpec spec, std::uint64_t seed,
                                   double scale = 0.05);
  // Rebuilds from tensors read back from storage; validates names/shapes.
  static PolicyParams from_tensors(PolicySpec spec, std::vector<Tensor> tensors);

  const PolicySpec& spec() const { return spec_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }
  std::vector<Tensor>& tensors() { return tensors_; }

  const Tensor& embedding() const { return tensors_[0]; }
  const Tensor& layer_weight(std::size_t l) const { return tensors_[1 + 2 * l]; }
  const Tensor& layer_bias(std::size_t l) const { return tensors_[2 + 2 * l]; }
  const Tensor& head_weight() const { return tensors_[tensors_.size() - 2]; }
  const Tensor& head_bias() const { return tensors_.back(); }
  std::size_t num_layers() const { return spec_.hidden_dims.size(); }

  PolicyParams zeros_like() const { return PolicyParams(spec_); }
  void set_zero();
  void add(const PolicyParams& other, double scale = 1.0);
  bool same_shape(const PolicyParams& other) const;
  bool all_finite() const;
  std::size_t num_scalars() const;

  // Scalar access across tensors in canonical order.
  double& scalar(std::size_t flat);
  double scalar(std::size_t flat) const;

  friend bool operator==(const PolicyParams&, const PolicyParams&);

 private:
  PolicySpec spec_;
  std::vector<Tensor> tensors_;
};

bool operator==(const PolicyParams& a, const PolicyParams& b);
using Gradients = PolicyParams;

struct Activations {
  std::vector<TokenId> window;               // context_window tokens
  std::vector<std::vector<double>> layers;   // [0] input, [l+1] tanh output
  std::vector<double> logits;
};

// Throws EmptyContext for an empty context.
Activations forward(const PolicyParams& params, std::span<const TokenId> context);
std::vector<double> forward_logits(const PolicyParams& params,
                                   std::span<const TokenId> context);

// grads += upstream * d log softmax(logits / temperature)[target] / d params.
// `acts` must come from forward() with the same params.
void backward_accumulate(const PolicyParams& params, const Activations& acts,
                         int target, double upstream, Gradients& grads,
                         double temperature = 1.0);

}  // namespace rsim::model
