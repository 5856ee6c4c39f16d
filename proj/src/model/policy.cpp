// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/model/policy.hpp"

#include <cmath>

#include "rsim/core/error.hpp"
#include "rsim/core/rng.hpp"
#include "rsim/core/strategy.hpp"
#include "rsim/model/sampling.hpp"

namespace rsim::model {

void PolicySpec::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidSpec, "policy spec: " + what);
  };
  if (vocab_size < 1 || embed_dim < 1 || context_window < 1) {
    fail("dimensions must be >= 1");
  }
  if (hidden_dims.empty()) fail("at least one hidden layer is required");
  for (int h : hidden_dims) {
    if (h < 1) fail("hidden dimensions must be >= 1");
  }
  if (output_arity != vocab_size && output_arity != kNumStrategies) {
    fail("output arity must be the vocabulary size or 9");
  }
  if (pad_token < 0 || pad_token >= vocab_size) fail("pad token out of range");
}

PolicySpec reasoner_spec(const Vocab& vocab) {
  PolicySpec s;
  s.vocab_size = static_cast<int>(vocab.size());
  s.output_arity = s.vocab_size;
  s.pad_token = vocab.pad();
  return s;
}

PolicySpec planner_spec(const Vocab& vocab) {
  PolicySpec s = reasoner_spec(vocab);
  s.output_arity = kNumStrategies;
  return s;
}

namespace {

Tensor make_tensor(std::string name, std::vector<std::size_t> shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return Tensor{std::move(name), std::move(shape), std::vector<double>(n, 0.0)};
}

std::vector<Tensor> layout(const PolicySpec& spec) {
  std::vector<Tensor> t;
  const auto V = static_cast<std::size_t>(spec.vocab_size);
  const auto E = static_cast<std::size_t>(spec.embed_dim);
  t.push_back(make_tensor("embedding", {V, E}));
  std::size_t in = static_cast<std::size_t>(spec.input_dim());
  for (std::size_t l = 0; l < spec.hidden_dims.size(); ++l) {
    const auto out = static_cast<std::size_t>(spec.hidden_dims[l]);
    t.push_back(make_tensor("layer" + std::to_string(l) + ".weight", {in, out}));
    t.push_back(make_tensor("layer" + std::to_string(l) + ".bias", {out}));
    in = out;
  }
  const auto A = static_cast<std::size_t>(spec.output_arity);
  t.push_back(make_tensor("head.weight", {in, A}));
  t.push_back(make_tensor("head.bias", {A}));
  return t;
}

// out[j] = bias[j] + sum_i in[i] * w[i * n_out + j]
void affine(std::span<const double> in, const Tensor& w, const Tensor& b,
            std::vector<double>& out) {
  const std::size_t n_out = b.values.size();
  out.assign(b.values.begin(), b.values.end());
  const double* wp = w.values.data();
  double* op = out.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double x = in[i];
    if (x == 0.0) continue;
    const double* row = wp + i * n_out;
    for (std::size_t j = 0; j < n_out; ++j) op[j] += x * row[j];
  }
}

}  // namespace

PolicyParams::PolicyParams(PolicySpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  tensors_ = layout(spec_);
}

PolicyParams PolicyParams::init_uniform(PolicySpec spec, std::uint64_t seed,
                                        double scale) {
  PolicyParams p(std::move(spec));
  Rng rng(derive_seed(seed, {0x7061726dULL}));
  for (auto& t : p.tensors_) {
    for (auto& v : t.values) v = rng.uniform(-scale, scale);
  }
  return p;
}

PolicyParams PolicyParams::from_tensors(PolicySpec spec,
                                        std::vector<Tensor> tensors) {
  PolicyParams p(std::move(spec));
  if (tensors.size() != p.tensors_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "tensor count does not match spec");
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& want = p.tensors_[i];
    if (tensors[i].name != want.name || tensors[i].shape != want.shape ||
        tensors[i].values.size() != want.values.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "tensor '" + tensors[i].name + "' does not match '" +
                      want.name + "'");
    }
  }
  p.tensors_ = std::move(tensors);
  return p;
}

void PolicyParams::set_zero() {
  for (auto& t : tensors_) std::fill(t.values.begin(), t.values.end(), 0.0);
}

bool PolicyParams::same_shape(const PolicyParams& other) const {
  if (tensors_.size() != other.tensors_.size()) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].shape != other.tensors_[i].shape) return false;
  }
  return true;
}

void PolicyParams::add(const PolicyParams& other, double scale) {
  if (!same_shape(other)) {
    throw Error(ErrorCode::kShapeMismatch, "cannot add differently shaped params");
  }
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    auto& dst = tensors_[i].values;
    const auto& src = other.tensors_[i].values;
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += scale * src[k];
  }
}

bool PolicyParams::all_finite() const {
  for (const auto& t : tensors_) {
    for (double v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::size_t PolicyParams::num_scalars() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.values.size();
  return n;
}

double& PolicyParams::scalar(std::size_t flat) {
  for (auto& t : tensors_) {
    if (flat < t.values.size()) return t.values[flat];
    flat -= t.values.size();
  }
  throw Error(ErrorCode::kShapeMismatch, "scalar index out of range");
}

double PolicyParams::scalar(std::size_t flat) const {
  return const_cast<PolicyParams*>(this)->scalar(flat);
}

bool operator==(const PolicyParams& a, const PolicyParams& b) {
  if (!(a.spec_ == b.spec_) || a.tensors_.size() != b.tensors_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.tensors_.size(); ++i) {
    const auto& x = a.tensors_[i];
    const auto& y = b.tensors_[i];
    if (x.name != y.name || x.shape != y.shape || x.values != y.values) {
      return false;
    }
  }
  return true;
}

Activations forward(const PolicyParams& params, std::span<const TokenId> context) {
  if (context.empty()) {
    throw Error(ErrorCode::kEmptyContext, "forward needs at least one token");
  }
  const PolicySpec& spec = params.spec();
  const std::size_t K = static_cast<std::size_t>(spec.context_window);
  const std::size_t E = static_cast<std::size_t>(spec.embed_dim);

  Activations acts;
  acts.window.assign(K, spec.pad_token);
  const std::size_t take = std::min(K, context.size());
  for (std::size_t i = 0; i < take; ++i) {
    acts.window[K - take + i] = context[context.size() - take + i];
  }

  const auto& emb = params.embedding().values;
  acts.layers.resize(params.num_layers() + 1);
  auto& x = acts.layers[0];
  x.resize(K * E);
  for (std::size_t k = 0; k < K; ++k) {
    const TokenId tok = acts.window[k];
    if (tok < 0 || tok >= spec.vocab_size) {
      throw Error(ErrorCode::kUnknownToken,
                  "token id out of range: " + std::to_string(tok));
    }
    std::copy_n(emb.begin() + static_cast<std::ptrdiff_t>(tok * E), E,
                x.begin() + static_cast<std::ptrdiff_t>(k * E));
  }
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    auto& h = acts.layers[l + 1];
    affine(acts.layers[l], params.layer_weight(l), params.layer_bias(l), h);
    for (auto& v : h) v = std::tanh(v);
  }
  affine(acts.layers.back(), params.head_weight(), params.head_bias(), acts.logits);
  return acts;
}

std::vector<double> forward_logits(const PolicyParams& params,
                                   std::span<const TokenId> context) {
  return forward(params, context).logits;
}

void backward_accumulate(const PolicyParams& params, const Activations& acts,
                         int target, double upstream, Gradients& grads,
                         double temperature) {
  if (!params.same_shape(grads)) {
    throw Error(ErrorCode::kShapeMismatch, "gradient buffer shape mismatch");
  }
  const PolicySpec& spec = params.spec();
  if (target < 0 || target >= spec.output_arity ||
      acts.logits.size() != static_cast<std::size_t>(spec.output_arity) ||
      acts.layers.size() != params.num_layers() + 1) {
    throw Error(ErrorCode::kShapeMismatch, "activations do not match params");
  }
  if (upstream == 0.0) return;

  // d log softmax(z / T)[target] / dz = (onehot - p) / T
  const auto lp = log_softmax(acts.logits, temperature);
  std::vector<double> delta(lp.size());
  for (std::size_t j = 0; j < lp.size(); ++j) {
    const double onehot = static_cast<int>(j) == target ? 1.0 : 0.0;
    delta[j] = upstream * (onehot - std::exp(lp[j])) / temperature;
  }

  auto& gt = grads.tensors();
  const std::size_t n_layers = params.num_layers();
  // Walk from the head down; tensor index of the current weight.
  std::vector<double> d_in;
  for (std::size_t level = n_layers + 1; level-- > 0;) {
    const bool head = level == n_layers;
    const Tensor& w = head ? params.head_weight() : params.layer_weight(level);
    const std::size_t wi = head ? gt.size() - 2 : 1 + 2 * level;
    const auto& in = acts.layers[level];
    const std::size_t n_out = delta.size();

    auto& gw = gt[wi].values;
    auto& gb = gt[wi + 1].values;
    for (std::size_t j = 0; j < n_out; ++j) gb[j] += delta[j];
    d_in.assign(in.size(), 0.0);
    const double* wp = w.values.data();
    double* gwp = gw.data();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double x = in[i];
      const double* row = wp + i * n_out;
      double* grow = gwp + i * n_out;
      double acc = 0.0;
      for (std::size_t j = 0; j < n_out; ++j) {
        grow[j] += x * delta[j];
        acc += row[j] * delta[j];
      }
      d_in[i] = acc;
    }
    if (level > 0) {
      // Through tanh: d pre = d out * (1 - out^2).
      for (std::size_t i = 0; i < in.size(); ++i) d_in[i] *= 1.0 - in[i] * in[i];
    }
    delta.swap(d_in);
  }

  // delta now holds d/d input; scatter into the embedding rows.
  const std::size_t E = static_cast<std::size_t>(spec.embed_dim);
  auto& ge = gt[0].values;
  for (std::size_t k = 0; k < acts.window.size(); ++k) {
    double* row = ge.data() + static_cast<std::size_t>(acts.window[k]) * E;
    for (std::size_t e = 0; e < E; ++e) row[e] += delta[k * E + e];
  }
}

}  // namespace rsim::model
