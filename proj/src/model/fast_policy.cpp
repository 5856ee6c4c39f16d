// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/model/fast_policy.hpp"

#include <algorithm>
#include <cmath>

#include "rsim/core/error.hpp"
#include "rsim/model/sampling.hpp"

namespace rsim::model {

namespace {

const Tensor& first_weight(const PolicyParams& p) {
  return p.num_layers() > 0 ? p.layer_weight(0) : p.head_weight();
}
const Tensor& first_bias(const PolicyParams& p) {
  return p.num_layers() > 0 ? p.layer_bias(0) : p.head_bias();
}
std::size_t first_weight_index(const PolicyParams& p) {
  return p.num_layers() > 0 ? 1 : p.tensors().size() - 2;
}

// out = in . W + b with W stored [in, out].
void dense(const std::vector<double>& in, const Tensor& w, const Tensor& b,
           std::vector<double>& out) {
  const std::size_t n_out = b.values.size();
  out.assign(b.values.begin(), b.values.end());
  const double* wp = w.values.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double x = in[i];
    const double* row = wp + i * n_out;
    for (std::size_t j = 0; j < n_out; ++j) out[j] += x * row[j];
  }
}

}  // namespace

FastPolicy::FastPolicy(const PolicyParams& params) : params_(params) {
  const auto& s = spec();
  const std::size_t K = static_cast<std::size_t>(s.context_window);
  const std::size_t E = static_cast<std::size_t>(s.embed_dim);
  const std::size_t V = static_cast<std::size_t>(s.vocab_size);
  const Tensor& w = first_weight(params_);
  n0_ = first_bias(params_).values.size();
  const auto& emb = params_.embedding().values;
  table_.assign(K * V * n0_, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t v = 0; v < V; ++v) {
      double* out = table_.data() + (k * V + v) * n0_;
      for (std::size_t e = 0; e < E; ++e) {
        const double x = emb[v * E + e];
        const double* row = w.values.data() + (k * E + e) * n0_;
        for (std::size_t j = 0; j < n0_; ++j) out[j] += x * row[j];
      }
    }
  }
}

void FastPolicy::forward(std::span<const TokenId> context, Acts& acts) const {
  if (context.empty()) {
    throw Error(ErrorCode::kEmptyContext, "forward needs at least one token");
  }
  const auto& s = spec();
  const std::size_t K = static_cast<std::size_t>(s.context_window);
  const std::size_t V = static_cast<std::size_t>(s.vocab_size);
  acts.window.assign(K, s.pad_token);
  const std::size_t take = std::min(K, context.size());
  for (std::size_t i = 0; i < take; ++i) {
    acts.window[K - take + i] = context[context.size() - take + i];
  }

  const std::size_t L = params_.num_layers();
  acts.hidden.resize(L);
  std::vector<double>& pre = L > 0 ? acts.hidden[0] : acts.logits;
  const auto& b0 = first_bias(params_).values;
  pre.assign(b0.begin(), b0.end());
  for (std::size_t k = 0; k < K; ++k) {
    const TokenId tok = acts.window[k];
    if (tok < 0 || tok >= s.vocab_size) {
      throw Error(ErrorCode::kUnknownToken, "token id out of range: " + std::to_string(tok));
    }
    const double* row = table_.data() + (k * V + static_cast<std::size_t>(tok)) * n0_;
    for (std::size_t j = 0; j < n0_; ++j) pre[j] += row[j];
  }
  if (L == 0) return;
  for (auto& v : acts.hidden[0]) v = std::tanh(v);
  for (std::size_t l = 1; l < L; ++l) {
    dense(acts.hidden[l - 1], params_.layer_weight(l), params_.layer_bias(l), acts.hidden[l]);
    for (auto& v : acts.hidden[l]) v = std::tanh(v);
  }
  dense(acts.hidden[L - 1], params_.head_weight(), params_.head_bias(), acts.logits);
}

std::vector<double> FastPolicy::logits(std::span<const TokenId> context) const {
  Acts a;
  forward(context, a);
  return std::move(a.logits);
}

FastGradients::FastGradients(const FastPolicy& policy)
    : dense_(policy.params().zeros_like()),
      d_table_(policy.table().size(), 0.0) {}

void FastGradients::accumulate(const FastPolicy& policy, const FastPolicy::Acts& acts,
                               int target, double upstream, double temperature) {
  const auto& p = policy.params();
  const auto& s = policy.spec();
  if (target < 0 || target >= s.output_arity ||
      acts.logits.size() != static_cast<std::size_t>(s.output_arity)) {
    throw Error(ErrorCode::kShapeMismatch, "activations do not match params");
  }
  if (upstream == 0.0) return;

  const auto lp = log_softmax(acts.logits, temperature);
  delta_.resize(lp.size());
  for (std::size_t j = 0; j < lp.size(); ++j) {
    const double onehot = static_cast<int>(j) == target ? 1.0 : 0.0;
    delta_[j] = upstream * (onehot - std::exp(lp[j])) / temperature;
  }

  auto& gt = dense_.tensors();
  const std::size_t L = p.num_layers();
  // Dense levels: head (input hidden[L-1]) down to layer 1 (input hidden[0]).
  for (std::size_t level = L; level >= 1; --level) {
    const bool head = level == L;
    const Tensor& w = head ? p.head_weight() : p.layer_weight(level);
    const std::size_t wi = head ? gt.size() - 2 : 1 + 2 * level;
    const auto& in = acts.hidden[level - 1];
    const std::size_t n_out = delta_.size();
    auto& gw = gt[wi].values;
    auto& gb = gt[wi + 1].values;
    for (std::size_t j = 0; j < n_out; ++j) gb[j] += delta_[j];
    d_in_.assign(in.size(), 0.0);
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double x = in[i];
      const double* row = w.values.data() + i * n_out;
      double* grow = gw.data() + i * n_out;
      double acc = 0.0;
      for (std::size_t j = 0; j < n_out; ++j) {
        grow[j] += x * delta_[j];
        acc += row[j] * delta_[j];
      }
      d_in_[i] = acc * (1.0 - x * x);  // through tanh
    }
    delta_.swap(d_in_);
  }

  // delta_ is now d/d(first-map pre-activation).
  const std::size_t n0 = policy.first_width();
  const std::size_t V = static_cast<std::size_t>(s.vocab_size);
  auto& gb0 = gt[first_weight_index(p) + 1].values;
  for (std::size_t j = 0; j < n0; ++j) gb0[j] += delta_[j];
  for (std::size_t k = 0; k < acts.window.size(); ++k) {
    double* row = d_table_.data() + (k * V + static_cast<std::size_t>(acts.window[k])) * n0;
    for (std::size_t j = 0; j < n0; ++j) row[j] += delta_[j];
  }
}

void FastGradients::add(const FastGradients& other) {
  dense_.add(other.dense_);
  for (std::size_t i = 0; i < d_table_.size(); ++i) d_table_[i] += other.d_table_[i];
}

Gradients FastGradients::finalize(const FastPolicy& policy) const {
  Gradients g = dense_;
  const auto& p = policy.params();
  const auto& s = policy.spec();
  const std::size_t K = static_cast<std::size_t>(s.context_window);
  const std::size_t E = static_cast<std::size_t>(s.embed_dim);
  const std::size_t V = static_cast<std::size_t>(s.vocab_size);
  const std::size_t n0 = policy.first_width();
  const auto& emb = p.embedding().values;
  const auto& w = first_weight(p).values;
  auto& gw = g.tensors()[first_weight_index(p)].values;
  auto& ge = g.tensors()[0].values;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t v = 0; v < V; ++v) {
      const double* dt = d_table_.data() + (k * V + v) * n0;
      bool any = false;
      for (std::size_t j = 0; j < n0 && !any; ++j) any = dt[j] != 0.0;
      if (!any) continue;
      for (std::size_t e = 0; e < E; ++e) {
        const double x = emb[v * E + e];
        double* grow = gw.data() + (k * E + e) * n0;
        const double* row = w.data() + (k * E + e) * n0;
        double acc = 0.0;
        for (std::size_t j = 0; j < n0; ++j) {
          grow[j] += x * dt[j];
          acc += row[j] * dt[j];
        }
        ge[v * E + e] += acc;
      }
    }
  }
  return g;
}

}  // namespace rsim::model
