// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/model/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "rsim/core/error.hpp"
#include "rsim/core/rng.hpp"
#include "rsim/model/sampling.hpp"

namespace rsim::model {

namespace {

double logprob(const PolicyParams& p, std::span<const TokenId> ctx, int target,
               double temperature) {
  return log_softmax(forward_logits(p, ctx), temperature)[target];
}

}  // namespace

GradcheckReport gradcheck(const PolicySpec& spec, std::uint64_t seed,
                          std::size_t n_probes, const GradcheckOptions& opts) {
  if (n_probes < 1) {
    throw Error(ErrorCode::kInvalidSpec, "gradcheck needs at least one probe");
  }
  PolicyParams params = PolicyParams::init_uniform(spec, seed, opts.init_scale);
  Rng rng(derive_seed(seed, {0x6772616463ULL}));
  const std::size_t n = params.num_scalars();

  GradcheckReport report;
  Gradients grads = params.zeros_like();
  for (std::size_t probe = 0; probe < n_probes; ++probe) {
    // Contexts are as long as the window so every position carries a token.
    std::vector<TokenId> ctx(static_cast<std::size_t>(spec.context_window));
    for (auto& t : ctx) t = static_cast<TokenId>(rng.below(spec.vocab_size));
    const int target = static_cast<int>(rng.below(spec.output_arity));

    // Draw the probed scalar among those that influence this output: the
    // embedding rows of tokens in the window and every dense weight.
    std::size_t flat = 0;
    {
      const std::size_t E = static_cast<std::size_t>(spec.embed_dim);
      const std::size_t emb = params.embedding().values.size();
      if (rng.uniform() < 0.25) {
        const TokenId tok = ctx[rng.below(ctx.size())];
        flat = static_cast<std::size_t>(tok) * E + rng.below(E);
      } else {
        flat = emb + rng.below(n - emb);
      }
    }

    grads.set_zero();
    backward_accumulate(params, forward(params, ctx), target, 1.0, grads,
                        opts.temperature);
    double analytic = grads.scalar(flat);
    if (opts.flip_sign) analytic = -analytic;

    double& w = params.scalar(flat);
    const double saved = w;
    w = saved + opts.step;
    const double f_plus = logprob(params, ctx, target, opts.temperature);
    w = saved - opts.step;
    const double f_minus = logprob(params, ctx, target, opts.temperature);
    w = saved;
    const double numeric = (f_plus - f_minus) / (2.0 * opts.step);

    const double denom =
        std::max({std::abs(analytic), std::abs(numeric), opts.denom_floor});
    const double err = std::abs(analytic - numeric) / denom;
    ++report.probes;
    if (err > report.max_rel_error || probe == 0) {
      report.max_rel_error = std::max(report.max_rel_error, err);
      report.worst_scalar = flat;
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
  }
  return report;
}

}  // namespace rsim::model
