// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "rsim/model/policy.hpp"

namespace rsim::model {

struct GradcheckOptions {
  double step = 1e-5;          // central-difference half width
  double init_scale = 0.05;    // parameter init range for the probed policy
  double temperature = 1.0;
  // Floor on the relative-error denominator so that gradients that are
  // zero up to rounding are compared in absolute terms.
  double denom_floor = 1e-4;
  bool flip_sign = false;      // corrupt the analytic gradient (self-test)
};

struct GradcheckReport {
  double max_rel_error = 0.0;
  std::size_t probes = 0;
  std::size_t worst_scalar = 0;  // flat index into the parameter vector
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Probes `n_probes` random scalar parameters of a randomly initialised policy,
// each with its own random context and target, comparing the analytic
// d log pi(target | context) / dw against (f(w + h) - f(w - h)) / 2h.
GradcheckReport gradcheck(const PolicySpec& spec, std::uint64_t seed,
                          std::size_t n_probes, const GradcheckOptions& opts = {});

}  // namespace rsim::model
