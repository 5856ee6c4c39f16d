// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "helpers.hpp"
#include "rsim/core/error.hpp"
#include "rsim/core/rng.hpp"
#include "rsim/model/fast_policy.hpp"
#include "rsim/model/gradcheck.hpp"
#include "rsim/model/optim.hpp"
#include "rsim/model/policy.hpp"
#include "rsim/model/sampling.hpp"

using namespace rsim;
using namespace rsim::model;
using rsim::test::vocab;

namespace {

PolicySpec small_spec(int arity = 27) {
  PolicySpec s;
  s.embed_dim = 4;
  s.context_window = 6;
  s.hidden_dims = {8, 5};
  s.output_arity = arity;
  return s;
}

TokenSeq random_context(Rng& rng, std::size_t len) {
  TokenSeq c(len);
  for (auto& t : c) t = static_cast<TokenId>(rng.below(27));
  return c;
}

double max_abs_diff(const PolicyParams& a, const PolicyParams& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.num_scalars(); ++i) {
    m = std::max(m, std::abs(a.scalar(i) - b.scalar(i)));
  }
  return m;
}

}  // namespace

TEST_CASE("policy specs") {
  const auto r = reasoner_spec(vocab());
  const auto p = planner_spec(vocab());
  CHECK(r.output_arity == 27);
  CHECK(p.output_arity == 9);
  CHECK(r.embed_dim == 16);
  CHECK(r.context_window == 32);
  CHECK(r.hidden_dims == std::vector<int>{64});
  CHECK(r.input_dim() == 512);
  PolicySpec bad = r;
  bad.output_arity = 5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = r;
  bad.hidden_dims = {0};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("canonical tensor layout") {
  const auto params = PolicyParams::init_uniform(small_spec(), 1);
  const auto& t = params.tensors();
  REQUIRE(t.size() == 7);
  CHECK(t[0].name == "embedding");
  CHECK(t[0].shape == std::vector<std::size_t>{27, 4});
  CHECK(t[1].name == "layer0.weight");
  CHECK(t[1].shape == std::vector<std::size_t>{24, 8});
  CHECK(t[3].name == "layer1.weight");
  CHECK(t[3].shape == std::vector<std::size_t>{8, 5});
  CHECK(t[5].name == "head.weight");
  CHECK(t[5].shape == std::vector<std::size_t>{5, 27});
  CHECK(t[6].name == "head.bias");
  for (std::size_t i = 0; i < params.num_scalars(); ++i) {
    CHECK(std::abs(params.scalar(i)) <= 0.05);
  }
  CHECK(PolicyParams::init_uniform(small_spec(), 1) == params);
  CHECK_FALSE(PolicyParams::init_uniform(small_spec(), 2) == params);
}

TEST_CASE("zero parameters give zero logits") {
  const PolicyParams zero(reasoner_spec(vocab()));
  const auto logits = forward_logits(zero, vocab().encode("<bos> 3 + 4"));
  CHECK(logits.size() == 27);
  for (double l : logits) CHECK(l == 0.0);
}

TEST_CASE("forward is deterministic and window local") {
  const auto params = PolicyParams::init_uniform(small_spec(), 3, 0.5);
  Rng rng(9);
  const auto ctx = random_context(rng, 15);
  CHECK(forward_logits(params, ctx) == forward_logits(params, ctx));
  const TokenSeq tail(ctx.end() - 6, ctx.end());
  CHECK(forward_logits(params, ctx) == forward_logits(params, tail));
  CHECK_THROWS_AS(forward_logits(params, TokenSeq{}), Error);
  CHECK_THROWS_AS(forward_logits(params, TokenSeq{99}), Error);
}

TEST_CASE("softmax normalisation") {
  const auto params = PolicyParams::init_uniform(small_spec(), 4, 1.0);
  Rng rng(2);
  for (double t : {0.3, 0.9, 1.0, 2.5}) {
    const auto lp = log_softmax(forward_logits(params, random_context(rng, 4)), t);
    double s = 0.0;
    for (double v : lp) s += std::exp(v);
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("categorical sampling") {
  Rng rng(1);
  const std::vector<double> even{0.0, 0.0};
  const auto s = sample_categorical(even, 1.0, rng);
  CHECK(s.logprob == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
  CHECK(sample_categorical(std::vector<double>{1, 3, 2}, 0.0, rng).index == 1);
  CHECK(sample_categorical(std::vector<double>{2, 2}, 0.0, rng).index == 0);
  // Greedy log-probability is the temperature-1 value.
  const auto g = sample_categorical(std::vector<double>{0, std::log(3.0)}, 0.0, rng);
  CHECK(g.logprob == doctest::Approx(std::log(0.75)));
  // Exclusion falls back to the runner-up.
  CHECK(sample_categorical(std::vector<double>{0.5, 2.0, 1.0}, 0.0, rng, 1).index == 2);
  for (int i = 0; i < 200; ++i) {
    CHECK(sample_categorical(std::vector<double>{0, 0, 0}, 1.0, rng, 1).index != 1);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sample_categorical(std::vector<double>{0.0, nan}, 1.0, rng), Error);
  CHECK(argmax(std::vector<double>{3, 1, 3}) == 0);
}

TEST_CASE("sampling frequencies follow the softmax") {
  Rng rng(17);
  const std::vector<double> logits{0.0, std::log(3.0)};
  int ones = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) ones += sample_categorical(logits, 1.0, rng).index;
  CHECK(static_cast<double>(ones) / n == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("sampling is reproducible") {
  Rng a(3), b(3);
  const std::vector<double> logits{0.1, 0.7, -0.3, 1.2};
  for (int i = 0; i < 100; ++i) {
    const auto x = sample_categorical(logits, 0.9, a);
    const auto y = sample_categorical(logits, 0.9, b);
    CHECK(x.index == y.index);
    CHECK(x.logprob == y.logprob);
  }
}

TEST_CASE("backward accumulation is linear") {
  const auto params = PolicyParams::init_uniform(small_spec(), 5, 0.5);
  const auto ctx = vocab().encode("<bos> 1 + 2");
  const auto acts = forward(params, ctx);
  auto zero = params.zeros_like();
  backward_accumulate(params, acts, 3, 0.0, zero);
  CHECK(zero == params.zeros_like());

  auto one = params.zeros_like();
  backward_accumulate(params, acts, 3, 1.0, one);
  auto two = params.zeros_like();
  backward_accumulate(params, acts, 3, 0.7, two);
  backward_accumulate(params, acts, 3, 1.6, two);
  auto expect = params.zeros_like();
  expect.add(one, 2.3);
  CHECK(max_abs_diff(two, expect) < 1e-12);

  PolicyParams wrong(reasoner_spec(vocab()));
  CHECK_THROWS_AS(backward_accumulate(params, acts, 3, 1.0, wrong), Error);
}

TEST_CASE("two-logit closed form gradient") {
  // With every weight zero except the head bias, d log softmax(b)[0] / d b
  // is (1 - p0, -p1).
  PolicySpec s;
  s.vocab_size = 27;
  s.embed_dim = 1;
  s.context_window = 1;
  s.hidden_dims = {1};
  s.output_arity = 9;
  PolicyParams p(s);
  auto& bias = p.tensors().back().values;
  bias[0] = 0.3;
  bias[1] = -0.2;
  const auto acts = forward(p, TokenSeq{1});
  auto g = p.zeros_like();
  backward_accumulate(p, acts, 0, 1.0, g);
  std::vector<double> e(9, 0.0);
  double z = 0.0;
  for (int i = 0; i < 9; ++i) z += std::exp(bias[i]);
  for (int i = 0; i < 9; ++i) e[i] = (i == 0 ? 1.0 : 0.0) - std::exp(bias[i]) / z;
  const auto& gb = g.tensors().back().values;
  for (int i = 0; i < 9; ++i) CHECK(std::abs(gb[i] - e[i]) < 1e-14);
}

TEST_CASE("gradcheck passes on default specs") {
  for (const auto& spec : {reasoner_spec(vocab()), planner_spec(vocab())}) {
    const auto rep = gradcheck(spec, 11, 300);
    CHECK(rep.probes == 300);
    CHECK(rep.max_rel_error < 1e-6);
  }
}

TEST_CASE("gradcheck catches a corrupted gradient") {
  GradcheckOptions o;
  o.flip_sign = true;
  const auto rep = gradcheck(small_spec(9), 1, 50, o);
  CHECK(rep.max_rel_error > 0.5);
}

TEST_CASE("gradcheck on a deep toy spec with temperature") {
  GradcheckOptions o;
  o.temperature = 0.7;
  o.init_scale = 0.5;
  CHECK(gradcheck(small_spec(), 21, 200, o).max_rel_error < 1e-6);
}

TEST_CASE("fast policy matches the reference forward") {
  for (const auto& spec : {small_spec(), reasoner_spec(vocab()), planner_spec(vocab())}) {
    const auto params = PolicyParams::init_uniform(spec, 8, 0.3);
    const FastPolicy fast(params);
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
      const auto ctx = random_context(rng, 1 + rng.below(40));
      const auto a = forward_logits(params, ctx);
      const auto b = fast.logits(ctx);
      REQUIRE(a.size() == b.size());
      for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::abs(a[j] - b[j]) < 1e-12);
    }
  }
}

TEST_CASE("fast gradients match the reference backward") {
  const auto params = PolicyParams::init_uniform(small_spec(), 12, 0.4);
  const FastPolicy fast(params);
  FastGradients fg(fast);
  auto ref = params.zeros_like();
  Rng rng(6);
  FastPolicy::Acts acts;
  for (int i = 0; i < 30; ++i) {
    const auto ctx = random_context(rng, 1 + rng.below(10));
    const int target = static_cast<int>(rng.below(27));
    const double up = rng.uniform(-1.0, 1.0);
    backward_accumulate(params, forward(params, ctx), target, up, ref, 0.9);
    fast.forward(ctx, acts);
    fg.accumulate(fast, acts, target, up, 0.9);
  }
  const auto got = fg.finalize(fast);
  CHECK(max_abs_diff(got, ref) < 1e-12);
}

TEST_CASE("adamw first step") {
  PolicySpec s;
  s.embed_dim = 1;
  s.context_window = 1;
  s.hidden_dims = {1};
  s.output_arity = 9;
  PolicyParams p(s);
  p.scalar(0) = 1.0;
  auto g = p.zeros_like();
  g.scalar(0) = 1.0;
  OptimizerState st(p);
  adamw_step(p, g, st, 0.1);
  CHECK(p.scalar(0) == doctest::Approx(0.899).epsilon(1e-6));
  CHECK(st.step == 1);
}

TEST_CASE("adamw edge cases") {
  auto p = PolicyParams::init_uniform(small_spec(), 1);
  const auto before = p;
  OptimizerState st(p, AdamWConfig{0.9, 0.999, 1e-8, 0.0});
  adamw_step(p, p.zeros_like(), st, 0.1);
  CHECK(p == before);

  auto bad = p.zeros_like();
  bad.scalar(3) = std::numeric_limits<double>::quiet_NaN();
  try {
    adamw_step(p, bad, st, 0.1);
    FAIL("expected NonFiniteGradient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFiniteGradient);
  }
  CHECK(p == before);
  PolicyParams other(planner_spec(vocab()));
  CHECK_THROWS_AS(adamw_step(p, other, st, 0.1), Error);
}

TEST_CASE("cosine schedule") {
  CHECK(cosine_lr(0, 100, 1e-2, 1e-4) == doctest::Approx(1e-2));
  CHECK(cosine_lr(100, 100, 1e-2, 1e-4) == doctest::Approx(1e-4));
  CHECK(std::abs(cosine_lr(50, 100, 2e-5, 0.0) - 1e-5) < 1e-15);
  CHECK_THROWS_AS(cosine_lr(101, 100, 1e-2, 1e-4), Error);
  CHECK_THROWS_AS(cosine_lr(-1, 100, 1e-2, 1e-4), Error);
}

TEST_CASE("parameter arithmetic") {
  auto a = PolicyParams::init_uniform(small_spec(), 1);
  auto b = a;
  b.add(a, -1.0);
  CHECK(b == a.zeros_like());
  CHECK(a.same_shape(b));
  CHECK(a.all_finite());
  a.scalar(0) = std::numeric_limits<double>::infinity();
  CHECK_FALSE(a.all_finite());
  std::vector<Tensor> wrong = b.tensors();
  wrong[1].shape = {1, 1};
  CHECK_THROWS_AS(PolicyParams::from_tensors(small_spec(), wrong), Error);
}
