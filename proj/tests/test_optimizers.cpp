#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ashang/equivalence.hpp"
#include "ashang/optimizers.hpp"

#include "test_helpers.hpp"

using namespace ashang;

namespace {

GradientFn constant_grad(double c) {
  return [c](const Vec& x) { return Vec(x.size(), c); };
}

GradientFn zero_grad() { return constant_grad(0.0); }

}  // namespace

TEST_CASE("trace-ratio stepsize on simple metrics") {
  CHECK(trace_ratio_stepsize(DiagMetric::identity(7), 0.0, 1.0) == 1.0);
  CHECK(trace_ratio_stepsize(DiagMetric::identity(3, 4.0), 0.0, 0.5) ==
        doctest::Approx(0.5 * 2.0).epsilon(1e-15));
  CHECK(trace_ratio_stepsize(DiagMetric(Vec{1.0, 4.0}), 0.0, 1.0) ==
        doctest::Approx(std::sqrt(1.25 / 1.0625)).epsilon(1e-12));  // ~1.084652
  CHECK_THROWS_AS(trace_ratio_stepsize(DiagMetric::identity(2), -1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(trace_ratio_stepsize(DiagMetric::identity(2), 0.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("trace-ratio stepsize is sandwiched by the extreme entries") {
  RngStream rng(31, 0);
  for (int trial = 0; trial < 500; ++trial) {
    Vec d(5);
    for (double& p : d) p = std::exp(4.0 * (rng.next_uniform() - 0.5));
    double lo = d[0], hi = d[0];
    for (double p : d) {
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    const double eps = trial % 2 == 0 ? 0.0 : 1e-4;
    const double a = trace_ratio_stepsize(DiagMetric(std::move(d)), eps, 1.0);
    CHECK(a >= std::sqrt(lo + eps) * (1.0 - 1e-12));
    CHECK(a <= std::sqrt(hi + eps) * (1.0 + 1e-12));
  }
}

TEST_CASE("zero gradients contract the iterate pair and the metric") {
  AdamShangParams p;
  p.mode = AdamShangMode::training;
  p.lambda = 0.3;
  p.beta = 0.1;
  p.gamma = 0.2;
  p.epsilon = 0.0;

  const Vec x0{1.0, -2.0, 0.5};
  const Vec y0{0.5, 1.0, -0.25};
  AdamShangState st = adamshang_init(x0, y0, DiagMetric::identity(3), p, zero_grad(), nullptr);
  const double alpha = st.alpha_next;
  adamshang_step(st, p, zero_grad());

  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(st.x[i] == doctest::Approx((x0[i] + alpha * y0[i]) / (1.0 + alpha)).epsilon(1e-15));
    CHECK(st.y[i] == y0[i]);
    CHECK(st.P.diag[i] == 1.0 / (1.0 + alpha));  // forcing vanishes with the gradient
  }
}

TEST_CASE("one step agrees bitwise with a straight-line transcription") {
  // training mode, eps = 0, P0 = I, constant gradient field
  const std::size_t d = 3;
  const double lambda = 0.25, beta = 0.1, gamma = 0.05, c = 0.7, v = 0.4;

  AdamShangParams p;
  p.mode = AdamShangMode::training;
  p.lambda = lambda;
  p.beta = beta;
  p.gamma = gamma;
  p.epsilon = 0.0;

  AdamShangState st =
      adamshang_init(Vec(d, v), Vec(d, v), DiagMetric::identity(d), p, constant_grad(c), nullptr);
  adamshang_step(st, p, constant_grad(c));

  // Independent transcription of the same step (trace ratio of I is exactly 1).
  const double alpha = lambda * std::sqrt(1.0);
  const double denom = 1.0 + alpha;
  const double eta = alpha * beta;
  const double corr = eta * c / (1.0 + 0.0);
  const double x1 = v / denom + alpha * v / denom - corr / denom;
  const double y1 = v - alpha * c / (1.0 + 0.0);
  const double force = alpha * gamma / denom;
  const double p1 = 1.0 / denom + force * (c * c) / (1.0 + 0.0);

  for (std::size_t i = 0; i < d; ++i) {
    CHECK(st.x[i] == x1);
    CHECK(st.y[i] == y1);
    CHECK(st.P.diag[i] == p1);
    CHECK(st.P_prev.diag[i] == 1.0);
  }
  CHECK(st.alpha_prev == alpha);
}

TEST_CASE("synchronous metric root solves its quadratic") {
  // zero gradient collapses the quadratic to the linear root
  CHECK(sync_precond_root(2.5, 0.3, 0.7, 0.0) == (1.0 - 0.3) * 2.5);
  // a frozen step leaves the metric untouched
  CHECK(sync_precond_root(2.5, 0.0, 0.7, 3.0) == 2.5);

  RngStream rng(32, 0);
  for (int trial = 0; trial < 10000; ++trial) {
    const double pk = std::exp(8.0 * (rng.next_uniform() - 0.5));
    const double at = rng.next_uniform() * 0.999;
    const double gamma = std::exp(4.0 * (rng.next_uniform() - 0.5));
    const double g = 3.0 * rng.next_normal();
    const double root = sync_precond_root(pk, at, gamma, g);
    CHECK(root > 0.0);
    const double res = root * root - (1.0 - at) * pk * root - at * gamma * g * g;
    const double scale = std::max({1.0, root * root, at * gamma * g * g});
    CHECK(std::abs(res) <= 1e-12 * scale);
  }
}

TEST_CASE("synchronous step freezes when the gradient vanishes") {
  AdamShangParams p;
  p.mode = AdamShangMode::training;
  p.lambda = 0.2;
  p.beta = 0.05;
  p.gamma = 0.3;
  p.epsilon = 0.0;
  AdamShangSState st = adamshang_s_init(Vec{0.5, 0.8}, Vec{0.5, 0.8},
                                        DiagMetric(Vec{2.0, 3.0}), p, zero_grad(), nullptr);
  const double at = st.atilde_next;
  adamshang_s_step(st, p, zero_grad());
  CHECK(st.P.diag[0] == (1.0 - at) * 2.0);
  CHECK(st.P.diag[1] == (1.0 - at) * 3.0);
  CHECK(st.y[0] == 0.5);  // y-step carries the zero gradient
}

TEST_CASE("adam with zero gradients decays both moments geometrically") {
  AdamParams p;
  p.eta0 = 0.1;
  AdamState st = adam_init(Vec{1.0, -1.0});
  st.m = {0.5, -0.25};
  st.V = {0.2, 0.4};
  const Vec m0 = st.m, V0 = st.V;
  adam_step(st, p, zero_grad());
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(st.m[i] == p.theta1 * m0[i]);
    CHECK(st.V[i] == p.theta2 * V0[i]);
  }
}

TEST_CASE("amsgrad max accumulator never decreases") {
  AdamParams p;
  p.eta0 = 0.05;
  p.amsgrad = true;
  PiecewisePowerObjective f(4, 16);
  RngStream rng(33, 0);
  const NoiseSpec noise{1.0, 3.0};
  GradientFn grad = [&](const Vec& x) { return sample_stochastic_gradient(x, f, noise, rng); };
  AdamState st = adam_init(Vec(4, 0.8));
  Vec prev = st.V_hat;
  for (int k = 0; k < 500; ++k) {
    amsgrad_step(st, p, grad);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(st.V_hat[i] >= prev[i]);
      CHECK(st.V_hat[i] >= st.V[i]);
    }
    prev = st.V_hat;
  }
  AdamParams plain;
  CHECK_THROWS_AS(amsgrad_step(st, plain, grad), std::invalid_argument);
}

TEST_CASE("non-finite gradients halt the run with state intact") {
  AdamShangParams p;
  p.mode = AdamShangMode::training;
  p.epsilon = 0.0;
  GradientFn bad = [](const Vec& x) {
    return Vec(x.size(), std::numeric_limits<double>::quiet_NaN());
  };
  AdamShangState st =
      adamshang_init(Vec{0.5}, Vec{0.5}, DiagMetric::identity(1), p, constant_grad(1.0), nullptr);
  CHECK(!st.halted);
  adamshang_step(st, p, bad);
  CHECK(st.halted);
  const std::int64_t k = st.k;
  adamshang_step(st, p, bad);  // halted runs refuse further steps
  CHECK(st.k == k);

  SgdState sg;
  sg.x = {1.0};
  sgd_step(sg, SgdParams{std::numeric_limits<double>::infinity(), {}}, constant_grad(1.0));
  CHECK(sg.halted);
}

TEST_CASE("metric positivity floor triggers a halt instead of a singular inverse") {
  AdamShangParams p;
  p.mode = AdamShangMode::training;
  p.lambda = 0.5;
  p.beta = 0.0;
  p.gamma = 0.0;
  p.epsilon = 0.0;
  AdamShangState st = adamshang_init(Vec{0.0}, Vec{0.0}, DiagMetric(Vec{1e-300}), p, zero_grad(),
                                     nullptr);
  adamshang_step(st, p, zero_grad());  // decay pushes P below the floor
  CHECK(st.halted);
}

TEST_CASE("scalar-metric collapse reproduces the accelerated baseline") {
  CHECK(adamshang_collapse_vs_shang(500, 16, 16, 10.0) <= 1e-10);
  CHECK(adamshang_collapse_vs_shang(500, 8, 16, 0.0) <= 1e-10);
}

TEST_CASE("checkpoint arrays round-trip through dump and restore") {
  PiecewisePowerObjective f(4, 16);
  RngStream rng(34, 0);
  const NoiseSpec noise{0.5, 2.0};
  GradientFn grad = [&](const Vec& x) { return sample_stochastic_gradient(x, f, noise, rng); };

  AdamShangParams p;
  p.mode = AdamShangMode::convex_coupled;
  p.lambda = 0.5;
  p.epsilon = 0.0;
  p.sigma1 = noise.sigma1;
  p.smoothness_L = f.smoothness();

  AdamShangState st =
      adamshang_init(Vec(4, 0.8), Vec(4, 0.8), DiagMetric::identity(4), p, grad, f.minimizer());
  for (int k = 0; k < 10; ++k) adamshang_step(st, p, grad);

  AdamShangState restored;
  restore_state(restored, state_arrays(st));

  // continue both on identical streams; trajectories must coincide
  RngStream ra(34, 9), rb(34, 9);
  GradientFn ga = [&](const Vec& x) { return sample_stochastic_gradient(x, f, noise, ra); };
  GradientFn gb = [&](const Vec& x) { return sample_stochastic_gradient(x, f, noise, rb); };
  for (int k = 0; k < 10; ++k) {
    adamshang_step(st, p, ga);
    adamshang_step(restored, p, gb);
  }
  CHECK(st.x == restored.x);
  CHECK(st.y == restored.y);
  CHECK(st.P.diag == restored.P.diag);

  AdamState astate = adam_init(Vec(4, 0.3));
  AdamParams ap;
  ap.amsgrad = true;
  for (int k = 0; k < 5; ++k) amsgrad_step(astate, ap, grad);
  AdamState arestored;
  restore_state(arestored, state_arrays(astate));
  CHECK(arestored.x == astate.x);
  CHECK(arestored.m == astate.m);
  CHECK(arestored.V == astate.V);
  CHECK(arestored.V_hat == astate.V_hat);
  CHECK(arestored.k == astate.k);

  CHECK_THROWS_AS(restore_state(arestored, NamedArrays{}), std::invalid_argument);
}

TEST_CASE("coupled mode requires a radius source") {
  AdamShangParams p;
  p.mode = AdamShangMode::convex_coupled;
  CHECK_THROWS_AS(
      adamshang_init(Vec{0.5}, Vec{0.5}, DiagMetric::identity(1), p, constant_grad(1.0), nullptr),
      std::invalid_argument);
  CHECK_THROWS_AS(
      adamshang_s_init(Vec{0.5}, Vec{0.5}, DiagMetric::identity(1), p, constant_grad(1.0),
                       nullptr),
      std::invalid_argument);
  // a box region substitutes for a known minimizer
  p.box = BoxRegion{1.0};
  CHECK_NOTHROW(
      adamshang_init(Vec{0.5}, Vec{0.5}, DiagMetric::identity(1), p, constant_grad(1.0),
                     nullptr));
}
