#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ashang/numerics.hpp"
#include "ashang/rng.hpp"

#include "test_helpers.hpp"

using namespace ashang;

TEST_CASE("weighted_norm_sq handles the three metric powers") {
  const DiagMetric M(Vec{2.0, 2.0});
  CHECK(weighted_norm_sq(Vec{0.0, 0.0}, M, +1) == 0.0);
  CHECK(weighted_norm_sq(Vec{0.0, 0.0}, M, -1) == 0.0);
  CHECK(weighted_norm_sq(Vec{0.0, 0.0}, M, -2) == 0.0);

  CHECK(weighted_norm_sq(Vec{1.0, 1.0}, M, -1) == doctest::Approx(1.0).epsilon(1e-15));

  // (3,4) against diag(1,2) at power -2: 9 + 16/4.
  const DiagMetric M2(Vec{1.0, 2.0});
  CHECK(weighted_norm_sq(Vec{3.0, 4.0}, M2, -2) == doctest::Approx(13.0).epsilon(1e-15));

  CHECK_THROWS_AS(weighted_norm_sq(Vec{1.0}, M, -1), std::invalid_argument);
  CHECK_THROWS_AS(weighted_norm_sq(Vec{1.0, 1.0}, M, 2), std::invalid_argument);
}

TEST_CASE("identity metric reduces every power to the plain norm") {
  RngStream rng(11, 0);
  const DiagMetric I = DiagMetric::identity(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec v = testing::random_vec(rng, 8, -5.0, 5.0);
    const double plain = norm_sq(v);
    for (int power : {-2, -1, +1}) CHECK(weighted_norm_sq(v, I, power) == plain);
  }
}

TEST_CASE("DiagMetric validates positivity") {
  CHECK_THROWS_AS(DiagMetric(Vec{}), std::invalid_argument);
  CHECK_THROWS_AS(DiagMetric(Vec{1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(DiagMetric(Vec{1.0, -2.0}), std::invalid_argument);
  CHECK_THROWS_AS(DiagMetric(Vec{1.0, std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
  CHECK_NOTHROW(DiagMetric(Vec{1e-300, 1.0}));
}

TEST_CASE("trace_inv_ratio stays inside the entry range and survives tiny entries") {
  RngStream rng(12, 0);
  for (int trial = 0; trial < 300; ++trial) {
    Vec d(6);
    for (double& p : d) p = std::exp(6.0 * (rng.next_uniform() - 0.5));
    double lo = d[0], hi = d[0];
    for (double p : d) {
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    DiagMetric M(std::move(d));
    const double ratio = trace_inv_ratio(M, 0.0);
    CHECK(ratio >= lo * (1.0 - 1e-12));
    CHECK(ratio <= hi * (1.0 + 1e-12));
  }
  // scalar metric: the ratio is the entry itself
  CHECK(trace_inv_ratio(DiagMetric(Vec(4, 3.5)), 0.0) == doctest::Approx(3.5).epsilon(1e-15));
  // entries near the representable minimum must not overflow the ratio
  const double tiny = trace_inv_ratio(DiagMetric(Vec{1e-300, 2e-300}), 0.0);
  CHECK(std::isfinite(tiny));
  CHECK(tiny >= 1e-300);
  CHECK(tiny <= 2e-300 * (1.0 + 1e-12));
}

TEST_CASE("weighted box projection clamps coordinatewise") {
  const BoxRegion box{1.0};
  const Vec inside{0.3, -0.9};
  CHECK(project_weighted_box(inside, box) == inside);
  CHECK(project_weighted_box(Vec{3.0, -3.0}, box) == Vec{1.0, -1.0});
  CHECK_THROWS_AS(project_weighted_box(Vec{0.0}, BoxRegion{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(project_weighted_box(Vec{0.0}, BoxRegion{-1.0}), std::invalid_argument);
}

TEST_CASE("projection is idempotent and nonexpansive in any diagonal metric") {
  RngStream rng(13, 0);
  const BoxRegion box{0.7};
  for (int trial = 0; trial < 200; ++trial) {
    const Vec y = testing::random_vec(rng, 5, -3.0, 3.0);
    Vec d(5);
    for (double& p : d) p = std::exp(2.0 * (rng.next_uniform() - 0.5));
    const DiagMetric M(std::move(d));

    const Vec proj = project_weighted_box(y, box);
    CHECK(project_weighted_box(proj, box) == proj);

    // distance to any interior point never grows
    const Vec z = testing::random_vec(rng, 5, -0.7, 0.7);
    Vec dy(5), dp(5);
    for (std::size_t i = 0; i < 5; ++i) {
      dy[i] = y[i] - z[i];
      dp[i] = proj[i] - z[i];
    }
    CHECK(weighted_norm_sq(dp, M, +1) <= weighted_norm_sq(dy, M, +1) * (1.0 + 1e-12));
  }
}
