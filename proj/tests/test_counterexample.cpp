#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ashang/problems.hpp"

#include "test_helpers.hpp"

using namespace ashang;

TEST_CASE("deterministic spike schedule triggers on round one") {
  CounterexampleMode mode;
  RngStream rng(1, 1);
  CHECK(counterexample_coeff(1, mode, rng) == 1010.0);
  CHECK(counterexample_coeff(2, mode, rng) == -10.0);
  CHECK(counterexample_coeff(101, mode, rng) == -10.0);
  CHECK(counterexample_coeff(102, mode, rng) == 1010.0);
}

TEST_CASE("stochastic coefficient mean matches the Bernoulli mixture") {
  CounterexampleMode mode;
  mode.variant = CounterexampleVariant::stochastic;
  RngStream rng(5, 9);
  const int n = 1000000;
  std::vector<double> draws;
  draws.reserve(n);
  for (int i = 0; i < n; ++i) draws.push_back(counterexample_coeff(i + 1, mode, rng));
  const auto ms = testing::mean_stderr(draws);
  // 0.01 * 1010 + 0.99 * (-10) = 0.2; the positive mean puts the optimum at -1
  CHECK(std::abs(ms.mean - 0.2) <= 3.0 * ms.stderr_mean);
  CHECK(ms.mean > 0.0);
}

TEST_CASE("average regret against the hindsight endpoint") {
  SUBCASE("playing the optimum gives zero regret on the periodic sequence") {
    std::vector<double> losses, coeffs;
    CounterexampleMode mode;
    RngStream rng(1, 1);
    for (int t = 1; t <= 400; ++t) {
      const double c = counterexample_coeff(t, mode, rng);
      coeffs.push_back(c);
      losses.push_back(c * -1.0);
    }
    for (double r : average_regret(losses, coeffs)) CHECK(r == 0.0);
  }

  SUBCASE("one full cycle at the wrong endpoint") {
    std::vector<double> losses, coeffs;
    CounterexampleMode mode;
    RngStream rng(1, 1);
    for (int t = 1; t <= 101; ++t) {
      const double c = counterexample_coeff(t, mode, rng);
      coeffs.push_back(c);
      losses.push_back(c * 1.0);
    }
    const auto reg = average_regret(losses, coeffs);
    CHECK(reg.back() == doctest::Approx(20.0 / 101.0).epsilon(1e-14));
  }

  SUBCASE("single first step from the origin") {
    const auto reg = average_regret({0.0}, {1010.0});
    CHECK(reg.size() == 1);
    CHECK(reg[0] == doctest::Approx(1010.0).epsilon(1e-15));
  }

  CHECK_THROWS_AS(average_regret({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(average_regret({1.0}, {1.0, 2.0}), std::invalid_argument);
}
