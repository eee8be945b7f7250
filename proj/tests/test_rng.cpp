#include <doctest.h>

#include <cmath>

#include "ashang/rng.hpp"

#include "test_helpers.hpp"

using namespace ashang;

TEST_CASE("identical stream parameters reproduce identical draws") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  for (int i = 0; i < 1000; ++i) CHECK(a.next_normal() == b.next_normal());
}

TEST_CASE("distinct stream ids decorrelate") {
  RngStream a(42, 0), b(42, 1);
  int same = 0;
  for (int i = 0; i < 256; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("uniforms live in [0,1)") {
  RngStream rng(1, 2);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal moments match a standard normal") {
  RngStream rng(3, 4);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}
