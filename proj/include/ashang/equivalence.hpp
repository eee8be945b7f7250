#pragma once

#include <cstdint>

#include "ashang/optimizers.hpp"
#include "ashang/problems.hpp"

namespace ashang {

/// Each check runs two independently coded realizations of the same scheme
/// on identical gradient streams (same seed, same draw consumption) from
/// identical initial states, and returns the max over steps of
/// linf(dx) + linf(dy) + linf(dP).
///
/// Initial state: x0 = y0 = x0_fill * ones(d), P0 = I.

/// Production fraction form (the per-step update of the training algorithm)
/// vs the solved form that carries the auxiliary point x+ as state:
///   x_{k+1} = (x_k^+ + a y_k)/(1+a),  x_{k+1}^+ = x_{k+1} - eta (P_k+eps)^-1 g_{k+1}.
double adamshang_vs_solved_form(std::int64_t steps, std::size_t dim, int power,
                                std::uint64_t seed, const AdamShangParams& params,
                                const NoiseSpec& noise, double x0_fill = 1.0);

/// Production fraction form vs the residual form, i.e. the implicit scheme
///   (x_{k+1}-x_k)/a = y_k - x_{k+1} - beta (P_{k-1}+eps)^-1 g_k
/// solved for x_{k+1} (and likewise for P_{k+1}) with one division.
double adamshang_vs_residual_form(std::int64_t steps, std::size_t dim, int power,
                                  std::uint64_t seed, const AdamShangParams& params,
                                  const NoiseSpec& noise, double x0_fill = 1.0);

/// Synchronous scheme in (x, y, P) coordinates vs its Adam-shaped (x, m, V)
/// representation, translated through (P+eps)^-1 m = x - y and P = sqrt(V).
double adamshang_s_vs_adam_form(std::int64_t steps, std::size_t dim, int power,
                                std::uint64_t seed, const AdamShangParams& params,
                                const NoiseSpec& noise, double x0_fill = 1.0);

/// gamma = 0, scalar-metric collapse of the lagged scheme vs the
/// independently coded accelerated baseline; returns max over steps of
/// linf(dx) + linf(dy) on the deterministic benchmark.
double adamshang_collapse_vs_shang(std::int64_t steps, std::size_t dim, int power, double sigma1,
                                   double x0_fill = 1.0);

}  // namespace ashang
