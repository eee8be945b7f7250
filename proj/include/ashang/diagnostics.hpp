#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ashang/numerics.hpp"
#include "ashang/problems.hpp"

namespace ashang {

// ---------------------------------------------------------------------------
// Lyapunov energy E(z+, P) = f(x+) - f(x*) + 1/2 ||y - x*||_P^2.
// The caller supplies x+ (one preconditioned correction step from the
// iterate); the optimizer state carries exactly that vector.
// ---------------------------------------------------------------------------

struct LyapunovSample {
  double energy = 0.0;
  double f_gap = 0.0;
  double metric_term = 0.0;
  std::int64_t step = 0;
};

LyapunovSample lyapunov_energy(const Vec& x_plus, const Vec& y, const DiagMetric& P,
                               const ObjectiveOracle& f);

// ---------------------------------------------------------------------------
// Admissibility monitor. q is computed from the analytic conditional second
// moment s_i = (1+sigma1^2) (df_i)^2 + sigma0^2/d, never from samples:
//   q = sum p_i^-1 s_i / sum p_i^-2 s_i,
//   ratio = (q / ((1+sigma1^2) L)) / (2 alpha^2 (1+sigma1^2)).
// The stepsize condition holds when ratio >= 1. When s vanishes identically
// (zero gradient, sigma0 = 0) the step is trivially admissible; the report
// is flagged vacuous and carries an infinite ratio.
// ---------------------------------------------------------------------------

struct AdmissibilityReport {
  double q = 0.0;
  double ratio = 0.0;
  bool vacuous = false;
  std::int64_t step = 0;
};

AdmissibilityReport admissibility_ratio(const Vec& x_next, const DiagMetric& P, double alpha,
                                        const NoiseSpec& noise, const ObjectiveOracle& f);

/// q from explicit (s, p) arrays; exposed for property tests.
double admissibility_q(const Vec& s, const Vec& p);

// ---------------------------------------------------------------------------
// Coordinatewise alignment: a pair (i, j) violates the ordering when
// (s_i - s_j)(p_i - p_j) < 0 strictly; ties do not count.
// ---------------------------------------------------------------------------

struct AlignmentReport {
  double violation_rate = 0.0;  // violating pairs / (N * d(d-1)/2)
  std::int64_t violating_pairs = 0;
  std::int64_t pairs_checked = 0;
};

std::int64_t count_ordering_violations(const Vec& s, const Vec& p);

/// Violation rate over per-run (x_next, P) states, with s computed
/// analytically from the noise model. Requires d >= 2.
AlignmentReport alignment_violation_rate(const std::vector<std::pair<Vec, DiagMetric>>& states,
                                         const NoiseSpec& noise, const ObjectiveOracle& f);

/// Whether sum p^-1 s / sum p^-2 s >= sum p^-1 / sum p^-2. Guaranteed true
/// for similarly ordered (s, p); may fail otherwise. s identically zero is
/// vacuously true.
bool trace_lower_bound_check(const Vec& s, const Vec& p);

// ---------------------------------------------------------------------------
// Decay-envelope quantities. The contraction factor and the noise
// accumulation sum from the two-phase decay analysis:
//   contraction_k = prod_{tau<=k} (1+alpha_tau)^-1,
//   psi_{k+1}     = sum_{tau=1}^{k+1} ( prod_{j=tau}^{k+1} (1+lo_j)^-1 ) hi_tau^2.
// ---------------------------------------------------------------------------

std::vector<double> contraction_product(const std::vector<double>& alphas);

/// Exact telescoping value of prod_{tau=0}^{k} (1 + a/(tau+b))^-1 for
/// integer a >= 1: prod_{j=0}^{a-1} (b+j) / prod_{j=1}^{a} (k+b+j).
double contraction_telescoped(int a, double b, std::int64_t k);

/// psi sequence; entry i covers tau = 1..i+1, with lo[i] and hi[i] the
/// envelope values of alpha_{i+1}.
std::vector<double> noise_accumulation(const std::vector<double>& alphas_lo,
                                       const std::vector<double>& alphas_hi);

/// Closed form of psi_{k+1} for constant envelopes:
/// (hi^2/lo) (1 - (1+lo)^-(k+1)).
double noise_accumulation_constant(double lo, double hi, std::int64_t k);

// ---------------------------------------------------------------------------
// Cumulative decay bound
//   E_{k+1} <= prod_{tau=0}^k (1+alpha_tau)^-1 E_0
//              + 2 sigma0^2 sum_{tau=1}^{k+1} prod_{j=tau}^{k+1} (1+alpha_j)^-1 alpha_tau^2.
// Returns the largest positive excess of the observed energy over the bound
// (0 when the bound holds everywhere). For mean trajectories a per-step
// standard-error band can be supplied; the bound is then widened by
// band_mult * stderr_band[k].
// ---------------------------------------------------------------------------

double theorem_bound_check(const std::vector<double>& energy /* E_0..E_T */,
                           const std::vector<double>& alphas /* alpha_0..alpha_T */,
                           double sigma0, double initial_energy,
                           const std::vector<double>* stderr_band = nullptr,
                           double band_mult = 3.0);

/// The bound values themselves: entry k is the bound on E_k, with
/// entry 0 = initial_energy.
std::vector<double> theorem_bound_series(const std::vector<double>& alphas, double sigma0,
                                         double initial_energy, std::size_t count);

}  // namespace ashang
