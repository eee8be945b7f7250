#include "ashang/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ashang {

LyapunovSample lyapunov_energy(const Vec& x_plus, const Vec& y, const DiagMetric& P,
                               const ObjectiveOracle& f) {
  const Vec* xs = f.minimizer();
  if (xs == nullptr) throw std::logic_error("lyapunov_energy: minimizer unknown");
  LyapunovSample out;
  out.f_gap = f.value(x_plus) - f.min_value();
  Vec diff(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) diff[i] = y[i] - (*xs)[i];
  out.metric_term = 0.5 * weighted_norm_sq(diff, P, +1);
  out.energy = out.f_gap + out.metric_term;
  return out;
}

double admissibility_q(const Vec& s, const Vec& p) {
  if (s.size() != p.size()) throw std::invalid_argument("admissibility_q: dimension mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double w = s[i] / p[i];
    num += w;
    den += w / p[i];
  }
  return num / den;
}

AdmissibilityReport admissibility_ratio(const Vec& x_next, const DiagMetric& P, double alpha,
                                        const NoiseSpec& noise, const ObjectiveOracle& f) {
  AdmissibilityReport rep;
  const Vec s = conditional_second_moment(x_next, f, noise);
  double total = 0.0;
  for (double si : s) total += si;
  if (total == 0.0) {
    rep.vacuous = true;
    rep.q = 0.0;
    rep.ratio = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.q = admissibility_q(s, P.diag);
  const double mult = 1.0 + noise.sigma1 * noise.sigma1;
  rep.ratio = (rep.q / (mult * f.smoothness())) / (2.0 * alpha * alpha * mult);
  return rep;
}

std::int64_t count_ordering_violations(const Vec& s, const Vec& p) {
  if (s.size() != p.size())
    throw std::invalid_argument("count_ordering_violations: dimension mismatch");
  std::int64_t bad = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if ((s[i] - s[j]) * (p[i] - p[j]) < 0.0) ++bad;
  return bad;
}

AlignmentReport alignment_violation_rate(const std::vector<std::pair<Vec, DiagMetric>>& states,
                                         const NoiseSpec& noise, const ObjectiveOracle& f) {
  if (f.dim() < 2) throw std::invalid_argument("alignment_violation_rate: requires d >= 2");
  AlignmentReport rep;
  const std::int64_t pairs_per_run =
      static_cast<std::int64_t>(f.dim()) * static_cast<std::int64_t>(f.dim() - 1) / 2;
  for (const auto& [x_next, P] : states) {
    const Vec s = conditional_second_moment(x_next, f, noise);
    rep.violating_pairs += count_ordering_violations(s, P.diag);
    rep.pairs_checked += pairs_per_run;
  }
  rep.violation_rate = rep.pairs_checked == 0
                           ? 0.0
                           : static_cast<double>(rep.violating_pairs) /
                                 static_cast<double>(rep.pairs_checked);
  return rep;
}

bool trace_lower_bound_check(const Vec& s, const Vec& p) {
  if (s.size() != p.size())
    throw std::invalid_argument("trace_lower_bound_check: dimension mismatch");
  double total = 0.0;
  for (double si : s) total += si;
  if (total == 0.0) return true;  // vacuous: no gradient mass
  // Cross-multiplied form avoids dividing two small sums:
  //   (sum p^-1 s)(sum p^-2) >= (sum p^-2 s)(sum p^-1).
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double inv = 1.0 / p[i];
    a += inv * s[i];
    b += inv * inv;
    c += inv * inv * s[i];
    d += inv;
  }
  return a * b >= c * d * (1.0 - 1e-13);  // tolerate roundoff on the boundary
}

std::vector<double> contraction_product(const std::vector<double>& alphas) {
  std::vector<double> out(alphas.size());
  double prod = 1.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw std::invalid_argument("contraction_product: alphas must be > 0");
    prod /= 1.0 + alphas[i];
    out[i] = prod;
  }
  return out;
}

double contraction_telescoped(int a, double b, std::int64_t k) {
  if (a < 1) throw std::invalid_argument("contraction_telescoped: a must be a positive integer");
  double num = 1.0, den = 1.0;
  for (int j = 0; j < a; ++j) num *= b + static_cast<double>(j);
  for (int j = 1; j <= a; ++j) den *= static_cast<double>(k) + b + static_cast<double>(j);
  return num / den;
}

std::vector<double> noise_accumulation(const std::vector<double>& alphas_lo,
                                       const std::vector<double>& alphas_hi) {
  if (alphas_lo.size() != alphas_hi.size())
    throw std::invalid_argument("noise_accumulation: sequence lengths differ");
  std::vector<double> out(alphas_lo.size());
  double psi = 0.0;
  for (std::size_t i = 0; i < alphas_lo.size(); ++i) {
    if (!(alphas_lo[i] > 0.0) || !(alphas_hi[i] > 0.0))
      throw std::invalid_argument("noise_accumulation: envelopes must be > 0");
    psi = (psi + alphas_hi[i] * alphas_hi[i]) / (1.0 + alphas_lo[i]);
    out[i] = psi;
  }
  return out;
}

double noise_accumulation_constant(double lo, double hi, std::int64_t k) {
  return (hi * hi / lo) * (1.0 - std::pow(1.0 + lo, -static_cast<double>(k + 1)));
}

std::vector<double> theorem_bound_series(const std::vector<double>& alphas, double sigma0,
                                         double initial_energy, std::size_t count) {
  if (count == 0) return {};
  if (alphas.size() < count)
    throw std::invalid_argument("theorem_bound_series: need alpha_0..alpha_T");
  std::vector<double> bound(count);
  bound[0] = initial_energy;
  double contraction = 1.0;  // prod_{tau=0}^{k} (1+alpha_tau)^-1
  double psi = 0.0;          // sum_{tau=1}^{k+1} prod_{j=tau}^{k+1} (1+alpha_j)^-1 alpha_tau^2
  for (std::size_t k = 0; k + 1 < count; ++k) {
    contraction /= 1.0 + alphas[k];
    const double a_next = alphas[k + 1];
    psi = (psi + a_next * a_next) / (1.0 + a_next);
    bound[k + 1] = contraction * initial_energy + 2.0 * sigma0 * sigma0 * psi;
  }
  return bound;
}

double theorem_bound_check(const std::vector<double>& energy, const std::vector<double>& alphas,
                           double sigma0, double initial_energy,
                           const std::vector<double>* stderr_band, double band_mult) {
  if (energy.size() < 2) return 0.0;
  if (stderr_band != nullptr && stderr_band->size() < energy.size())
    throw std::invalid_argument("theorem_bound_check: stderr band too short");

  const std::vector<double> bound = theorem_bound_series(alphas, sigma0, initial_energy,
                                                         energy.size());
  double excess = 0.0;
  for (std::size_t k = 1; k < energy.size(); ++k) {
    double b = bound[k];
    if (stderr_band != nullptr) b += band_mult * (*stderr_band)[k];
    excess = std::max(excess, energy[k] - b);
  }
  return std::max(excess, 0.0);
}

}  // namespace ashang
