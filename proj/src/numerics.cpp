#include "ashang/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ashang {

bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double linf_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double linf_dist(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("linf_dist: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

DiagMetric::DiagMetric(Vec d) : diag(std::move(d)) {
  if (diag.empty()) throw std::invalid_argument("DiagMetric: dimension must be >= 1");
  for (double p : diag) {
    if (!(p > 0.0) || !std::isfinite(p))
      throw std::invalid_argument("DiagMetric: entries must be strictly positive and finite");
  }
}

DiagMetric DiagMetric::identity(std::size_t n, double scale) {
  return DiagMetric(Vec(n, scale));
}

double trace_inv_ratio(const DiagMetric& P, double eps) {
  // Factor out m = min_i(p_i + eps): with r_i = m / (p_i + eps) in (0, 1],
  //   Tr((P+eps)^-1) = (1/m) sum r_i,  Tr((P+eps)^-2) = (1/m^2) sum r_i^2,
  // so the ratio is m * sum(r_i) / sum(r_i^2) with no large intermediates.
  double m = std::numeric_limits<double>::infinity();
  for (double p : P.diag) m = std::min(m, p + eps);
  if (!(m > 0.0)) throw std::invalid_argument("trace_inv_ratio: metric not positive");
  double s1 = 0.0, s2 = 0.0;
  for (double p : P.diag) {
    const double r = m / (p + eps);
    s1 += r;
    s2 += r * r;
  }
  return m * (s1 / s2);
}

double weighted_norm_sq(const Vec& v, const DiagMetric& M, int power) {
  if (v.size() != M.dim())
    throw std::invalid_argument("weighted_norm_sq: dimension mismatch");
  double s = 0.0;
  switch (power) {
    case +1:
      for (std::size_t i = 0; i < v.size(); ++i) s += M.diag[i] * (v[i] * v[i]);
      return s;
    case -1:
      for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] * v[i]) / M.diag[i];
      return s;
    case -2:
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double q = v[i] / M.diag[i];
        s += q * q;
      }
      return s;
    default:
      throw std::invalid_argument("weighted_norm_sq: power must be -2, -1 or +1, got " +
                                  std::to_string(power));
  }
}

void project_weighted_box_inplace(Vec& y, const BoxRegion& box) {
  const double h = box.half_width;
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("project_weighted_box: half_width must be positive and finite");
  for (double& t : y) t = std::clamp(t, -h, h);
}

Vec project_weighted_box(const Vec& y, const BoxRegion& box) {
  Vec out = y;
  project_weighted_box_inplace(out, box);
  return out;
}

}  // namespace ashang
