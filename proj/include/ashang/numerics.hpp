#pragma once

#include <cstddef>
#include <vector>

namespace ashang {

/// Dense parameter/gradient vector. Dimension is fixed by the problem.
using Vec = std::vector<double>;

bool all_finite(const Vec& v);
double dot(const Vec& a, const Vec& b);
double norm_sq(const Vec& v);
double linf_norm(const Vec& v);
double linf_dist(const Vec& a, const Vec& b);

/// Strictly positive diagonal metric P = diag(p_1, ..., p_d).
/// The optimizer updates mutate `diag` in place and re-check positivity
/// each step; the constructor validates the initial entries.
struct DiagMetric {
  Vec diag;

  DiagMetric() = default;
  explicit DiagMetric(Vec d);
  static DiagMetric identity(std::size_t n, double scale = 1.0);

  std::size_t dim() const { return diag.size(); }
};

/// Sum_i (p_i + eps)^-1 and Sum_i (p_i + eps)^-2, factored so that the
/// ratio of the two stays finite even when entries are near the
/// representable minimum. Returns the ratio trace_inv / trace_inv_sq,
/// which always lies in [min_i(p_i+eps), max_i(p_i+eps)].
double trace_inv_ratio(const DiagMetric& P, double eps);

/// Sum_i M_i^power * v_i^2 for power in {-2, -1, +1}.
/// power -2 is evaluated as (v_i / M_i)^2 to avoid overflowing M_i^-2.
double weighted_norm_sq(const Vec& v, const DiagMetric& M, int power);

/// Axis-aligned box {|y_i| <= half_width}. For a diagonal metric M the
/// M-weighted projection argmin_{|y'|_inf <= h} ||y' - y||_M decouples per
/// coordinate into d independent scalar problems min_i p_i (y'_i - y_i)^2,
/// each minimized by clamping to [-h, h]; the clamp below is therefore the
/// exact weighted projection for every M > 0.
struct BoxRegion {
  double half_width = 1.0;
};

Vec project_weighted_box(const Vec& y, const BoxRegion& box);
void project_weighted_box_inplace(Vec& y, const BoxRegion& box);

}  // namespace ashang
