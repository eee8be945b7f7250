#include "ashang/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ashang {

namespace {

constexpr double kRadiusFloor = 1e-8;  // guards gamma = alpha / R^2 at R = 0

double coupled_radius(const AdamShangParams& p, double r_running) {
  double r = p.box ? 2.0 * p.box->half_width : r_running;
  return std::max(r, kRadiusFloor);
}

bool state_ok(const Vec& x, const Vec& y, const Vec& g) {
  return all_finite(x) && all_finite(y) && all_finite(g);
}

void maybe_warn_beta(const AdamShangParams& p) {
  if (p.mode == AdamShangMode::training && p.beta > p.lambda) {
    std::fprintf(stderr, "note: training mode usually runs with beta <= lambda (beta=%g, lambda=%g)\n",
                 p.beta, p.lambda);
  }
}

}  // namespace

double trace_ratio_stepsize(const DiagMetric& P, double eps, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("trace_ratio_stepsize: scale must be positive");
  if (eps < 0.0) throw std::invalid_argument("trace_ratio_stepsize: eps must be nonnegative");
  return scale * std::sqrt(trace_inv_ratio(P, eps));
}

// -------------------------------------------------------------------------
// Adam-SHANG (lagged preconditioner)
// -------------------------------------------------------------------------

namespace {

// alpha_k from the mode's stepsize rule, on the current metric.
void plan_alpha(AdamShangState& st, const AdamShangParams& p) {
  switch (p.mode) {
    case AdamShangMode::training:
    case AdamShangMode::decoupled:
      st.trace_ratio_next = trace_inv_ratio(st.P, p.epsilon);
      st.alpha_next = p.lambda * std::sqrt(st.trace_ratio_next);
      break;
    case AdamShangMode::convex_coupled: {
      const double mult = 1.0 + p.sigma1 * p.sigma1;
      st.trace_ratio_next = trace_inv_ratio(st.P, p.epsilon);
      st.alpha_next =
          (p.lambda / mult) * std::sqrt(st.trace_ratio_next / (2.0 * p.smoothness_L));
      break;
    }
    case AdamShangMode::shang_collapse:
      st.trace_ratio_next = trace_inv_ratio(st.P, 0.0);
      st.alpha_next = 2.0 / static_cast<double>(st.k + 1);
      break;
  }
}

// Correction coefficient and vector for the upcoming x-update.
void plan_correction(AdamShangState& st, const AdamShangParams& p) {
  const std::size_t d = st.x.size();
  const double mult = 1.0 + p.sigma1 * p.sigma1;
  st.corr_next.resize(d);
  switch (p.mode) {
    case AdamShangMode::training:
    case AdamShangMode::decoupled:
      st.eta_next = st.alpha_next * p.beta;
      break;
    case AdamShangMode::convex_coupled: {
      const double a = (p.coupling == CouplingIndex::current_alpha) ? st.alpha_next
                                                                    : st.alpha_prev;
      st.eta_next = 2.0 * a * a * mult;
      break;
    }
    case AdamShangMode::shang_collapse:
      // Preconditioned coefficient: the scalar metric is absorbed, the
      // correction is simply c * g with c = 1/((1+sigma1^2) L).
      st.eta_next = 1.0 / (mult * p.smoothness_L);
      for (std::size_t i = 0; i < d; ++i) st.corr_next[i] = st.eta_next * st.g_last[i];
      return;
  }
  for (std::size_t i = 0; i < d; ++i)
    st.corr_next[i] = st.eta_next * st.g_last[i] / (st.P_prev.diag[i] + p.epsilon);
}

}  // namespace

AdamShangState adamshang_init(const Vec& x0, const Vec& y0, const DiagMetric& P0,
                              const AdamShangParams& params, const GradientFn& grad,
                              const Vec* x_star) {
  if (x0.size() != y0.size()) throw std::invalid_argument("adamshang_init: x0/y0 dimension mismatch");
  if (params.mode == AdamShangMode::convex_coupled && x_star == nullptr && !params.box)
    throw std::invalid_argument(
        "adamshang_init: convex_coupled needs a known minimizer or a box region");
  maybe_warn_beta(params);

  AdamShangState st;
  st.x = x0;
  st.y = y0;
  if (params.mode == AdamShangMode::shang_collapse) {
    st.P = DiagMetric::identity(x0.size(), shang_scalar_metric(0, params.sigma1, params.smoothness_L));
  } else {
    if (P0.dim() != x0.size()) throw std::invalid_argument("adamshang_init: P0 dimension mismatch");
    st.P = P0;
  }
  st.P_prev = st.P;  // P_{-1} = P_0
  if (x_star != nullptr) st.x_star = *x_star;
  st.g_last = grad(st.x);
  st.r_running = st.x_star.empty() ? 0.0 : linf_dist(st.y, st.x_star);

  plan_alpha(st, params);
  st.alpha_prev = st.alpha_next;  // alpha_{-1} := alpha_0
  plan_correction(st, params);
  if (!state_ok(st.x, st.y, st.g_last)) st.halted = true;
  return st;
}

void adamshang_step(AdamShangState& st, const AdamShangParams& p, const GradientFn& grad) {
  if (st.halted) return;
  const std::size_t d = st.x.size();
  const double alpha = st.alpha_next;
  const double denom = 1.0 + alpha;

  // x_{k+1} = x_k/(1+a) + a y_k/(1+a) - corr/(1+a), corr = eta (P_{k-1}+eps)^-1 g_k.
  Vec x_new(d);
  for (std::size_t i = 0; i < d; ++i)
    x_new[i] = st.x[i] / denom + alpha * st.y[i] / denom - st.corr_next[i] / denom;
  if (p.box) {
    st.x_unclamped = x_new;
    project_weighted_box_inplace(x_new, *p.box);
  }

  Vec g_new = grad(x_new);

  // y_{k+1} = y_k - a (P_k+eps)^-1 g_{k+1}.
  Vec y_new(d);
  for (std::size_t i = 0; i < d; ++i)
    y_new[i] = st.y[i] - alpha * g_new[i] / (st.P.diag[i] + p.epsilon);
  if (p.box && p.box_clamps_y) project_weighted_box_inplace(y_new, *p.box);
  if (p.y_box) project_weighted_box_inplace(y_new, *p.y_box);

  // P_{k+1} = P_k/(1+a) + (a gamma/(1+a)) (P_k+eps)^-1 G_{k+1}^2.
  bool metric_ok = true;
  Vec P_new(d);
  if (p.mode == AdamShangMode::shang_collapse) {
    const double next = shang_scalar_metric(st.k + 1, p.sigma1, p.smoothness_L);
    for (std::size_t i = 0; i < d; ++i) P_new[i] = next;
  } else {
    double gamma = p.gamma;
    if (p.mode == AdamShangMode::convex_coupled) {
      const double r = coupled_radius(p, st.r_running);
      gamma = alpha / (r * r);
    }
    const double force = alpha * gamma / denom;
    for (std::size_t i = 0; i < d; ++i) {
      P_new[i] = st.P.diag[i] / denom + force * (g_new[i] * g_new[i]) / (st.P.diag[i] + p.epsilon);
      if (!(P_new[i] > kPositivityFloor) || !std::isfinite(P_new[i])) metric_ok = false;
    }
  }

  std::swap(st.P_prev.diag, st.P.diag);  // P_prev <- P_k
  st.P.diag = std::move(P_new);
  st.x = std::move(x_new);
  st.y = std::move(y_new);
  st.g_last = std::move(g_new);
  st.alpha_prev = alpha;
  st.k += 1;
  if (!st.x_star.empty()) st.r_running = std::max(st.r_running, linf_dist(st.y, st.x_star));

  if (!metric_ok || !state_ok(st.x, st.y, st.g_last)) {
    st.halted = true;
    return;
  }
  plan_alpha(st, p);
  plan_correction(st, p);
}

// -------------------------------------------------------------------------
// Adam-SHANG-s (synchronous)
// -------------------------------------------------------------------------

double sync_precond_root(double p_k, double atilde, double gamma, double g) {
  const double b = (1.0 - atilde) * p_k;
  const double disc = b * b + 4.0 * atilde * gamma * (g * g);
  return 0.5 * (b + std::sqrt(disc));
}

namespace {

void plan_alpha_s(AdamShangSState& st, const AdamShangParams& p) {
  switch (p.mode) {
    case AdamShangMode::training:
    case AdamShangMode::decoupled:
      st.trace_ratio_next = trace_inv_ratio(st.P, p.epsilon);
      st.alpha_next = p.lambda * std::sqrt(st.trace_ratio_next);
      break;
    case AdamShangMode::convex_coupled: {
      const double mult = 1.0 + p.sigma1 * p.sigma1;
      st.trace_ratio_next = trace_inv_ratio(st.P, p.epsilon);
      st.alpha_next =
          (p.lambda / mult) * std::sqrt(st.trace_ratio_next / (6.0 * p.smoothness_L));
      break;
    }
    case AdamShangMode::shang_collapse:
      throw std::invalid_argument("adamshang_s: shang_collapse applies to the lagged scheme only");
  }
  st.atilde_next = st.alpha_next / (1.0 + st.alpha_next);
}

void plan_correction_s(AdamShangSState& st, const AdamShangParams& p) {
  const std::size_t d = st.x.size();
  const double mult = 1.0 + p.sigma1 * p.sigma1;
  if (p.mode == AdamShangMode::convex_coupled) {
    const double at = (p.coupling == CouplingIndex::current_alpha) ? st.atilde_next
                                                                   : st.atilde_prev;
    st.eta_next = 3.0 * at * at * mult;
  } else {
    st.eta_next = st.alpha_next * p.beta;
  }
  st.corr_next.resize(d);
  for (std::size_t i = 0; i < d; ++i)
    st.corr_next[i] = st.eta_next * st.g_last[i] / (st.P.diag[i] + p.epsilon);
}

}  // namespace

AdamShangSState adamshang_s_init(const Vec& x0, const Vec& y0, const DiagMetric& P0,
                                 const AdamShangParams& params, const GradientFn& grad,
                                 const Vec* x_star) {
  if (x0.size() != y0.size())
    throw std::invalid_argument("adamshang_s_init: x0/y0 dimension mismatch");
  if (P0.dim() != x0.size()) throw std::invalid_argument("adamshang_s_init: P0 dimension mismatch");
  if (params.mode == AdamShangMode::convex_coupled && x_star == nullptr && !params.box)
    throw std::invalid_argument(
        "adamshang_s_init: convex_coupled needs a known minimizer or a box region");
  maybe_warn_beta(params);

  AdamShangSState st;
  st.x = x0;
  st.y = y0;
  st.P = P0;
  if (x_star != nullptr) st.x_star = *x_star;
  st.g_last = grad(st.x);
  st.r_running = st.x_star.empty() ? 0.0 : linf_dist(st.y, st.x_star);

  plan_alpha_s(st, params);
  st.atilde_prev = st.atilde_next;
  plan_correction_s(st, params);
  if (!state_ok(st.x, st.y, st.g_last)) st.halted = true;
  return st;
}

void adamshang_s_step(AdamShangSState& st, const AdamShangParams& p, const GradientFn& grad) {
  if (st.halted) return;
  const std::size_t d = st.x.size();
  const double alpha = st.alpha_next;
  const double at = st.atilde_next;
  const double denom = 1.0 + alpha;

  // x_{k+1} = x_k/(1+a) + a y_k/(1+a) - corr/(1+a), corr = eta (P_k+eps)^-1 g_k.
  Vec x_new(d);
  for (std::size_t i = 0; i < d; ++i)
    x_new[i] = st.x[i] / denom + alpha * st.y[i] / denom - st.corr_next[i] / denom;
  if (p.box) {
    st.x_unclamped = x_new;
    project_weighted_box_inplace(x_new, *p.box);
  }

  Vec g_new = grad(x_new);

  double gamma = p.gamma;
  if (p.mode == AdamShangMode::convex_coupled) {
    const double r = coupled_radius(p, st.r_running);
    gamma = at / (2.0 * r * r);
  }

  // P first (positive quadratic root), then y with the new metric.
  bool metric_ok = true;
  Vec P_new(d);
  for (std::size_t i = 0; i < d; ++i) {
    P_new[i] = sync_precond_root(st.P.diag[i], at, gamma, g_new[i]);
    if (!(P_new[i] > kPositivityFloor) || !std::isfinite(P_new[i])) metric_ok = false;
  }

  Vec y_new(d);
  for (std::size_t i = 0; i < d; ++i)
    y_new[i] = st.y[i] - at * g_new[i] / (P_new[i] + p.epsilon);
  if (p.box && p.box_clamps_y) project_weighted_box_inplace(y_new, *p.box);
  if (p.y_box) project_weighted_box_inplace(y_new, *p.y_box);

  st.P.diag = std::move(P_new);
  st.x = std::move(x_new);
  st.y = std::move(y_new);
  st.g_last = std::move(g_new);
  st.atilde_prev = at;
  st.k += 1;
  if (!st.x_star.empty()) st.r_running = std::max(st.r_running, linf_dist(st.y, st.x_star));

  if (!metric_ok || !state_ok(st.x, st.y, st.g_last)) {
    st.halted = true;
    return;
  }
  plan_alpha_s(st, p);
  plan_correction_s(st, p);
}

// -------------------------------------------------------------------------
// Adam-form of the synchronous scheme
// -------------------------------------------------------------------------

Vec adamform_implied_y(const AdamShangSAdamFormState& st, double epsilon) {
  Vec y(st.x.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = st.x[i] - st.m[i] / (std::sqrt(st.V.diag[i]) + epsilon);
  return y;
}

namespace {

void plan_adamform(AdamShangSAdamFormState& st, const AdamShangParams& p) {
  // The trace rule reads P = sqrt(V).
  Vec sqrt_v(st.V.diag.size());
  for (std::size_t i = 0; i < sqrt_v.size(); ++i) sqrt_v[i] = std::sqrt(st.V.diag[i]);
  DiagMetric P(std::move(sqrt_v));
  const double mult = 1.0 + p.sigma1 * p.sigma1;
  switch (p.mode) {
    case AdamShangMode::training:
    case AdamShangMode::decoupled:
      st.trace_ratio_next = trace_inv_ratio(P, p.epsilon);
      st.alpha_next = p.lambda * std::sqrt(st.trace_ratio_next);
      st.beta_next = p.beta;
      break;
    case AdamShangMode::convex_coupled: {
      st.trace_ratio_next = trace_inv_ratio(P, p.epsilon);
      st.alpha_next =
          (p.lambda / mult) * std::sqrt(st.trace_ratio_next / (6.0 * p.smoothness_L));
      const double at_now = st.alpha_next / (1.0 + st.alpha_next);
      const double at = (p.coupling == CouplingIndex::current_alpha) ? at_now : st.atilde_prev;
      // eta = alpha beta = 3 atilde^2 (1+sigma1^2)  =>  beta = eta / alpha.
      st.beta_next = 3.0 * at * at * mult / st.alpha_next;
      break;
    }
    case AdamShangMode::shang_collapse:
      throw std::invalid_argument("adamform: shang_collapse applies to the lagged scheme only");
  }
}

}  // namespace

AdamShangSAdamFormState adamshang_s_adamform_init(const Vec& x0, const Vec& y0,
                                                  const DiagMetric& P0,
                                                  const AdamShangParams& params,
                                                  const GradientFn& grad, const Vec* x_star) {
  if (x0.size() != y0.size())
    throw std::invalid_argument("adamform_init: x0/y0 dimension mismatch");
  if (P0.dim() != x0.size()) throw std::invalid_argument("adamform_init: P0 dimension mismatch");
  if (params.mode == AdamShangMode::convex_coupled && x_star == nullptr && !params.box)
    throw std::invalid_argument("adamform_init: convex_coupled needs a minimizer or a box region");

  AdamShangSAdamFormState st;
  st.x = x0;
  st.m.resize(x0.size());
  st.V.diag.resize(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    st.m[i] = (P0.diag[i] + params.epsilon) * (x0[i] - y0[i]);
    st.V.diag[i] = P0.diag[i] * P0.diag[i];
  }
  if (x_star != nullptr) st.x_star = *x_star;
  st.g_last = grad(st.x);
  st.r_running = st.x_star.empty() ? 0.0 : linf_dist(y0, st.x_star);

  plan_adamform(st, params);
  st.atilde_prev = st.alpha_next / (1.0 + st.alpha_next);
  plan_adamform(st, params);  // coupled beta may read atilde_prev
  if (!all_finite(st.x) || !all_finite(st.m) || !all_finite(st.g_last)) st.halted = true;
  return st;
}

void adamshang_s_adamform_step(AdamShangSAdamFormState& st, const AdamShangParams& p,
                               const GradientFn& grad) {
  if (st.halted) return;
  const std::size_t d = st.x.size();
  const double alpha = st.alpha_next;
  const double at = alpha / (1.0 + alpha);
  const double theta = 1.0 / (1.0 + alpha);
  const double beta = st.beta_next;

  Vec sqrtV(d);
  for (std::size_t i = 0; i < d; ++i) sqrtV[i] = std::sqrt(st.V.diag[i]);

  // x_{k+1} = x_k - at (sqrt(V_k)+eps)^-1 (m_k + beta g_k).
  Vec x_new(d);
  for (std::size_t i = 0; i < d; ++i)
    x_new[i] = st.x[i] - at * (st.m[i] + beta * st.g_last[i]) / (sqrtV[i] + p.epsilon);
  if (p.box) project_weighted_box_inplace(x_new, *p.box);

  Vec g_new = grad(x_new);

  double gamma = p.gamma;
  if (p.mode == AdamShangMode::convex_coupled) {
    const double r = coupled_radius(p, st.r_running);
    gamma = at / (2.0 * r * r);
  }

  bool metric_ok = true;
  Vec m_new(d), V_new(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double p_next = sync_precond_root(sqrtV[i], at, gamma, g_new[i]);
    if (!(p_next > kPositivityFloor) || !std::isfinite(p_next)) metric_ok = false;
    const double ratio_m = (p_next + p.epsilon) / (sqrtV[i] + p.epsilon);
    const double ratio_raw = p_next / sqrtV[i];
    m_new[i] = theta * ratio_m * st.m[i] + (1.0 - theta) * g_new[i] -
               (1.0 - theta) * beta * ratio_m * st.g_last[i];
    V_new[i] = theta * ratio_raw * st.V.diag[i] + (1.0 - theta) * gamma * (g_new[i] * g_new[i]);
  }

  st.x = std::move(x_new);
  st.m = std::move(m_new);
  st.V.diag = std::move(V_new);
  st.g_last = std::move(g_new);
  st.atilde_prev = at;
  st.k += 1;
  if (!st.x_star.empty())
    st.r_running = std::max(st.r_running, linf_dist(adamform_implied_y(st, p.epsilon), st.x_star));

  if (!metric_ok || !all_finite(st.x) || !all_finite(st.m) || !all_finite(st.g_last)) {
    st.halted = true;
    return;
  }
  plan_adamform(st, p);
}

// -------------------------------------------------------------------------
// Baselines
// -------------------------------------------------------------------------

void sgd_step(SgdState& st, const SgdParams& p, const GradientFn& grad) {
  if (st.halted) return;
  const Vec g = grad(st.x);
  for (std::size_t i = 0; i < st.x.size(); ++i) st.x[i] -= p.eta * g[i];
  if (p.box) {
    st.x_unclamped = st.x;
    project_weighted_box_inplace(st.x, *p.box);
  }
  st.k += 1;
  if (!all_finite(st.x)) st.halted = true;
}

double shang_alpha(std::int64_t k) { return 2.0 / static_cast<double>(k + 1); }

double shang_scalar_metric(std::int64_t k, double sigma1, double smoothness_L) {
  const double a = shang_alpha(k);
  const double mult = 1.0 + sigma1 * sigma1;
  return a * a * mult * mult * smoothness_L;
}

ShangState shang_init(const Vec& x0, const Vec& y0, const GradientFn& grad) {
  if (x0.size() != y0.size()) throw std::invalid_argument("shang_init: x0/y0 dimension mismatch");
  ShangState st;
  st.x = x0;
  st.y = y0;
  st.g_last = grad(st.x);
  if (!state_ok(st.x, st.y, st.g_last)) st.halted = true;
  return st;
}

void shang_step(ShangState& st, const ShangParams& p, const GradientFn& grad) {
  if (st.halted) return;
  const std::size_t d = st.x.size();
  const double alpha = shang_alpha(st.k);
  const double denom = 1.0 + alpha;
  const double mult = 1.0 + p.sigma1 * p.sigma1;
  const double corr = 1.0 / (mult * p.smoothness_L);  // alpha_k beta_k P_{k-1}^-1

  Vec x_new(d);
  for (std::size_t i = 0; i < d; ++i)
    x_new[i] = st.x[i] / denom + alpha * st.y[i] / denom - (corr * st.g_last[i]) / denom;
  if (p.box) {
    st.x_unclamped = x_new;
    project_weighted_box_inplace(x_new, *p.box);
  }

  const Vec g_new = grad(x_new);

  const double metric = shang_scalar_metric(st.k, p.sigma1, p.smoothness_L);
  Vec y_new(d);
  for (std::size_t i = 0; i < d; ++i) y_new[i] = st.y[i] - alpha * g_new[i] / metric;
  if (p.box) project_weighted_box_inplace(y_new, *p.box);

  st.x = std::move(x_new);
  st.y = std::move(y_new);
  st.g_last = g_new;
  st.k += 1;
  if (!state_ok(st.x, st.y, st.g_last)) st.halted = true;
}

AdamState adam_init(const Vec& x0) {
  AdamState st;
  st.x = x0;
  st.m.assign(x0.size(), 0.0);
  st.V.assign(x0.size(), 0.0);
  st.V_hat.assign(x0.size(), 0.0);
  if (!all_finite(st.x)) st.halted = true;
  return st;
}

void adam_step(AdamState& st, const AdamParams& p, const GradientFn& grad) {
  if (st.halted) return;
  const std::size_t d = st.x.size();
  const double eta = p.sqrt_decay ? p.eta0 / std::sqrt(static_cast<double>(st.k + 1)) : p.eta0;
  const Vec& denom_src = p.amsgrad ? st.V_hat : st.V;

  for (std::size_t i = 0; i < d; ++i)
    st.x[i] -= eta * st.m[i] / (std::sqrt(denom_src[i]) + p.epsilon);
  if (p.box) {
    st.x_unclamped = st.x;
    project_weighted_box_inplace(st.x, *p.box);
  }

  const Vec g = grad(st.x);
  for (std::size_t i = 0; i < d; ++i) {
    st.m[i] = p.theta1 * st.m[i] + (1.0 - p.theta1) * g[i];
    st.V[i] = p.theta2 * st.V[i] + (1.0 - p.theta2) * (g[i] * g[i]);
    if (p.amsgrad) st.V_hat[i] = std::max(st.V_hat[i], st.V[i]);
  }
  st.k += 1;
  if (!all_finite(st.x) || !all_finite(st.m) || !all_finite(st.V)) st.halted = true;
}

void amsgrad_step(AdamState& st, const AdamParams& p, const GradientFn& grad) {
  if (!p.amsgrad) throw std::invalid_argument("amsgrad_step: params.amsgrad must be set");
  adam_step(st, p, grad);
}

// -------------------------------------------------------------------------
// Checkpoint arrays
// -------------------------------------------------------------------------

namespace {

Vec scalar_array(double v) { return Vec{v}; }

const Vec& find_array(const NamedArrays& arrays, const std::string& name) {
  for (const auto& [key, value] : arrays)
    if (key == name) return value;
  throw std::invalid_argument("checkpoint: missing array '" + name + "'");
}

}  // namespace

NamedArrays state_arrays(const AdamShangState& st) {
  return {
      {"x", st.x},
      {"y", st.y},
      {"P", st.P.diag},
      {"P_prev", st.P_prev.diag},
      {"g_last", st.g_last},
      {"x_star", st.x_star},
      {"alpha_next", scalar_array(st.alpha_next)},
      {"trace_ratio_next", scalar_array(st.trace_ratio_next)},
      {"eta_next", scalar_array(st.eta_next)},
      {"corr_next", st.corr_next},
      {"alpha_prev", scalar_array(st.alpha_prev)},
      {"r_running", scalar_array(st.r_running)},
      {"k", scalar_array(static_cast<double>(st.k))},
      {"halted", scalar_array(st.halted ? 1.0 : 0.0)},
  };
}

void restore_state(AdamShangState& st, const NamedArrays& arrays) {
  st.x = find_array(arrays, "x");
  st.y = find_array(arrays, "y");
  st.P.diag = find_array(arrays, "P");
  st.P_prev.diag = find_array(arrays, "P_prev");
  st.g_last = find_array(arrays, "g_last");
  st.x_star = find_array(arrays, "x_star");
  st.alpha_next = find_array(arrays, "alpha_next").at(0);
  st.trace_ratio_next = find_array(arrays, "trace_ratio_next").at(0);
  st.eta_next = find_array(arrays, "eta_next").at(0);
  st.corr_next = find_array(arrays, "corr_next");
  st.alpha_prev = find_array(arrays, "alpha_prev").at(0);
  st.r_running = find_array(arrays, "r_running").at(0);
  st.k = static_cast<std::int64_t>(find_array(arrays, "k").at(0));
  st.halted = find_array(arrays, "halted").at(0) != 0.0;
}

NamedArrays state_arrays(const AdamState& st) {
  return {
      {"x", st.x},
      {"m", st.m},
      {"V", st.V},
      {"V_hat", st.V_hat},
      {"k", scalar_array(static_cast<double>(st.k))},
      {"halted", scalar_array(st.halted ? 1.0 : 0.0)},
  };
}

void restore_state(AdamState& st, const NamedArrays& arrays) {
  st.x = find_array(arrays, "x");
  st.m = find_array(arrays, "m");
  st.V = find_array(arrays, "V");
  st.V_hat = find_array(arrays, "V_hat");
  st.k = static_cast<std::int64_t>(find_array(arrays, "k").at(0));
  st.halted = find_array(arrays, "halted").at(0) != 0.0;
}

}  // namespace ashang
