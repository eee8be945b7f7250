#include "ashang/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ashang {

namespace {

GradientFn make_noisy_grad(const ObjectiveOracle& f, const NoiseSpec& noise, RngStream& rng) {
  return [&f, &noise, &rng](const Vec& x) { return sample_stochastic_gradient(x, f, noise, rng); };
}

double coupled_radius(const AdamShangParams& p, double r_running) {
  double r = p.box ? 2.0 * p.box->half_width : r_running;
  return std::max(r, 1e-8);
}

// ---------------------------------------------------------------------------
// Solved form with the auxiliary point carried as state.
// ---------------------------------------------------------------------------

struct SolvedFormState {
  Vec x, xp, y;   // xp = x_k - eta_k (P_{k-1}+eps)^-1 g_k
  Vec P, P_prev;  // diagonals
  Vec g_last;
  double alpha = 0.0;      // alpha_k for the upcoming step
  double alpha_prev = 0.0;
  double r_running = 0.0;
  std::int64_t k = 0;
};

double solved_alpha(const SolvedFormState& st, const AdamShangParams& p) {
  DiagMetric P{Vec(st.P)};
  switch (p.mode) {
    case AdamShangMode::training:
    case AdamShangMode::decoupled:
      return p.lambda * std::sqrt(trace_inv_ratio(P, p.epsilon));
    case AdamShangMode::convex_coupled: {
      const double mult = 1.0 + p.sigma1 * p.sigma1;
      return (p.lambda / mult) *
             std::sqrt(trace_inv_ratio(P, p.epsilon) / (2.0 * p.smoothness_L));
    }
    default:
      throw std::invalid_argument("solved form: unsupported mode");
  }
}

double solved_eta(const SolvedFormState& st, const AdamShangParams& p) {
  if (p.mode == AdamShangMode::convex_coupled) {
    const double mult = 1.0 + p.sigma1 * p.sigma1;
    const double a = (p.coupling == CouplingIndex::current_alpha) ? st.alpha : st.alpha_prev;
    return 2.0 * a * a * mult;
  }
  return st.alpha * p.beta;
}

void solved_refresh_xp(SolvedFormState& st, const AdamShangParams& p) {
  const double eta = solved_eta(st, p);
  for (std::size_t i = 0; i < st.x.size(); ++i)
    st.xp[i] = st.x[i] - eta * st.g_last[i] / (st.P_prev[i] + p.epsilon);
}

SolvedFormState solved_init(const Vec& x0, const Vec& y0, const Vec& P0,
                            const AdamShangParams& p, const GradientFn& grad, const Vec& x_star) {
  SolvedFormState st;
  st.x = x0;
  st.y = y0;
  st.P = P0;
  st.P_prev = P0;
  st.g_last = grad(st.x);
  st.xp.resize(x0.size());
  st.r_running = x_star.empty() ? 0.0 : linf_dist(st.y, x_star);
  st.alpha = solved_alpha(st, p);
  st.alpha_prev = st.alpha;
  solved_refresh_xp(st, p);
  return st;
}

void solved_step(SolvedFormState& st, const AdamShangParams& p, const GradientFn& grad,
                 const Vec& x_star) {
  const std::size_t d = st.x.size();
  const double alpha = st.alpha;
  const double denom = 1.0 + alpha;

  Vec x_new(d);
  for (std::size_t i = 0; i < d; ++i) x_new[i] = (st.xp[i] + alpha * st.y[i]) / denom;
  if (p.box) project_weighted_box_inplace(x_new, *p.box);

  Vec g_new = grad(x_new);

  Vec y_new(d);
  for (std::size_t i = 0; i < d; ++i)
    y_new[i] = st.y[i] - alpha * g_new[i] / (st.P[i] + p.epsilon);
  if (p.box) project_weighted_box_inplace(y_new, *p.box);

  double gamma = p.gamma;
  if (p.mode == AdamShangMode::convex_coupled) {
    const double r = coupled_radius(p, st.r_running);
    gamma = alpha / (r * r);
  }
  Vec P_new(d);
  for (std::size_t i = 0; i < d; ++i)
    P_new[i] = st.P[i] / denom +
               (alpha * gamma / denom) * (g_new[i] * g_new[i]) / (st.P[i] + p.epsilon);

  st.P_prev = st.P;
  st.P = std::move(P_new);
  st.x = std::move(x_new);
  st.y = std::move(y_new);
  st.g_last = std::move(g_new);
  st.alpha_prev = alpha;
  st.k += 1;
  if (!x_star.empty()) st.r_running = std::max(st.r_running, linf_dist(st.y, x_star));

  st.alpha = solved_alpha(st, p);
  solved_refresh_xp(st, p);
}

// ---------------------------------------------------------------------------
// Residual form: the implicit equations solved with a single division.
// ---------------------------------------------------------------------------

struct ResidualFormState {
  Vec x, y, P, P_prev, g_last;
  double alpha = 0.0;
  double alpha_prev = 0.0;
  double r_running = 0.0;
  std::int64_t k = 0;
};

double residual_alpha(const ResidualFormState& st, const AdamShangParams& p) {
  DiagMetric P{Vec(st.P)};
  switch (p.mode) {
    case AdamShangMode::training:
    case AdamShangMode::decoupled:
      return p.lambda * std::sqrt(trace_inv_ratio(P, p.epsilon));
    case AdamShangMode::convex_coupled: {
      const double mult = 1.0 + p.sigma1 * p.sigma1;
      return (p.lambda / mult) *
             std::sqrt(trace_inv_ratio(P, p.epsilon) / (2.0 * p.smoothness_L));
    }
    default:
      throw std::invalid_argument("residual form: unsupported mode");
  }
}

ResidualFormState residual_init(const Vec& x0, const Vec& y0, const Vec& P0,
                                const AdamShangParams& p, const GradientFn& grad,
                                const Vec& x_star) {
  ResidualFormState st;
  st.x = x0;
  st.y = y0;
  st.P = P0;
  st.P_prev = P0;
  st.g_last = grad(st.x);
  st.r_running = x_star.empty() ? 0.0 : linf_dist(st.y, x_star);
  st.alpha = residual_alpha(st, p);
  st.alpha_prev = st.alpha;
  return st;
}

void residual_step(ResidualFormState& st, const AdamShangParams& p, const GradientFn& grad,
                   const Vec& x_star) {
  const std::size_t d = st.x.size();
  const double alpha = st.alpha;
  const double mult = 1.0 + p.sigma1 * p.sigma1;

  // beta carrying the correction: (x_{k+1}-x_k)/a = y_k - x_{k+1} - beta P^-1 g_k.
  double beta_eff;
  if (p.mode == AdamShangMode::convex_coupled) {
    const double a = (p.coupling == CouplingIndex::current_alpha) ? alpha : st.alpha_prev;
    beta_eff = 2.0 * a * a * mult / alpha;
  } else {
    beta_eff = p.beta;
  }

  Vec x_new(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double target = st.y[i] - beta_eff * st.g_last[i] / (st.P_prev[i] + p.epsilon);
    x_new[i] = (st.x[i] + alpha * target) / (1.0 + alpha);
  }
  if (p.box) project_weighted_box_inplace(x_new, *p.box);

  Vec g_new = grad(x_new);

  Vec y_new(d);
  for (std::size_t i = 0; i < d; ++i)
    y_new[i] = st.y[i] - (alpha / (st.P[i] + p.epsilon)) * g_new[i];
  if (p.box) project_weighted_box_inplace(y_new, *p.box);

  double gamma = p.gamma;
  if (p.mode == AdamShangMode::convex_coupled) {
    const double r = coupled_radius(p, st.r_running);
    gamma = alpha / (r * r);
  }
  // (P_{k+1}-P_k)/a = -P_{k+1} + gamma P_k^-1 G^2, solved for P_{k+1}.
  Vec P_new(d);
  for (std::size_t i = 0; i < d; ++i)
    P_new[i] = (st.P[i] + alpha * gamma * (g_new[i] * g_new[i]) / (st.P[i] + p.epsilon)) /
               (1.0 + alpha);

  st.P_prev = st.P;
  st.P = std::move(P_new);
  st.x = std::move(x_new);
  st.y = std::move(y_new);
  st.g_last = std::move(g_new);
  st.alpha_prev = alpha;
  st.k += 1;
  if (!x_star.empty()) st.r_running = std::max(st.r_running, linf_dist(st.y, x_star));
  st.alpha = residual_alpha(st, p);
}

double linf(const Vec& a, const Vec& b) { return linf_dist(a, b); }

}  // namespace

double adamshang_vs_solved_form(std::int64_t steps, std::size_t dim, int power,
                                std::uint64_t seed, const AdamShangParams& params,
                                const NoiseSpec& noise, double x0_fill) {
  PiecewisePowerObjective f(dim, power);
  const Vec x0(dim, x0_fill);
  const Vec P0(dim, 1.0);
  const Vec& x_star = *f.minimizer();

  RngStream rng_a(seed, 1);
  RngStream rng_b(seed, 1);
  GradientFn grad_a = make_noisy_grad(f, noise, rng_a);
  GradientFn grad_b = make_noisy_grad(f, noise, rng_b);

  AdamShangState a = adamshang_init(x0, x0, DiagMetric{Vec(P0)}, params, grad_a, &x_star);
  SolvedFormState b = solved_init(x0, x0, P0, params, grad_b, x_star);

  double max_dev = 0.0;
  for (std::int64_t t = 0; t < steps; ++t) {
    adamshang_step(a, params, grad_a);
    solved_step(b, params, grad_b, x_star);
    if (a.halted) throw std::runtime_error("adamshang_vs_solved_form: run halted");
    max_dev = std::max(max_dev, linf(a.x, b.x) + linf(a.y, b.y) + linf(a.P.diag, b.P));
  }
  return max_dev;
}

double adamshang_vs_residual_form(std::int64_t steps, std::size_t dim, int power,
                                  std::uint64_t seed, const AdamShangParams& params,
                                  const NoiseSpec& noise, double x0_fill) {
  PiecewisePowerObjective f(dim, power);
  const Vec x0(dim, x0_fill);
  const Vec P0(dim, 1.0);
  const Vec& x_star = *f.minimizer();

  RngStream rng_a(seed, 1);
  RngStream rng_b(seed, 1);
  GradientFn grad_a = make_noisy_grad(f, noise, rng_a);
  GradientFn grad_b = make_noisy_grad(f, noise, rng_b);

  AdamShangState a = adamshang_init(x0, x0, DiagMetric{Vec(P0)}, params, grad_a, &x_star);
  ResidualFormState b = residual_init(x0, x0, P0, params, grad_b, x_star);

  double max_dev = 0.0;
  for (std::int64_t t = 0; t < steps; ++t) {
    adamshang_step(a, params, grad_a);
    residual_step(b, params, grad_b, x_star);
    if (a.halted) throw std::runtime_error("adamshang_vs_residual_form: run halted");
    max_dev = std::max(max_dev, linf(a.x, b.x) + linf(a.y, b.y) + linf(a.P.diag, b.P));
  }
  return max_dev;
}

double adamshang_s_vs_adam_form(std::int64_t steps, std::size_t dim, int power,
                                std::uint64_t seed, const AdamShangParams& params,
                                const NoiseSpec& noise, double x0_fill) {
  PiecewisePowerObjective f(dim, power);
  const Vec x0(dim, x0_fill);
  const DiagMetric P0 = DiagMetric::identity(dim);
  const Vec& x_star = *f.minimizer();

  RngStream rng_a(seed, 1);
  RngStream rng_b(seed, 1);
  GradientFn grad_a = make_noisy_grad(f, noise, rng_a);
  GradientFn grad_b = make_noisy_grad(f, noise, rng_b);

  AdamShangSState a = adamshang_s_init(x0, x0, P0, params, grad_a, &x_star);
  AdamShangSAdamFormState b = adamshang_s_adamform_init(x0, x0, P0, params, grad_b, &x_star);

  double max_dev = 0.0;
  for (std::int64_t t = 0; t < steps; ++t) {
    adamshang_s_step(a, params, grad_a);
    adamshang_s_adamform_step(b, params, grad_b);
    if (a.halted || b.halted) throw std::runtime_error("adamshang_s_vs_adam_form: run halted");
    Vec sqrtV(dim), y_b(dim);
    for (std::size_t i = 0; i < dim; ++i) sqrtV[i] = std::sqrt(b.V.diag[i]);
    y_b = adamform_implied_y(b, params.epsilon);
    max_dev = std::max(max_dev, linf(a.x, b.x) + linf(a.y, y_b) + linf(a.P.diag, sqrtV));
  }
  return max_dev;
}

double adamshang_collapse_vs_shang(std::int64_t steps, std::size_t dim, int power, double sigma1,
                                   double x0_fill) {
  PiecewisePowerObjective f(dim, power);
  const Vec x0(dim, x0_fill);
  const Vec& x_star = *f.minimizer();

  GradientFn grad = [&f](const Vec& x) { return f.gradient(x); };

  AdamShangParams collapse;
  collapse.mode = AdamShangMode::shang_collapse;
  collapse.sigma1 = sigma1;
  collapse.smoothness_L = f.smoothness();
  collapse.epsilon = 0.0;

  ShangParams shp;
  shp.sigma1 = sigma1;
  shp.smoothness_L = f.smoothness();

  AdamShangState a =
      adamshang_init(x0, x0, DiagMetric::identity(dim), collapse, grad, &x_star);
  ShangState b = shang_init(x0, x0, grad);

  double max_dev = 0.0;
  for (std::int64_t t = 0; t < steps; ++t) {
    adamshang_step(a, collapse, grad);
    shang_step(b, shp, grad);
    if (a.halted || b.halted) throw std::runtime_error("adamshang_collapse_vs_shang: run halted");
    max_dev = std::max(max_dev, linf(a.x, b.x) + linf(a.y, b.y));
  }
  return max_dev;
}

}  // namespace ashang
