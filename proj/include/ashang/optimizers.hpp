#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ashang/numerics.hpp"
#include "ashang/problems.hpp"

namespace ashang {

/// Evaluates one (possibly stochastic) gradient at the given point. Each
/// optimizer step calls it exactly once; the two-gradient schemes keep the
/// previous sample in state.
using GradientFn = std::function<Vec(const Vec&)>;

/// P entries at or below this floor halt the run instead of feeding a
/// near-singular inverse into the next step.
inline constexpr double kPositivityFloor = 1e-300;

/// scale * sqrt( Tr((P+eps I)^-1) / Tr((P+eps I)^-2) ).
/// The ratio of traces lies in [min_i(p_i+eps), max_i(p_i+eps)].
double trace_ratio_stepsize(const DiagMetric& P, double eps, double scale);

// ---------------------------------------------------------------------------
// Adam-SHANG (lagged preconditioner) and Adam-SHANG-s (synchronous variant)
// ---------------------------------------------------------------------------

enum class AdamShangMode {
  /// alpha = lambda * sqrt(trace ratio), fixed beta and gamma.
  training,
  /// Coupled parameters for the smooth convex setting:
  /// alpha = lambda/(1+sigma1^2) * sqrt(trace ratio / (2L)) for the lagged
  /// scheme (6L for the synchronous one), correction coefficient
  /// eta = 2 alpha^2 (1+sigma1^2) (3 atilde^2 for synchronous) and
  /// gamma = alpha / R^2 (atilde / (2R^2)), R tracked dynamically.
  convex_coupled,
  /// alpha = lambda * sqrt(trace ratio) with independent beta, gamma
  /// (the online stress-test parameterization). epsilon defaults to 0.
  decoupled,
  /// Scalar prescribed metric P_k = alpha_k^2 (1+sigma1^2)^2 L with
  /// alpha_k = 2/(k+1), gamma = 0 and preconditioned correction
  /// coefficient 1/((1+sigma1^2) L). Collapses the scheme onto the
  /// non-adaptive accelerated baseline; used for the reduction check.
  shang_collapse,
};

/// Which step's alpha builds the coupled correction coefficient.
/// `current_alpha` applies eta_k = 2 alpha_k^2 (1+sigma1^2) at step k
/// (the experiment protocol); `lagged_alpha` applies
/// eta_k = 2 alpha_{k-1}^2 (1+sigma1^2) with alpha_{-1} := alpha_0
/// (the convergence-theorem coupling). They agree at step 0.
enum class CouplingIndex { current_alpha, lagged_alpha };

struct AdamShangParams {
  AdamShangMode mode = AdamShangMode::training;
  double lambda = 0.5;
  double beta = 0.05;        // training/decoupled correction strength
  double gamma = 0.001;      // training/decoupled preconditioner forcing
  double epsilon = 1e-8;     // added inside every inverse; use 0 when coupled
  double sigma1 = 0.0;       // coupled modes
  double smoothness_L = 1.0; // coupled modes
  CouplingIndex coupling = CouplingIndex::current_alpha;
  std::optional<BoxRegion> box;    // clamp the iterate right after its update
  bool box_clamps_y = true;        // false: only x is constrained (online domain
                                   // constraint on the played iterate)
  std::optional<BoxRegion> y_box;  // separate stability region for y, wider than
                                   // the domain so the weighted projection never
                                   // grinds against the domain boundary
};

struct AdamShangState {
  Vec x, y;
  DiagMetric P;       // P_k
  DiagMetric P_prev;  // P_{k-1}; equals P at init
  Vec g_last;         // g_k, sampled at x_k
  Vec x_star;         // empty when unknown
  Vec x_unclamped;    // x-update output before the box projection (box runs only)

  // Plan for the upcoming step, prepared at the end of the previous one so
  // diagnostics see exactly what the algorithm will apply.
  double alpha_next = 0.0;        // alpha_k
  double trace_ratio_next = 0.0;  // trace ratio under alpha_next
  double eta_next = 0.0;          // correction coefficient (see corr_next)
  Vec corr_next;                  // eta_k (P_{k-1}+eps I)^-1 g_k, the exact
                                  // vector the next x-update subtracts

  double alpha_prev = 0.0;  // alpha_{k-1}, bootstrapped to alpha_0
  double r_running = 0.0;   // sup_{j<=k} ||y_j - x*||_inf
  std::int64_t k = 0;
  bool halted = false;
};

/// Samples g_0 at x0 and prepares the first step. `x_star` may be null;
/// convex_coupled requires either a known minimizer or a configured box
/// (R then equals 2 * half_width).
AdamShangState adamshang_init(const Vec& x0, const Vec& y0, const DiagMetric& P0,
                              const AdamShangParams& params, const GradientFn& grad,
                              const Vec* x_star);

void adamshang_step(AdamShangState& st, const AdamShangParams& params, const GradientFn& grad);

struct AdamShangSState {
  Vec x, y;
  DiagMetric P;  // P_k; the synchronous scheme needs no lag
  Vec g_last;
  Vec x_star;
  Vec x_unclamped;

  double alpha_next = 0.0;
  double atilde_next = 0.0;  // alpha/(1+alpha)
  double trace_ratio_next = 0.0;
  double eta_next = 0.0;
  Vec corr_next;  // eta_k (P_k+eps I)^-1 g_k

  double atilde_prev = 0.0;
  double r_running = 0.0;
  std::int64_t k = 0;
  bool halted = false;
};

AdamShangSState adamshang_s_init(const Vec& x0, const Vec& y0, const DiagMetric& P0,
                                 const AdamShangParams& params, const GradientFn& grad,
                                 const Vec* x_star);

void adamshang_s_step(AdamShangSState& st, const AdamShangParams& params, const GradientFn& grad);

/// Positive root of p^2 - (1-atilde) p_k p - atilde gamma g^2 = 0, the
/// per-coordinate synchronous preconditioner update.
double sync_precond_root(double p_k, double atilde, double gamma, double g);

/// Adam-shaped representation of the synchronous scheme: state (x, m, V)
/// with P = sqrt(V) and (P+eps I)^-1 m = x - y. Maintained alongside the
/// (x, y, P) form for the change-of-variables equivalence check.
struct AdamShangSAdamFormState {
  Vec x, m;
  DiagMetric V;
  Vec g_last;
  Vec x_star;

  double alpha_next = 0.0;
  double beta_next = 0.0;  // coefficient on g in (m + beta g)
  double trace_ratio_next = 0.0;

  double atilde_prev = 0.0;
  double r_running = 0.0;
  std::int64_t k = 0;
  bool halted = false;
};

AdamShangSAdamFormState adamshang_s_adamform_init(const Vec& x0, const Vec& y0,
                                                  const DiagMetric& P0,
                                                  const AdamShangParams& params,
                                                  const GradientFn& grad, const Vec* x_star);

void adamshang_s_adamform_step(AdamShangSAdamFormState& st, const AdamShangParams& params,
                               const GradientFn& grad);

/// y implied by the Adam-form state through (P+eps I)^-1 m = x - y.
Vec adamform_implied_y(const AdamShangSAdamFormState& st, double epsilon);

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

struct SgdParams {
  double eta = 1e-3;
  std::optional<BoxRegion> box;
};

struct SgdState {
  Vec x;
  Vec x_unclamped;
  std::int64_t k = 0;
  bool halted = false;
};

void sgd_step(SgdState& st, const SgdParams& params, const GradientFn& grad);

/// Non-adaptive accelerated baseline: the scalar-metric, gamma = 0 instance
/// of the lagged scheme with alpha_k = 2/(k+1), P_k = alpha_k^2 (1+sigma1^2)^2 L
/// and preconditioned correction coefficient 1/((1+sigma1^2) L).
struct ShangParams {
  double sigma1 = 0.0;
  double smoothness_L = 1.0;
  std::optional<BoxRegion> box;
};

struct ShangState {
  Vec x, y;
  Vec g_last;
  Vec x_unclamped;
  std::int64_t k = 0;
  bool halted = false;
};

ShangState shang_init(const Vec& x0, const Vec& y0, const GradientFn& grad);
void shang_step(ShangState& st, const ShangParams& params, const GradientFn& grad);
double shang_alpha(std::int64_t k);
double shang_scalar_metric(std::int64_t k, double sigma1, double smoothness_L);

/// Adam without bias correction; one iteration is
///   x_{k+1} = x_k - eta_k (sqrt(V_k)+eps I)^-1 m_k,
///   m_{k+1} = theta1 m_k + (1-theta1) g_{k+1},
///   V_{k+1} = theta2 V_k + (1-theta2) g_{k+1}.^2,
/// with g_{k+1} sampled at x_{k+1}. AMSGrad replaces the denominator by the
/// running coordinatewise max of V.
struct AdamParams {
  double eta0 = 1e-3;
  bool sqrt_decay = false;  // eta_k = eta0 / sqrt(k+1)
  double theta1 = 0.9;
  double theta2 = 0.999;
  double epsilon = 1e-8;
  bool amsgrad = false;
  std::optional<BoxRegion> box;
};

struct AdamState {
  Vec x, m, V;
  Vec V_hat;        // AMSGrad running max
  Vec x_unclamped;  // pre-projection iterate (box runs only)
  std::int64_t k = 0;
  bool halted = false;
};

AdamState adam_init(const Vec& x0);
void adam_step(AdamState& st, const AdamParams& params, const GradientFn& grad);
void amsgrad_step(AdamState& st, const AdamParams& params, const GradientFn& grad);

// ---------------------------------------------------------------------------
// Checkpointing: states flatten to named real arrays (scalars as length-1).
// ---------------------------------------------------------------------------

using NamedArrays = std::vector<std::pair<std::string, Vec>>;

NamedArrays state_arrays(const AdamShangState& st);
void restore_state(AdamShangState& st, const NamedArrays& arrays);
NamedArrays state_arrays(const AdamState& st);
void restore_state(AdamState& st, const NamedArrays& arrays);

}  // namespace ashang
