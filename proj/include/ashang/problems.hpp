#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ashang/numerics.hpp"
#include "ashang/rng.hpp"

namespace ashang {

/// Smooth convex objective with exact value/gradient and a smoothness
/// constant. The minimizer is reported when known in closed form.
class ObjectiveOracle {
 public:
  virtual ~ObjectiveOracle() = default;

  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual std::size_t dim() const = 0;
  virtual double smoothness() const = 0;

  /// nullptr when the minimizer is unknown.
  virtual const Vec* minimizer() const { return nullptr; }
  double min_value() const;
};

/// f(x) = sum_i f_p(x_i) with f_p(t) = |t|^p for |t| <= 1 and
/// 1 + p(|t| - 1) otherwise. Smooth with L = p(p-1); minimizer x* = 0.
/// The two branches of the derivative agree at |t| = 1 (both give
/// p*sign(t)), so no tie-break is needed at the seam.
class PiecewisePowerObjective : public ObjectiveOracle {
 public:
  PiecewisePowerObjective(std::size_t dim, int power);

  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  std::size_t dim() const override { return dim_; }
  double smoothness() const override;
  const Vec* minimizer() const override { return &minimizer_; }

  int power() const { return power_; }

 private:
  std::size_t dim_;
  int power_;
  Vec minimizer_;
};

double bregman(const ObjectiveOracle& f, const Vec& y, const Vec& x);

/// Additive-multiplicative gradient noise:
///   g_i = (1 + sigma1 Z_i) df_i(x) + (sigma0 / sqrt(d)) xi_i,
/// with Z_i, xi_i independent standard normals. Satisfies
///   E||g||^2 = sigma0^2 + (1 + sigma1^2) ||grad f(x)||^2  exactly.
struct NoiseSpec {
  double sigma0 = 0.0;
  double sigma1 = 0.0;
};

/// One noisy gradient sample. Draw order is fixed: per coordinate i
/// (ascending), Z_i then xi_i.
Vec sample_stochastic_gradient(const Vec& x, const ObjectiveOracle& f, const NoiseSpec& noise,
                               RngStream& rng);

/// Exact conditional second moment of the model above:
///   s_i = (1 + sigma1^2) (df_i(x))^2 + sigma0^2 / d.
Vec conditional_second_moment(const Vec& x, const ObjectiveOracle& f, const NoiseSpec& noise);

// ---------------------------------------------------------------------------
// Online stress-test adversary: linear losses f_t(x) = c_t * x on [-1, 1]
// with c_t = 1010 on "spike" rounds and -10 otherwise. Spikes are
// t mod 101 == 1 in the deterministic sequence (rounds count from t = 1,
// so the very first round is a spike) and an independent 0.01-coin in the
// stochastic one. The mean coefficient is positive, so x* = -1.
// ---------------------------------------------------------------------------

enum class CounterexampleVariant { deterministic, stochastic };

struct CounterexampleMode {
  CounterexampleVariant variant = CounterexampleVariant::deterministic;
  double half_width = 1.0;  // domain is [-1, 1]
};

/// Loss coefficient (= gradient, the losses are linear) of round t >= 1.
double counterexample_coeff(std::int64_t t, const CounterexampleMode& mode, RngStream& rng);

/// Per-round average regret R_t / t with
///   R_t = sum_{s<=t} losses[s] - min_{|x|<=1} sum_{s<=t} coeffs[s] * x,
/// the hindsight minimum taken over the two endpoints (the cumulative
/// objective is linear in x). Throws on empty input.
std::vector<double> average_regret(const std::vector<double>& losses,
                                   const std::vector<double>& coeffs);

}  // namespace ashang
