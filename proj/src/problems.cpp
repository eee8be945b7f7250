#include "ashang/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ashang {

double ObjectiveOracle::min_value() const {
  const Vec* xs = minimizer();
  if (xs == nullptr) throw std::logic_error("ObjectiveOracle: minimizer unknown");
  return value(*xs);
}

PiecewisePowerObjective::PiecewisePowerObjective(std::size_t dim, int power)
    : dim_(dim), power_(power), minimizer_(dim, 0.0) {
  if (dim < 1) throw std::invalid_argument("PiecewisePowerObjective: dim must be >= 1");
  if (power < 2) throw std::invalid_argument("PiecewisePowerObjective: power must be >= 2");
}

double PiecewisePowerObjective::value(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("PiecewisePowerObjective: dimension mismatch");
  const double p = static_cast<double>(power_);
  double s = 0.0;
  for (double t : x) {
    const double a = std::abs(t);
    s += (a <= 1.0) ? std::pow(a, p) : 1.0 + p * (a - 1.0);
  }
  return s;
}

Vec PiecewisePowerObjective::gradient(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("PiecewisePowerObjective: dimension mismatch");
  const double p = static_cast<double>(power_);
  Vec g(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double t = x[i];
    const double a = std::abs(t);
    const double sign = (t > 0.0) ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
    g[i] = (a <= 1.0) ? p * std::pow(a, p - 1.0) * sign : p * sign;
  }
  return g;
}

double PiecewisePowerObjective::smoothness() const {
  const double p = static_cast<double>(power_);
  return p * (p - 1.0);
}

double bregman(const ObjectiveOracle& f, const Vec& y, const Vec& x) {
  const Vec gx = f.gradient(x);
  double corr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) corr += gx[i] * (y[i] - x[i]);
  return f.value(y) - f.value(x) - corr;
}

Vec sample_stochastic_gradient(const Vec& x, const ObjectiveOracle& f, const NoiseSpec& noise,
                               RngStream& rng) {
  Vec g = f.gradient(x);
  const double add = noise.sigma0 / std::sqrt(static_cast<double>(g.size()));
  for (double& gi : g) {
    const double z = rng.next_normal();
    const double xi = rng.next_normal();
    gi = (1.0 + noise.sigma1 * z) * gi + add * xi;
  }
  return g;
}

Vec conditional_second_moment(const Vec& x, const ObjectiveOracle& f, const NoiseSpec& noise) {
  Vec s = f.gradient(x);
  const double mult = 1.0 + noise.sigma1 * noise.sigma1;
  const double add = noise.sigma0 * noise.sigma0 / static_cast<double>(s.size());
  for (double& si : s) si = mult * (si * si) + add;
  return s;
}

double counterexample_coeff(std::int64_t t, const CounterexampleMode& mode, RngStream& rng) {
  bool spike = false;
  if (mode.variant == CounterexampleVariant::deterministic) {
    spike = (t % 101 == 1);
  } else {
    spike = (rng.next_uniform() < 0.01);
  }
  return spike ? 1010.0 : -10.0;
}

std::vector<double> average_regret(const std::vector<double>& losses,
                                   const std::vector<double>& coeffs) {
  if (losses.empty()) throw std::invalid_argument("average_regret: empty loss sequence");
  if (losses.size() != coeffs.size())
    throw std::invalid_argument("average_regret: sequence lengths differ");
  std::vector<double> out(losses.size());
  double cum_loss = 0.0;
  double cum_coeff = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    cum_loss += losses[i];
    cum_coeff += coeffs[i];
    const double best = std::min(cum_coeff, -cum_coeff);  // endpoints x = +1 / -1
    out[i] = (cum_loss - best) / static_cast<double>(i + 1);
  }
  return out;
}

}  // namespace ashang
