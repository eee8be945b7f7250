// Python bindings for the core operations: the benchmark oracle, the noise
// model, the stepsize rule, the envelope/diagnostic quantities, the dual-form
// equivalence checks and the experiment runner.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>

#include "ashang/config.hpp"
#include "ashang/diagnostics.hpp"
#include "ashang/equivalence.hpp"
#include "ashang/harness.hpp"

namespace py = pybind11;
using namespace ashang;

namespace {

NoiseSpec make_noise(double sigma0, double sigma1) { return NoiseSpec{sigma0, sigma1}; }

AdamShangParams coupled_params(double lambda, double sigma1, double smoothness_L) {
  AdamShangParams p;
  p.mode = AdamShangMode::convex_coupled;
  p.lambda = lambda;
  p.epsilon = 0.0;
  p.sigma1 = sigma1;
  p.smoothness_L = smoothness_L;
  return p;
}

// label -> column -> mean series
using SeriesDict = std::map<std::string, std::map<std::string, std::vector<double>>>;

SeriesDict run_experiment_ini(const std::string& config_text) {
  ConfigMap raw = parse_config_text(config_text);
  const ExperimentConfig cfg = load_experiment_config(raw);
  const auto results = run_experiment(cfg);
  SeriesDict out;
  for (const auto& res : results) {
    auto& columns = out[res.label];
    for (std::size_t c = 0; c < res.agg.columns.size(); ++c) {
      std::vector<double> series(res.agg.mean.size());
      for (std::size_t r = 0; r < series.size(); ++r) series[r] = res.agg.mean[r][c];
      columns[res.agg.columns[c]] = std::move(series);
    }
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trace-ratio adaptive optimization: core operations";

  py::class_<PiecewisePowerObjective>(m, "PiecewisePower",
                                      "sum_i f_p(x_i) with f_p(t) = |t|^p inside the unit box "
                                      "and the linear continuation outside; L = p(p-1)")
      .def(py::init<std::size_t, int>(), py::arg("dim"), py::arg("power"))
      .def("value", &PiecewisePowerObjective::value)
      .def("gradient", &PiecewisePowerObjective::gradient)
      .def_property_readonly("smoothness", &PiecewisePowerObjective::smoothness)
      .def_property_readonly("dim", &PiecewisePowerObjective::dim);

  m.def(
      "trace_ratio_stepsize",
      [](const Vec& diag, double eps, double scale) {
        return trace_ratio_stepsize(DiagMetric(Vec(diag)), eps, scale);
      },
      py::arg("diag"), py::arg("eps") = 0.0, py::arg("scale") = 1.0);

  m.def(
      "sample_gradient",
      [](const PiecewisePowerObjective& f, const Vec& x, double sigma0, double sigma1,
         std::uint64_t seed, std::uint64_t stream) {
        RngStream rng(seed, stream);
        return sample_stochastic_gradient(x, f, make_noise(sigma0, sigma1), rng);
      },
      py::arg("objective"), py::arg("x"), py::arg("sigma0"), py::arg("sigma1"),
      py::arg("seed") = 0, py::arg("stream") = 0);

  m.def(
      "conditional_second_moment",
      [](const PiecewisePowerObjective& f, const Vec& x, double sigma0, double sigma1) {
        return conditional_second_moment(x, f, make_noise(sigma0, sigma1));
      },
      py::arg("objective"), py::arg("x"), py::arg("sigma0"), py::arg("sigma1"));

  m.def(
      "bregman",
      [](const PiecewisePowerObjective& f, const Vec& y, const Vec& x) {
        return bregman(f, y, x);
      },
      py::arg("objective"), py::arg("y"), py::arg("x"));

  m.def("average_regret", &average_regret, py::arg("losses"), py::arg("coeffs"));
  m.def("contraction_product", &contraction_product, py::arg("alphas"));
  m.def("contraction_telescoped", &contraction_telescoped, py::arg("a"), py::arg("b"),
        py::arg("k"));
  m.def("noise_accumulation", &noise_accumulation, py::arg("alphas_lo"), py::arg("alphas_hi"));
  m.def("noise_accumulation_constant", &noise_accumulation_constant, py::arg("lo"),
        py::arg("hi"), py::arg("k"));
  m.def("trace_lower_bound_check", &trace_lower_bound_check, py::arg("s"), py::arg("p"));
  m.def("count_ordering_violations", &count_ordering_violations, py::arg("s"), py::arg("p"));
  m.def("theorem_bound_series", &theorem_bound_series, py::arg("alphas"), py::arg("sigma0"),
        py::arg("initial_energy"), py::arg("count"));

  m.def(
      "form_equivalence",
      [](std::int64_t steps, std::size_t dim, int power, std::uint64_t seed, double lambda,
         double sigma1, double x0) {
        PiecewisePowerObjective f(dim, power);
        const AdamShangParams p = coupled_params(lambda, sigma1, f.smoothness());
        const NoiseSpec noise{0.0, sigma1};
        return py::make_tuple(adamshang_vs_solved_form(steps, dim, power, seed, p, noise, x0),
                              adamshang_vs_residual_form(steps, dim, power, seed, p, noise, x0));
      },
      py::arg("steps") = 1000, py::arg("dim") = 16, py::arg("power") = 16, py::arg("seed") = 1,
      py::arg("lambda_") = 0.5, py::arg("sigma1") = 10.0, py::arg("x0") = 1.0,
      "Max deviations of the solved and residual forms from the per-step form");

  m.def(
      "adam_form_equivalence",
      [](std::int64_t steps, std::size_t dim, int power, std::uint64_t seed, double lambda,
         double sigma1, double x0) {
        PiecewisePowerObjective f(dim, power);
        const AdamShangParams p = coupled_params(lambda, sigma1, f.smoothness());
        return adamshang_s_vs_adam_form(steps, dim, power, seed, p, NoiseSpec{0.0, sigma1}, x0);
      },
      py::arg("steps") = 1000, py::arg("dim") = 16, py::arg("power") = 16, py::arg("seed") = 1,
      py::arg("lambda_") = 0.5, py::arg("sigma1") = 10.0, py::arg("x0") = 1.0);

  m.def("collapse_deviation", &adamshang_collapse_vs_shang, py::arg("steps") = 1000,
        py::arg("dim") = 16, py::arg("power") = 16, py::arg("sigma1") = 10.0,
        py::arg("x0") = 1.0);

  m.def(
      "energy_trace",
      [](std::int64_t steps, std::size_t dim, int power, double lambda, double sigma0,
         double sigma1, std::uint64_t seed, double x0) {
        const EnergyTrace t = adamshang_energy_trace(steps, dim, power, lambda,
                                                     make_noise(sigma0, sigma1), seed,
                                                     CouplingIndex::current_alpha, x0);
        return py::make_tuple(t.energy, t.alpha);
      },
      py::arg("steps"), py::arg("dim") = 16, py::arg("power") = 16, py::arg("lambda_") = 0.5,
      py::arg("sigma0") = 0.0, py::arg("sigma1") = 0.0, py::arg("seed") = 1,
      py::arg("x0") = 1.0, "Pathwise Lyapunov energies E_0..E_T and stepsizes alpha_0..alpha_T");

  m.def("run_experiment", &run_experiment_ini, py::arg("config_text"),
        "Run a configured experiment; returns {optimizer: {column: mean series}}");

  m.attr("__version__") = kLibraryVersion;
}
