// Command-line driver: experiment protocols, diagnostics series, the
// verification suite and grid search. Exit codes: 0 success, 1 verification
// failure, 2 usage/config error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ashang/config.hpp"
#include "ashang/diagnostics.hpp"
#include "ashang/equivalence.hpp"
#include "ashang/harness.hpp"

namespace {

using namespace ashang;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string seed;
  std::string runs;
  std::string steps;
  std::string jobs;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Configuration file (INI sections; default: none)");
  cmd->add_option("--set", args.overrides,
                  "Override: section.key=value, repeatable (default: none)");
  cmd->add_option("--out", args.out_dir, "Output directory (default: out)");
  cmd->add_option("--seed", args.seed, "Base seed, u64 (default: 12345)");
  cmd->add_option("--runs", args.runs,
                  "Independent runs per optimizer (default: 50 convex, 1/30 stress test)");
  cmd->add_option("--steps", args.steps,
                  "Steps; rounds for the stress test (default: 10000 convex, 100000 stress)");
  cmd->add_option("--jobs", args.jobs, "Worker threads for run fan-out (default: 1)");
}

ConfigMap build_config(const CommonArgs& args, const std::string& default_problem) {
  ConfigMap cfg;
  if (!args.config_path.empty()) cfg = parse_config_file(args.config_path);
  if (cfg.values.find("experiment.problem") == cfg.values.end())
    cfg.values["experiment.problem"] = default_problem;
  for (const auto& ov : args.overrides) apply_override(cfg, ov);
  if (!args.out_dir.empty()) cfg.values["experiment.out_dir"] = args.out_dir;
  if (!args.seed.empty()) cfg.values["experiment.base_seed"] = args.seed;
  if (!args.runs.empty()) cfg.values["experiment.runs"] = args.runs;
  if (!args.steps.empty()) cfg.values["experiment.steps"] = args.steps;
  if (!args.jobs.empty()) cfg.values["experiment.jobs"] = args.jobs;
  return cfg;
}

int run_protocol(const ConfigMap& raw) {
  const ExperimentConfig cfg = load_experiment_config(raw);
  const auto results = run_experiment(cfg);
  write_outputs(cfg, raw, results);
  for (const auto& res : results) {
    const auto& agg = res.agg;
    std::printf("%-14s runs=%d diverged=%d", res.label.c_str(), agg.runs_total,
                agg.runs_diverged);
    if (!agg.mean.empty()) {
      if (cfg.counterexample()) {
        const auto& cols = agg.columns;
        for (std::size_t c = 0; c < cols.size(); ++c)
          if (cols[c] == "x")
            std::printf("  final mean x=%.6g median x=%.6g", agg.mean.back()[c],
                        agg.median.back()[c]);
      } else {
        std::printf("  final mean f_gap=%.6g", agg.mean.back()[1]);
      }
    }
    std::printf("\n");
  }
  std::printf("wrote %s/%s_*.csv\n", cfg.out_dir.c_str(), experiment_stem(cfg).c_str());
  return 0;
}

bool report(const char* name, double value, double tol) {
  const bool ok = value <= tol;
  std::printf("[%s] %-38s %.3e (tol %.1e)\n", ok ? "PASS" : "FAIL", name, value, tol);
  return ok;
}

// Fast oracle subset: form equivalences, trace bound, envelope oracles,
// theorem bound check on a noiseless run.
int run_verify() {
  bool all_ok = true;

  AdamShangParams coupled;
  coupled.mode = AdamShangMode::convex_coupled;
  coupled.lambda = 0.5;
  coupled.epsilon = 0.0;
  coupled.sigma1 = 10.0;
  coupled.smoothness_L = 240.0;
  const NoiseSpec noise{0.0, 10.0};

  all_ok &= report("form equivalence (solved form)",
                   adamshang_vs_solved_form(1000, 16, 16, 2024, coupled, noise), 1e-10);
  all_ok &= report("form equivalence (residual form)",
                   adamshang_vs_residual_form(1000, 16, 16, 2024, coupled, noise), 1e-10);

  AdamShangParams coupled_s = coupled;
  coupled_s.mode = AdamShangMode::convex_coupled;
  all_ok &= report("adam-form equivalence",
                   adamshang_s_vs_adam_form(1000, 16, 16, 2024, coupled_s, noise), 1e-10);
  all_ok &= report("scalar-metric collapse",
                   adamshang_collapse_vs_shang(1000, 16, 16, 10.0), 1e-10);

  {
    RngStream rng(7, 1);
    std::int64_t failures = 0;
    const std::int64_t trials = 20000;
    for (std::int64_t t = 0; t < trials; ++t) {
      const std::size_t d = 2 + static_cast<std::size_t>(rng.next_u64() % 15);
      Vec s(d), p(d);
      for (auto& v : s) v = std::exp(3.0 * rng.next_normal());
      for (auto& v : p) v = std::exp(3.0 * rng.next_normal());
      std::sort(s.begin(), s.end());
      std::sort(p.begin(), p.end());
      if (!trace_lower_bound_check(s, p)) ++failures;
    }
    all_ok &= report("trace lower bound (ordered pairs)", static_cast<double>(failures), 0.0);
    const bool anti_fails = !trace_lower_bound_check(Vec{4.0, 1.0}, Vec{1.0, 2.0});
    all_ok &= report("trace lower bound (anti-ordered)", anti_fails ? 0.0 : 1.0, 0.0);
  }

  {
    double worst = 0.0;
    for (int a : {2, 3}) {
      for (double b : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        std::vector<double> alphas(5000);
        for (std::size_t k = 0; k < alphas.size(); ++k)
          alphas[k] = static_cast<double>(a) / (static_cast<double>(k) + b);
        const auto rho = contraction_product(alphas);
        for (std::size_t k = 0; k < alphas.size(); k += 97) {
          const double oracle = contraction_telescoped(a, b, static_cast<std::int64_t>(k));
          worst = std::max(worst, std::abs(rho[k] - oracle) / oracle);
        }
      }
    }
    all_ok &= report("contraction telescoping oracle", worst, 1e-10);

    const std::vector<double> lo(2000, 0.3), hi(2000, 0.5);
    const auto psi = noise_accumulation(lo, hi);
    double worst_psi = 0.0;
    for (std::size_t k = 0; k < psi.size(); k += 41) {
      const double closed = noise_accumulation_constant(0.3, 0.5, static_cast<std::int64_t>(k));
      worst_psi = std::max(worst_psi, std::abs(psi[k] - closed) / closed);
    }
    all_ok &= report("noise accumulation closed form", worst_psi, 1e-12);
    const double limit = 0.5 * 0.5 / 0.3;
    all_ok &= report("noise accumulation limit", std::abs(psi.back() - limit), 1e-6);
  }

  {
    const EnergyTrace trace =
        adamshang_energy_trace(2000, 16, 16, 0.5, NoiseSpec{0.0, 0.0}, 1);
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < trace.energy.size(); ++k) {
      const double bound = trace.energy[k] / (1.0 + trace.alpha[k]) + 1e-12;
      worst = std::max(worst, trace.energy[k + 1] - bound);
    }
    all_ok &= report("noiseless one-step decay", worst, 0.0);
    const double excess =
        theorem_bound_check(trace.energy, trace.alpha, 0.0, trace.energy.front());
    all_ok &= report("noiseless cumulative bound", excess, 1e-10);
  }

  std::printf(all_ok ? "verification suite: all checks passed\n"
                     : "verification suite: FAILURES\n");
  return all_ok ? 0 : 1;
}

int run_diagnose(const ConfigMap& raw) {
  ConfigMap cfg_map = raw;
  // The diagnostic series only concern the coupled lagged scheme.
  cfg_map.values["optimizers.enabled"] = "adam_shang";
  const ExperimentConfig cfg = load_experiment_config(cfg_map);
  if (cfg.counterexample()) {
    std::fprintf(stderr, "diagnose: applies to the convex benchmark\n");
    return 2;
  }
  const auto results = run_experiment(cfg);
  write_outputs(cfg, cfg_map, results);

  const auto& agg = results.front().agg;
  std::size_t ratio_col = 0, viol_col = 0;
  bool have_ratio = false, have_viol = false;
  for (std::size_t c = 0; c < agg.columns.size(); ++c) {
    if (agg.columns[c] == "ratio") ratio_col = c, have_ratio = true;
    if (agg.columns[c] == "violations") viol_col = c, have_viol = true;
  }
  if (have_ratio) {
    double min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& row : agg.min) min_ratio = std::min(min_ratio, row[ratio_col]);
    std::printf("min admissibility ratio over runs/steps: %.6g (>= 1 expected)\n", min_ratio);
  }
  if (have_viol) {
    const double pairs = static_cast<double>(cfg.d * (cfg.d - 1) / 2);
    double early = 0.0, late = 0.0;
    for (std::size_t r = 0; r < agg.mean.size(); ++r) {
      const double rho = agg.mean[r][viol_col] / pairs;
      if (r < agg.mean.size() / 10) early = std::max(early, rho);
      if (r >= agg.mean.size() - std::max<std::size_t>(1, agg.mean.size() / 10))
        late = std::max(late, rho);
    }
    std::printf("ordering violation rate: early max %.4f, final-window max %.4f\n", early, late);
  }
  return 0;
}

int run_grid(const ConfigMap& raw, const std::string& method_name_arg, const std::string& param,
             const std::vector<double>& values) {
  const ExperimentConfig cfg = load_experiment_config(raw);
  const Method method = method_from_name(method_name_arg);
  const GridResult grid = grid_search(cfg, method, param, values);
  for (const auto& pt : grid.table)
    std::printf("%s=%-12g objective=%-14.6g diverged=%.2f%s\n", param.c_str(), pt.value,
                pt.objective, pt.diverged_fraction, pt.usable ? "" : "  [excluded]");
  std::printf("best %s = %g (objective %.6g)\n", param.c_str(), grid.best_value,
              grid.best_objective);
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/grid_" + method_name_arg + "_" + param + ".csv";
  write_grid_table(path, grid);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic optimization experiments: trace-ratio adaptive schemes, baselines, "
               "diagnostics and the verification suite"};
  app.require_subcommand(1);

  CommonArgs convex_args, ce_args, diag_args, grid_args;

  CLI::App* convex = app.add_subcommand("convex", "Convex benchmark protocol");
  add_common(convex, convex_args);

  CLI::App* ce = app.add_subcommand("counterexample", "Online stress-test protocol");
  add_common(ce, ce_args);
  bool ce_stochastic = false;
  ce->add_flag("--stochastic", ce_stochastic,
               "Random spikes instead of the periodic sequence (default: off)");

  CLI::App* diag = app.add_subcommand("diagnose", "Admissibility and alignment series");
  add_common(diag, diag_args);

  CLI::App* verify = app.add_subcommand("verify", "Property and oracle suite");

  CLI::App* grid = app.add_subcommand("grid", "Grid search over one parameter");
  add_common(grid, grid_args);
  std::string grid_method = "adam";
  std::string grid_param = "eta0";
  std::vector<double> grid_values;
  grid->add_option("--method", grid_method, "Optimizer to tune (default: adam)");
  grid->add_option("--param", grid_param, "Parameter name: eta0, eta, lambda (default: eta0)");
  grid->add_option("--values", grid_values,
                   "Grid values (default: 1e-3,3e-3,1e-2,3e-2,1e-1,3e-1,1)")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0; any parse problem is a usage error
  }

  try {
    if (convex->parsed()) return run_protocol(build_config(convex_args, "convex_benchmark"));
    if (ce->parsed()) {
      ConfigMap raw = build_config(
          ce_args, ce_stochastic ? "counterexample_stoch" : "counterexample_det");
      return run_protocol(raw);
    }
    if (diag->parsed()) return run_diagnose(build_config(diag_args, "convex_benchmark"));
    if (verify->parsed()) return run_verify();
    if (grid->parsed()) {
      if (grid_values.empty())
        grid_values = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0};
      return run_grid(build_config(grid_args, "convex_benchmark"), grid_method, grid_param,
                      grid_values);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
