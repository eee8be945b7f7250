#include "ashang/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace ashang {

namespace {

std::uint64_t stream_id(int opt_index, int run_index) {
  return (static_cast<std::uint64_t>(opt_index) << 32) | static_cast<std::uint64_t>(run_index);
}

bool should_log(std::int64_t k, std::int64_t log_every, std::int64_t total) {
  return k == total || k % log_every == 0;
}

// -------------------------------------------------------------------------
// Convex benchmark runs
// -------------------------------------------------------------------------

std::vector<std::string> convex_columns(Method m, const DiagnosticsFlags& diag, std::size_t d) {
  switch (m) {
    case Method::adam_shang:
    case Method::adam_shang_s: {
      std::vector<std::string> cols = {"step", "f_gap"};
      if (diag.energy) cols.push_back("energy");
      cols.push_back("alpha");
      cols.push_back("trace_ratio");
      if (diag.admissibility) {
        cols.push_back("q");
        cols.push_back("ratio");
      }
      if (diag.alignment && d >= 2) cols.push_back("violations");
      return cols;
    }
    case Method::shang: {
      std::vector<std::string> cols = {"step", "f_gap"};
      if (diag.energy) cols.push_back("energy");
      cols.push_back("alpha");
      return cols;
    }
    default:
      return {"step", "f_gap"};
  }
}

Vec x_plus_from_correction(const Vec& x, const Vec& corr) {
  Vec xp(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xp[i] = x[i] - corr[i];
  return xp;
}

struct ConvexContext {
  const ExperimentConfig& cfg;
  const PiecewisePowerObjective& oracle;
};

void append_shang_family_row(std::vector<std::vector<double>>& rows, const ConvexContext& ctx,
                             std::int64_t step, const Vec& x, const Vec& y,
                             const DiagMetric& P_metric, const DiagMetric& P_for_q,
                             const Vec& corr, double alpha, double trace_ratio, bool halt_row) {
  const auto& cfg = ctx.cfg;
  const auto& f = ctx.oracle;
  std::vector<double> row;
  row.push_back(static_cast<double>(step));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (halt_row) {
    // Terminal diagnostic record for a halted run.
    row.push_back(nan);
    if (cfg.diag.energy) row.push_back(nan);
    row.push_back(alpha);
    row.push_back(trace_ratio);
    if (cfg.diag.admissibility) {
      row.push_back(nan);
      row.push_back(nan);
    }
    if (cfg.diag.alignment && cfg.d >= 2) row.push_back(nan);
    rows.push_back(std::move(row));
    return;
  }
  row.push_back(f.value(x) - f.min_value());
  if (cfg.diag.energy) {
    const LyapunovSample e = lyapunov_energy(x_plus_from_correction(x, corr), y, P_metric, f);
    row.push_back(e.energy);
  }
  row.push_back(alpha);
  row.push_back(trace_ratio);
  if (cfg.diag.admissibility) {
    const AdmissibilityReport rep = admissibility_ratio(x, P_for_q, alpha, cfg.noise, f);
    row.push_back(rep.q);
    row.push_back(rep.ratio);
  }
  if (cfg.diag.alignment && cfg.d >= 2) {
    const Vec s = conditional_second_moment(x, f, cfg.noise);
    row.push_back(static_cast<double>(count_ordering_violations(s, P_for_q.diag)));
  }
  rows.push_back(std::move(row));
}

RunTable run_convex_shang_family(const ExperimentConfig& cfg, const MethodConfig& mc,
                                 int opt_index, int run_index) {
  PiecewisePowerObjective oracle(cfg.d, cfg.power);
  ConvexContext ctx{cfg, oracle};
  RunTable table;
  table.columns = convex_columns(mc.method, cfg.diag, cfg.d);

  RngStream rng(cfg.base_seed, stream_id(opt_index, run_index));
  GradientFn grad = [&](const Vec& x) {
    return sample_stochastic_gradient(x, oracle, cfg.noise, rng);
  };

  const Vec x0(cfg.d, cfg.x0);
  const DiagMetric P0 = DiagMetric::identity(cfg.d, cfg.p_init);
  const Vec& x_star = *oracle.minimizer();
  const bool sync = mc.method == Method::adam_shang_s;

  if (!sync) {
    AdamShangState st = adamshang_init(x0, x0, P0, mc.shang_params, grad, &x_star);
    append_shang_family_row(table.rows, ctx, 0, st.x, st.y, st.P, st.P_prev,
                            st.corr_next, st.alpha_next, st.trace_ratio_next, false);
    for (std::int64_t k = 0; k < cfg.steps; ++k) {
      const double alpha_used = st.alpha_next;
      const double tr_used = st.trace_ratio_next;
      adamshang_step(st, mc.shang_params, grad);
      if (st.halted) {
        append_shang_family_row(table.rows, ctx, k + 1, st.x, st.y, st.P, st.P_prev,
                                st.corr_next, alpha_used, tr_used, true);
        table.diverged = true;
        break;
      }
      if (should_log(k + 1, cfg.log_every, cfg.steps))
        append_shang_family_row(table.rows, ctx, k + 1, st.x, st.y, st.P, st.P_prev,
                                st.corr_next, alpha_used, tr_used, false);
    }
  } else {
    AdamShangSState st = adamshang_s_init(x0, x0, P0, mc.shang_params, grad, &x_star);
    append_shang_family_row(table.rows, ctx, 0, st.x, st.y, st.P, st.P,
                            st.corr_next, st.alpha_next, st.trace_ratio_next, false);
    for (std::int64_t k = 0; k < cfg.steps; ++k) {
      const double alpha_used = st.alpha_next;
      const double tr_used = st.trace_ratio_next;
      adamshang_s_step(st, mc.shang_params, grad);
      if (st.halted) {
        append_shang_family_row(table.rows, ctx, k + 1, st.x, st.y, st.P, st.P,
                                st.corr_next, alpha_used, tr_used, true);
        table.diverged = true;
        break;
      }
      if (should_log(k + 1, cfg.log_every, cfg.steps))
        append_shang_family_row(table.rows, ctx, k + 1, st.x, st.y, st.P, st.P,
                                st.corr_next, alpha_used, tr_used, false);
    }
  }
  return table;
}

RunTable run_convex_shang_baseline(const ExperimentConfig& cfg, const MethodConfig& mc,
                                   int opt_index, int run_index) {
  PiecewisePowerObjective oracle(cfg.d, cfg.power);
  RunTable table;
  table.columns = convex_columns(Method::shang, cfg.diag, cfg.d);

  RngStream rng(cfg.base_seed, stream_id(opt_index, run_index));
  GradientFn grad = [&](const Vec& x) {
    return sample_stochastic_gradient(x, oracle, cfg.noise, rng);
  };
  const double mult = 1.0 + cfg.noise.sigma1 * cfg.noise.sigma1;
  const double corr_coeff = 1.0 / (mult * mc.shang_baseline.smoothness_L);

  const Vec x0(cfg.d, cfg.x0);
  ShangState st = shang_init(x0, x0, grad);

  auto emit = [&](std::int64_t step, bool halt_row) {
    std::vector<double> row{static_cast<double>(step)};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double alpha = shang_alpha(step > 0 ? step - 1 : 0);
    if (halt_row) {
      row.push_back(nan);
      if (cfg.diag.energy) row.push_back(nan);
      row.push_back(alpha);
    } else {
      row.push_back(oracle.value(st.x) - oracle.min_value());
      if (cfg.diag.energy) {
        Vec xp(st.x.size());
        for (std::size_t i = 0; i < xp.size(); ++i) xp[i] = st.x[i] - corr_coeff * st.g_last[i];
        const DiagMetric P = DiagMetric::identity(
            cfg.d, shang_scalar_metric(st.k, mc.shang_baseline.sigma1,
                                       mc.shang_baseline.smoothness_L));
        row.push_back(lyapunov_energy(xp, st.y, P, oracle).energy);
      }
      row.push_back(alpha);
    }
    table.rows.push_back(std::move(row));
  };

  emit(0, false);
  for (std::int64_t k = 0; k < cfg.steps; ++k) {
    shang_step(st, mc.shang_baseline, grad);
    if (st.halted) {
      emit(k + 1, true);
      table.diverged = true;
      break;
    }
    if (should_log(k + 1, cfg.log_every, cfg.steps)) emit(k + 1, false);
  }
  return table;
}

RunTable run_convex_simple(const ExperimentConfig& cfg, const MethodConfig& mc, int opt_index,
                           int run_index) {
  PiecewisePowerObjective oracle(cfg.d, cfg.power);
  RunTable table;
  table.columns = {"step", "f_gap"};

  RngStream rng(cfg.base_seed, stream_id(opt_index, run_index));
  GradientFn grad = [&](const Vec& x) {
    return sample_stochastic_gradient(x, oracle, cfg.noise, rng);
  };
  const Vec x0(cfg.d, cfg.x0);

  auto emit = [&](std::int64_t step, const Vec& x, bool halt_row) {
    std::vector<double> row{static_cast<double>(step)};
    row.push_back(halt_row ? std::numeric_limits<double>::quiet_NaN()
                           : oracle.value(x) - oracle.min_value());
    table.rows.push_back(std::move(row));
  };

  if (mc.method == Method::sgd) {
    SgdState st;
    st.x = x0;
    emit(0, st.x, false);
    for (std::int64_t k = 0; k < cfg.steps; ++k) {
      sgd_step(st, mc.sgd_params, grad);
      if (st.halted) {
        emit(k + 1, st.x, true);
        table.diverged = true;
        break;
      }
      if (should_log(k + 1, cfg.log_every, cfg.steps)) emit(k + 1, st.x, false);
    }
  } else {
    AdamState st = adam_init(x0);
    emit(0, st.x, false);
    for (std::int64_t k = 0; k < cfg.steps; ++k) {
      adam_step(st, mc.adam_params, grad);
      if (st.halted) {
        emit(k + 1, st.x, true);
        table.diverged = true;
        break;
      }
      if (should_log(k + 1, cfg.log_every, cfg.steps)) emit(k + 1, st.x, false);
    }
  }
  return table;
}

// -------------------------------------------------------------------------
// Stress-test (counterexample) runs
// -------------------------------------------------------------------------

struct RoundRecorder {
  CounterexampleMode mode;
  RngStream rng;
  std::int64_t t = 0;       // rounds consumed
  double coeff = 0.0;       // c_t of the last round
  double x_queried = 0.0;   // iterate the last gradient was asked at

  RoundRecorder(CounterexampleVariant variant, std::uint64_t seed, std::uint64_t stream)
      : rng(seed, stream) {
    mode.variant = variant;
  }

  Vec operator()(const Vec& x) {
    t += 1;
    coeff = counterexample_coeff(t, mode, rng);
    x_queried = x[0];
    return Vec{coeff};
  }
};

RunTable run_counterexample_single(const ExperimentConfig& cfg, const MethodConfig& mc,
                                   int opt_index, int run_index) {
  RunTable table;
  table.columns = {"step", "x", "loss_pre", "loss_post", "avg_regret"};

  const CounterexampleVariant variant = cfg.problem == ProblemKind::counterexample_stoch
                                            ? CounterexampleVariant::stochastic
                                            : CounterexampleVariant::deterministic;
  if (cfg.steps == 0) {
    table.rows.push_back({0.0, cfg.ce_x0, 0.0, 0.0, 0.0});
    return table;
  }

  RoundRecorder rec(variant, cfg.base_seed, stream_id(opt_index, run_index));
  GradientFn grad = [&rec](const Vec& x) { return rec(x); };

  double cum_loss_post = 0.0;
  double cum_coeff = 0.0;

  // x_raw(): the un-clamped iterate of the update that produced the last
  // queried point; equal to the queried point itself when no clamp fired.
  auto log_round = [&](double x_raw) {
    cum_loss_post += rec.coeff * rec.x_queried;
    cum_coeff += rec.coeff;
    if (should_log(rec.t, cfg.log_every, cfg.steps) || rec.t == 1) {
      const double best = std::min(cum_coeff, -cum_coeff);
      table.rows.push_back({static_cast<double>(rec.t), rec.x_queried, rec.coeff * x_raw,
                            rec.coeff * rec.x_queried,
                            (cum_loss_post - best) / static_cast<double>(rec.t)});
    }
  };

  const Vec x0{cfg.ce_x0};
  const Vec y0{cfg.ce_x0};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto log_halt = [&] {  // terminal diagnostic record of a halted run
    table.rows.push_back({static_cast<double>(rec.t), nan, nan, nan, nan});
    table.diverged = true;
  };

  switch (mc.method) {
    case Method::adam_shang: {
      const DiagMetric P0 = DiagMetric::identity(1, cfg.p_init);
      AdamShangState st = adamshang_init(x0, y0, P0, mc.shang_params, grad, nullptr);
      log_round(cfg.ce_x0);  // round 1 is consumed by the initial sample
      while (rec.t < cfg.steps && !st.halted) {
        adamshang_step(st, mc.shang_params, grad);
        if (!st.halted) log_round(st.x_unclamped.empty() ? st.x[0] : st.x_unclamped[0]);
      }
      if (st.halted) log_halt();
      break;
    }
    case Method::adam_shang_s: {
      const DiagMetric P0 = DiagMetric::identity(1, cfg.p_init);
      AdamShangSState st = adamshang_s_init(x0, y0, P0, mc.shang_params, grad, nullptr);
      log_round(cfg.ce_x0);
      while (rec.t < cfg.steps && !st.halted) {
        adamshang_s_step(st, mc.shang_params, grad);
        if (!st.halted) log_round(st.x_unclamped.empty() ? st.x[0] : st.x_unclamped[0]);
      }
      if (st.halted) log_halt();
      break;
    }
    case Method::shang: {
      ShangState st = shang_init(x0, y0, grad);
      log_round(cfg.ce_x0);
      while (rec.t < cfg.steps && !st.halted) {
        shang_step(st, mc.shang_baseline, grad);
        if (!st.halted) log_round(st.x_unclamped.empty() ? st.x[0] : st.x_unclamped[0]);
      }
      if (st.halted) log_halt();
      break;
    }
    case Method::sgd: {
      SgdState st;
      st.x = x0;
      while (rec.t < cfg.steps && !st.halted) {
        sgd_step(st, mc.sgd_params, grad);
        if (!st.halted) log_round(st.x_unclamped.empty() ? st.x[0] : st.x_unclamped[0]);
      }
      if (st.halted) log_halt();
      break;
    }
    case Method::adam:
    case Method::amsgrad: {
      AdamState st = adam_init(x0);
      while (rec.t < cfg.steps && !st.halted) {
        adam_step(st, mc.adam_params, grad);
        if (!st.halted) log_round(st.x_unclamped.empty() ? st.x[0] : st.x_unclamped[0]);
      }
      if (st.halted) log_halt();
      break;
    }
  }
  return table;
}

}  // namespace

RunTable run_single(const ExperimentConfig& cfg, const MethodConfig& mc, int opt_index,
                    int run_index) {
  if (cfg.counterexample()) return run_counterexample_single(cfg, mc, opt_index, run_index);
  switch (mc.method) {
    case Method::adam_shang:
    case Method::adam_shang_s:
      return run_convex_shang_family(cfg, mc, opt_index, run_index);
    case Method::shang:
      return run_convex_shang_baseline(cfg, mc, opt_index, run_index);
    default:
      return run_convex_simple(cfg, mc, opt_index, run_index);
  }
}

namespace {

AggregateSeries aggregate(const std::vector<RunTable>& runs) {
  AggregateSeries agg;
  agg.runs_total = static_cast<int>(runs.size());
  std::vector<const RunTable*> alive;
  for (const auto& r : runs) {
    if (r.diverged)
      ++agg.runs_diverged;
    else
      alive.push_back(&r);
  }
  if (alive.empty()) return agg;

  agg.columns = alive.front()->columns;
  const std::size_t n_rows = alive.front()->rows.size();
  const std::size_t n_cols = agg.columns.size();
  for (const auto* r : alive) {
    if (r->rows.size() != n_rows || r->columns != agg.columns)
      throw std::logic_error("aggregate: runs logged inconsistent tables");
  }

  const auto stat_rows = [&](auto&& f) {
    std::vector<std::vector<double>> out(n_rows, std::vector<double>(n_cols));
    std::vector<double> vals(alive.size());
    for (std::size_t r = 0; r < n_rows; ++r) {
      for (std::size_t c = 0; c < n_cols; ++c) {
        for (std::size_t a = 0; a < alive.size(); ++a) vals[a] = alive[a]->rows[r][c];
        out[r][c] = f(vals);
      }
    }
    return out;
  };

  agg.mean = stat_rows([](std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  });
  agg.median = stat_rows([](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  });
  agg.stddev = stat_rows([](std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
  });
  agg.min = stat_rows([](std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); });
  agg.max = stat_rows([](std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); });
  return agg;
}

}  // namespace

std::vector<ExperimentResult> run_experiment(const ExperimentConfig& cfg) {
  std::vector<ExperimentResult> results;
  for (std::size_t oi = 0; oi < cfg.optimizers.size(); ++oi) {
    const MethodConfig& mc = cfg.optimizers[oi];
    std::vector<RunTable> runs(cfg.runs);

    const int jobs = std::max(1, std::min(cfg.jobs, cfg.runs));
    if (jobs == 1) {
      for (int r = 0; r < cfg.runs; ++r) runs[r] = run_single(cfg, mc, static_cast<int>(oi), r);
    } else {
      std::atomic<int> next{0};
      std::vector<std::thread> workers;
      workers.reserve(jobs);
      for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
          for (int r = next.fetch_add(1); r < cfg.runs; r = next.fetch_add(1))
            runs[r] = run_single(cfg, mc, static_cast<int>(oi), r);
        });
      }
      for (auto& t : workers) t.join();
    }

    ExperimentResult res;
    res.label = method_name(mc.method);
    res.agg = aggregate(runs);
    if (cfg.save_runs) res.raw = std::move(runs);
    results.push_back(std::move(res));
  }
  return results;
}

// -------------------------------------------------------------------------
// Output files
// -------------------------------------------------------------------------

namespace {

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out << ',';
    out << columns[c];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << fmt_full(row[c]);
    }
    out << '\n';
  }
}

}  // namespace

std::string experiment_stem(const ExperimentConfig& cfg) {
  switch (cfg.problem) {
    case ProblemKind::convex_benchmark: return "convex";
    case ProblemKind::counterexample_det: return "counterexample_det";
    case ProblemKind::counterexample_stoch: return "counterexample_stoch";
  }
  return "experiment";
}

void write_outputs(const ExperimentConfig& cfg, const ConfigMap& raw_cfg,
                   const std::vector<ExperimentResult>& results) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string stem = experiment_stem(cfg);

  for (const auto& res : results) {
    const std::string base = cfg.out_dir + "/" + stem + "_" + res.label;
    write_csv(base + ".csv", res.agg.columns, res.agg.mean);
    write_csv(base + "_median.csv", res.agg.columns, res.agg.median);
    write_csv(base + "_std.csv", res.agg.columns, res.agg.stddev);
    write_csv(base + "_min.csv", res.agg.columns, res.agg.min);
    write_csv(base + "_max.csv", res.agg.columns, res.agg.max);

    nlohmann::ordered_json meta;
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016" PRIx64, config_hash(raw_cfg));
    meta["config_hash"] = hash_buf;
    meta["base_seed"] = cfg.base_seed;
    meta["library_version"] = kLibraryVersion;
    meta["experiment"] = stem;
    meta["optimizer"] = res.label;
    meta["steps"] = cfg.steps;
    meta["runs"] = res.agg.runs_total;
    meta["diverged_runs"] = res.agg.runs_diverged;
    meta["diverged_fraction"] =
        res.agg.runs_total == 0
            ? 0.0
            : static_cast<double>(res.agg.runs_diverged) / res.agg.runs_total;
    meta["columns"] = res.agg.columns;
    std::ofstream mout(base + ".meta.json");
    if (!mout) throw std::runtime_error("cannot write '" + base + ".meta.json'");
    mout << meta.dump(2) << '\n';

    if (cfg.save_runs) {
      for (std::size_t r = 0; r < res.raw.size(); ++r) {
        char suffix[32];
        std::snprintf(suffix, sizeof(suffix), "_run%04zu.csv", r);
        write_csv(base + suffix, res.raw[r].columns, res.raw[r].rows);
      }
    }
  }
}

// -------------------------------------------------------------------------
// Grid search
// -------------------------------------------------------------------------

namespace {

void set_grid_param(MethodConfig& mc, const std::string& param, double value) {
  if (param == "eta0" &&
      (mc.method == Method::adam || mc.method == Method::amsgrad)) {
    mc.adam_params.eta0 = value;
    return;
  }
  if (param == "eta" && mc.method == Method::sgd) {
    mc.sgd_params.eta = value;
    return;
  }
  if (param == "lambda" &&
      (mc.method == Method::adam_shang || mc.method == Method::adam_shang_s)) {
    mc.shang_params.lambda = value;
    return;
  }
  throw std::invalid_argument("grid_search: unsupported parameter '" + param + "' for " +
                              method_name(mc.method));
}

std::size_t column_index(const std::vector<std::string>& columns, const std::string& name) {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::logic_error("column '" + name + "' not logged");
}

}  // namespace

GridResult grid_search(const ExperimentConfig& cfg, Method method, const std::string& param,
                       const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("grid_search: empty grid");

  const MethodConfig* base = nullptr;
  int opt_index = 0;
  for (std::size_t i = 0; i < cfg.optimizers.size(); ++i) {
    if (cfg.optimizers[i].method == method) {
      base = &cfg.optimizers[i];
      opt_index = static_cast<int>(i);
      break;
    }
  }
  if (base == nullptr)
    throw std::invalid_argument("grid_search: method " + method_name(method) + " not configured");

  const std::string metric = cfg.counterexample() ? "avg_regret" : "f_gap";

  GridResult grid;
  grid.param = param;
  for (double value : values) {
    MethodConfig mc = *base;
    set_grid_param(mc, param, value);

    std::vector<RunTable> runs(cfg.runs);
    for (int r = 0; r < cfg.runs; ++r) runs[r] = run_single(cfg, mc, opt_index, r);
    AggregateSeries agg = aggregate(runs);

    GridPoint pt;
    pt.value = value;
    pt.diverged_fraction = agg.runs_total == 0
                               ? 1.0
                               : static_cast<double>(agg.runs_diverged) / agg.runs_total;
    pt.usable = agg.runs_diverged < agg.runs_total && !agg.mean.empty();
    if (pt.usable) {
      const std::size_t col = column_index(agg.columns, metric);
      pt.objective = agg.mean.back()[col];
    } else {
      pt.objective = std::numeric_limits<double>::quiet_NaN();
    }
    grid.table.push_back(pt);
  }

  const GridPoint* best = nullptr;
  for (const auto& pt : grid.table)
    if (pt.usable && (best == nullptr || pt.objective < best->objective)) best = &pt;
  if (best == nullptr) {
    std::string msg = "grid_search: every grid point diverged;";
    for (const auto& pt : grid.table) msg += " " + fmt_full(pt.value);
    throw std::runtime_error(msg);
  }
  grid.best_value = best->value;
  grid.best_objective = best->objective;
  return grid;
}

void write_grid_table(const std::string& path, const GridResult& grid) {
  std::vector<std::vector<double>> rows;
  for (const auto& pt : grid.table)
    rows.push_back({pt.value, pt.objective, pt.diverged_fraction, pt.usable ? 0.0 : 1.0});
  write_csv(path, {grid.param, "objective", "diverged_fraction", "excluded"}, rows);
}

// -------------------------------------------------------------------------
// Instrumented traces and checkpoints
// -------------------------------------------------------------------------

EnergyTrace adamshang_energy_trace(std::int64_t steps, std::size_t dim, int power, double lambda,
                                   const NoiseSpec& noise, std::uint64_t seed,
                                   CouplingIndex coupling, double x0_fill) {
  PiecewisePowerObjective oracle(dim, power);
  AdamShangParams params;
  params.mode = AdamShangMode::convex_coupled;
  params.lambda = lambda;
  params.epsilon = 0.0;
  params.sigma1 = noise.sigma1;
  params.smoothness_L = oracle.smoothness();
  params.coupling = coupling;

  RngStream rng(seed, 1);
  GradientFn grad = [&](const Vec& x) {
    return sample_stochastic_gradient(x, oracle, noise, rng);
  };

  const Vec x0(dim, x0_fill);
  const Vec& x_star = *oracle.minimizer();
  AdamShangState st = adamshang_init(x0, x0, DiagMetric::identity(dim), params, grad, &x_star);

  EnergyTrace trace;
  trace.energy.reserve(steps + 1);
  trace.alpha.reserve(steps + 1);
  trace.energy.push_back(
      lyapunov_energy(x_plus_from_correction(st.x, st.corr_next), st.y, st.P, oracle).energy);
  trace.alpha.push_back(st.alpha_next);
  for (std::int64_t k = 0; k < steps; ++k) {
    adamshang_step(st, params, grad);
    if (st.halted) throw std::runtime_error("adamshang_energy_trace: run halted");
    trace.energy.push_back(
        lyapunov_energy(x_plus_from_correction(st.x, st.corr_next), st.y, st.P, oracle).energy);
    trace.alpha.push_back(st.alpha_next);
  }
  return trace;
}

void write_checkpoint(const std::string& path, const NamedArrays& arrays) {
  nlohmann::ordered_json j;
  for (const auto& [name, data] : arrays) j[name] = data;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

NamedArrays read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  nlohmann::ordered_json j;
  in >> j;
  NamedArrays arrays;
  for (auto it = j.begin(); it != j.end(); ++it)
    arrays.emplace_back(it.key(), it.value().get<Vec>());
  return arrays;
}

}  // namespace ashang
