#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ashang/config.hpp"
#include "ashang/diagnostics.hpp"
#include "ashang/optimizers.hpp"
#include "ashang/problems.hpp"

namespace ashang {

/// Logged trajectory of one run: aligned rows over the logged steps.
/// A run that hits NaN/Inf carries a terminal halt row and is flagged.
struct RunTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool diverged = false;
};

/// Per-step statistics over the surviving runs of one optimizer.
struct AggregateSeries {
  std::vector<std::string> columns;
  // stat[row][col]; rows align across stats.
  std::vector<std::vector<double>> mean, median, stddev, min, max;
  int runs_total = 0;
  int runs_diverged = 0;
};

struct ExperimentResult {
  std::string label;
  AggregateSeries agg;
  std::vector<RunTable> raw;  // populated when cfg.save_runs is set
};

/// Runs cfg.runs independent replicas of every configured optimizer.
/// Each (optimizer, run) owns RngStream(base_seed, stream_id); results are
/// deterministic for a fixed config and independent of the job count.
std::vector<ExperimentResult> run_experiment(const ExperimentConfig& cfg);

/// One run of one method; exposed for targeted checks.
RunTable run_single(const ExperimentConfig& cfg, const MethodConfig& mc, int opt_index,
                    int run_index);

/// CSV + metadata emission: <out_dir>/<experiment>_<label>.csv holds the
/// mean series (columns exactly the logged fields), with _median/_std/
/// _min/_max companions and a .meta.json sidecar.
void write_outputs(const ExperimentConfig& cfg, const ConfigMap& raw_cfg,
                   const std::vector<ExperimentResult>& results);

std::string experiment_stem(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

struct GridPoint {
  double value = 0.0;
  double objective = 0.0;  // final mean f-gap (convex) or mean avg regret (stress test)
  double diverged_fraction = 0.0;
  bool usable = false;  // at least one surviving run
};

struct GridResult {
  std::string param;
  std::vector<GridPoint> table;
  double best_value = 0.0;
  double best_objective = 0.0;
};

/// Evaluates `param` over `values` for `method` under cfg and returns the
/// point minimizing the final objective; points whose runs all diverge are
/// excluded. Throws when every point diverges.
GridResult grid_search(const ExperimentConfig& cfg, Method method, const std::string& param,
                       const std::vector<double>& values);

void write_grid_table(const std::string& path, const GridResult& grid);

// ---------------------------------------------------------------------------
// Instrumented single-run traces for the verification suite
// ---------------------------------------------------------------------------

/// Pathwise energy trace of the coupled lagged scheme on the benchmark:
/// E_0..E_T and alpha_0..alpha_T (the final alpha comes from the last
/// prepared plan).
struct EnergyTrace {
  std::vector<double> energy;
  std::vector<double> alpha;
};

EnergyTrace adamshang_energy_trace(std::int64_t steps, std::size_t dim, int power, double lambda,
                                   const NoiseSpec& noise, std::uint64_t seed,
                                   CouplingIndex coupling = CouplingIndex::current_alpha,
                                   double x0_fill = 1.0);

/// Checkpoint file: named real arrays as JSON.
void write_checkpoint(const std::string& path, const NamedArrays& arrays);
NamedArrays read_checkpoint(const std::string& path);

}  // namespace ashang
