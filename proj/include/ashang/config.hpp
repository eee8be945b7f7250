#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ashang/optimizers.hpp"
#include "ashang/problems.hpp"

namespace ashang {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Flat "section.key" -> value map parsed from an INI-style file:
/// [section] headers, key = value lines, '#' or ';' comments. Keys outside
/// any section live in the implicit "experiment" section.
struct ConfigMap {
  std::map<std::string, std::string> values;
};

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

/// Applies one "section.key=value" override. Malformed input throws.
void apply_override(ConfigMap& cfg, const std::string& assignment);

enum class ProblemKind { convex_benchmark, counterexample_det, counterexample_stoch };
enum class Method { adam_shang, adam_shang_s, shang, sgd, adam, amsgrad };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct MethodConfig {
  Method method = Method::adam_shang;
  AdamShangParams shang_params;  // adam_shang / adam_shang_s
  AdamParams adam_params;        // adam / amsgrad
  SgdParams sgd_params;          // sgd
  ShangParams shang_baseline;    // shang
};

struct DiagnosticsFlags {
  bool energy = true;
  bool admissibility = true;
  bool alignment = true;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::convex_benchmark;
  std::size_t d = 16;
  int power = 16;
  NoiseSpec noise;
  std::int64_t steps = 10000;
  int runs = 50;
  std::uint64_t base_seed = 12345;
  std::int64_t log_every = 10;
  int jobs = 1;
  double x0 = 1.0;      // per-coordinate fill of x_0 = y_0 (benchmark)
  double p_init = 1.0;  // P_0 = p_init * I
  bool save_runs = false;
  std::string out_dir = "out";
  DiagnosticsFlags diag;
  std::vector<MethodConfig> optimizers;

  double ce_x0 = 0.5;  // counterexample initial iterate, x_0 = y_0

  bool counterexample() const { return problem != ProblemKind::convex_benchmark; }
};

/// Builds the typed config: problem-aware defaults first, then file values,
/// then overrides. Unknown keys are an error, never ignored.
ExperimentConfig load_experiment_config(const ConfigMap& cfg);

/// FNV-1a over the canonical sorted key=value dump; stable across runs.
std::uint64_t config_hash(const ConfigMap& cfg);

/// The canonical dump itself (sorted "section.key = value" lines).
std::string config_dump(const ConfigMap& cfg);

}  // namespace ashang
