#include "ashang/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ashang {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line;
  std::string section = "experiment";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty section");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    cfg.values[section + "." + key] = value;
  }
  return cfg;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(ConfigMap& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override '" + assignment + "': expected section.key=value");
  std::string key = lower(trim(assignment.substr(0, eq)));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.find('.') == std::string::npos) key = "experiment." + key;
  cfg.values[key] = value;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::adam_shang: return "adam_shang";
    case Method::adam_shang_s: return "adam_shang_s";
    case Method::shang: return "shang";
    case Method::sgd: return "sgd";
    case Method::adam: return "adam";
    case Method::amsgrad: return "amsgrad";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  const std::string n = lower(trim(name));
  if (n == "adam_shang") return Method::adam_shang;
  if (n == "adam_shang_s") return Method::adam_shang_s;
  if (n == "shang") return Method::shang;
  if (n == "sgd") return Method::sgd;
  if (n == "adam") return Method::adam;
  if (n == "amsgrad") return Method::amsgrad;
  throw std::invalid_argument("unknown optimizer '" + name + "'");
}

namespace {

/// Typed access over ConfigMap that records which keys were consumed, so
/// leftovers can be reported as errors.
class ConfigReader {
 public:
  explicit ConfigReader(const ConfigMap& cfg) : cfg_(cfg) {}

  bool has(const std::string& key) const { return cfg_.values.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) {
    consumed_.insert(key);
    auto it = cfg_.values.find(key);
    return it == cfg_.values.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) {
    consumed_.insert(key);
    auto it = cfg_.values.find(key);
    if (it == cfg_.values.end()) return fallback;
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument("config " + key + ": '" + it->second + "' is not a number");
    }
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) {
    consumed_.insert(key);
    auto it = cfg_.values.find(key);
    if (it == cfg_.values.end()) return fallback;
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument("config " + key + ": '" + it->second + "' is not an integer");
    }
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
    consumed_.insert(key);
    auto it = cfg_.values.find(key);
    if (it == cfg_.values.end()) return fallback;
    try {
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument("config " + key + ": '" + it->second + "' is not an integer");
    }
  }

  bool get_bool(const std::string& key, bool fallback) {
    consumed_.insert(key);
    auto it = cfg_.values.find(key);
    if (it == cfg_.values.end()) return fallback;
    const std::string v = lower(it->second);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config " + key + ": '" + it->second + "' is not a boolean");
  }

  void check_all_consumed() const {
    std::vector<std::string> unknown;
    for (const auto& [key, value] : cfg_.values)
      if (consumed_.count(key) == 0) unknown.push_back(key);
    if (!unknown.empty()) {
      std::string msg = "unknown config key(s):";
      for (const auto& k : unknown) msg += " " + k;
      throw std::invalid_argument(msg);
    }
  }

 private:
  const ConfigMap& cfg_;
  std::set<std::string> consumed_;
};

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

AdamShangMode mode_from_name(const std::string& name, const std::string& key) {
  const std::string n = lower(trim(name));
  if (n == "training") return AdamShangMode::training;
  if (n == "convex_coupled") return AdamShangMode::convex_coupled;
  if (n == "decoupled") return AdamShangMode::decoupled;
  if (n == "shang_collapse") return AdamShangMode::shang_collapse;
  throw std::invalid_argument("config " + key + ": unknown mode '" + name + "'");
}

CouplingIndex coupling_from_name(const std::string& name, const std::string& key) {
  const std::string n = lower(trim(name));
  if (n == "current" || n == "e1") return CouplingIndex::current_alpha;
  if (n == "lagged" || n == "theorem") return CouplingIndex::lagged_alpha;
  throw std::invalid_argument("config " + key + ": unknown coupling '" + name + "'");
}

AdamShangParams read_shang_family(ConfigReader& r, const std::string& sec, bool counterexample,
                                  const NoiseSpec& noise, double L, bool synchronous) {
  AdamShangParams p;
  // Problem-aware defaults: the coupled protocol on the benchmark, the
  // decoupled (0.001, 1e-4, 0.05) parameterization on the stress test.
  if (counterexample) {
    p.mode = AdamShangMode::decoupled;
    p.lambda = 0.001;
    p.beta = 1e-4;
    p.gamma = 0.05;
    p.epsilon = 0.0;
    p.box = BoxRegion{1.0};
    p.box_clamps_y = false;  // domain constraint applies to the played iterate
    p.y_box = BoxRegion{2.0};
  } else {
    p.mode = AdamShangMode::convex_coupled;
    p.lambda = 0.5;
    p.beta = 0.05;
    p.gamma = synchronous ? 0.01 : 0.001;
    p.epsilon = 0.0;
  }
  p.sigma1 = noise.sigma1;
  p.smoothness_L = L;

  const std::string mode_default = counterexample ? "decoupled" : "convex_coupled";
  p.mode = mode_from_name(r.get_string(sec + ".mode", mode_default), sec + ".mode");
  p.lambda = r.get_double(sec + ".lambda", p.lambda);
  p.beta = r.get_double(sec + ".beta", p.beta);
  p.gamma = r.get_double(sec + ".gamma", p.gamma);
  p.epsilon = r.get_double(sec + ".epsilon", p.epsilon);
  p.coupling = coupling_from_name(r.get_string(sec + ".coupling", "e1"), sec + ".coupling");
  p.box_clamps_y = r.get_bool(sec + ".clamp_y", p.box_clamps_y);
  const double ybox = r.get_double(sec + ".y_box", p.y_box ? p.y_box->half_width : 0.0);
  p.y_box = ybox > 0.0 ? std::optional<BoxRegion>(BoxRegion{ybox}) : std::nullopt;
  return p;
}

AdamParams read_adam(ConfigReader& r, const std::string& sec, bool counterexample, bool amsgrad) {
  AdamParams p;
  p.amsgrad = amsgrad;
  if (counterexample) {
    p.eta0 = 0.01;
    p.sqrt_decay = false;
    p.theta1 = 0.9;
    p.theta2 = 0.99;
    p.box = BoxRegion{1.0};
  } else {
    p.eta0 = 0.01;
    p.sqrt_decay = true;
    p.theta1 = 0.9;
    p.theta2 = 0.999;
  }
  p.eta0 = r.get_double(sec + ".eta0", p.eta0);
  const std::string sched = lower(r.get_string(sec + ".schedule", p.sqrt_decay ? "inv_sqrt"
                                                                               : "constant"));
  if (sched == "inv_sqrt")
    p.sqrt_decay = true;
  else if (sched == "constant")
    p.sqrt_decay = false;
  else
    throw std::invalid_argument("config " + sec + ".schedule: unknown schedule '" + sched + "'");
  p.theta1 = r.get_double(sec + ".theta1", p.theta1);
  p.theta2 = r.get_double(sec + ".theta2", p.theta2);
  p.epsilon = r.get_double(sec + ".epsilon", p.epsilon);
  return p;
}

}  // namespace

ExperimentConfig load_experiment_config(const ConfigMap& cfg) {
  ConfigReader r(cfg);
  ExperimentConfig out;

  const std::string problem = lower(r.get_string("experiment.problem", "convex_benchmark"));
  if (problem == "convex_benchmark")
    out.problem = ProblemKind::convex_benchmark;
  else if (problem == "counterexample_det")
    out.problem = ProblemKind::counterexample_det;
  else if (problem == "counterexample_stoch")
    out.problem = ProblemKind::counterexample_stoch;
  else
    throw std::invalid_argument("config experiment.problem: unknown problem '" + problem + "'");

  const bool ce = out.counterexample();

  out.d = static_cast<std::size_t>(r.get_int("experiment.d", ce ? 1 : 16));
  out.power = static_cast<int>(r.get_int("experiment.power", 16));
  out.steps = r.get_int("experiment.steps", ce ? 100000 : 10000);
  out.runs = static_cast<int>(
      r.get_int("experiment.runs", out.problem == ProblemKind::counterexample_stoch ? 30
                                   : ce                                             ? 1
                                                                                    : 50));
  out.base_seed = r.get_u64("experiment.base_seed", 12345);
  out.log_every = r.get_int("experiment.log_every", ce ? 100 : 10);
  out.jobs = static_cast<int>(r.get_int("experiment.jobs", 1));
  out.x0 = r.get_double("experiment.x0", 0.8);
  out.p_init = r.get_double("experiment.p_init", 1.0);
  out.save_runs = r.get_bool("experiment.save_runs", false);
  out.out_dir = r.get_string("experiment.out_dir", "out");
  out.ce_x0 = r.get_double("counterexample.x0", 0.5);

  out.noise.sigma0 = r.get_double("noise.sigma0", 0.0);
  out.noise.sigma1 = r.get_double("noise.sigma1", ce ? 0.0 : 10.0);

  out.diag.energy = r.get_bool("diagnostics.energy", !ce);
  out.diag.admissibility = r.get_bool("diagnostics.admissibility", !ce);
  out.diag.alignment = r.get_bool("diagnostics.alignment", !ce && out.d >= 2);

  if (out.steps < 0) throw std::invalid_argument("config experiment.steps: must be >= 0");
  if (out.runs < 1) throw std::invalid_argument("config experiment.runs: must be >= 1");
  if (out.d < 1) throw std::invalid_argument("config experiment.d: must be >= 1");
  if (out.log_every < 1) throw std::invalid_argument("config experiment.log_every: must be >= 1");
  if (out.jobs < 1) throw std::invalid_argument("config experiment.jobs: must be >= 1");
  if (ce && out.d != 1)
    throw std::invalid_argument("config: the counterexample is one-dimensional (d = 1)");

  const double power_d = static_cast<double>(out.power);
  const double L = power_d * (power_d - 1.0);

  const std::string default_methods =
      ce ? "adam_shang, adam_shang_s, adam, amsgrad" : "adam_shang, adam_shang_s, shang, sgd, adam";
  const std::vector<std::string> methods =
      split_list(r.get_string("optimizers.enabled", default_methods));
  if (methods.empty()) throw std::invalid_argument("config optimizers.enabled: empty list");

  const double mult = 1.0 + out.noise.sigma1 * out.noise.sigma1;
  std::set<Method> seen;
  for (const std::string& name : methods) {
    MethodConfig mc;
    mc.method = method_from_name(name);
    if (!seen.insert(mc.method).second)
      throw std::invalid_argument("config optimizers.enabled: duplicate entry '" + name + "'");
    switch (mc.method) {
      case Method::adam_shang:
        mc.shang_params = read_shang_family(r, "adam_shang", ce, out.noise, L, false);
        break;
      case Method::adam_shang_s:
        mc.shang_params = read_shang_family(r, "adam_shang_s", ce, out.noise, L, true);
        break;
      case Method::adam:
        mc.adam_params = read_adam(r, "adam", ce, false);
        if (ce) mc.adam_params.box = BoxRegion{1.0};
        break;
      case Method::amsgrad:
        mc.adam_params = read_adam(r, "amsgrad", ce, true);
        if (ce) mc.adam_params.box = BoxRegion{1.0};
        break;
      case Method::sgd:
        mc.sgd_params.eta = r.get_double("sgd.eta", 1.0 / (mult * L));
        if (ce) mc.sgd_params.box = BoxRegion{1.0};
        break;
      case Method::shang:
        mc.shang_baseline.sigma1 = out.noise.sigma1;
        mc.shang_baseline.smoothness_L = L;
        if (ce) mc.shang_baseline.box = BoxRegion{1.0};
        break;
    }
    out.optimizers.push_back(mc);
  }

  // Sections of disabled optimizers still get validated: typo'd keys stay
  // errors, known keys for methods not in the enabled list are tolerated.
  if (!seen.count(Method::adam_shang)) read_shang_family(r, "adam_shang", ce, out.noise, L, false);
  if (!seen.count(Method::adam_shang_s))
    read_shang_family(r, "adam_shang_s", ce, out.noise, L, true);
  if (!seen.count(Method::adam)) read_adam(r, "adam", ce, false);
  if (!seen.count(Method::amsgrad)) read_adam(r, "amsgrad", ce, true);
  if (!seen.count(Method::sgd)) r.get_double("sgd.eta", 0.0);

  r.check_all_consumed();
  return out;
}

std::string config_dump(const ConfigMap& cfg) {
  std::string out;
  for (const auto& [key, value] : cfg.values) {  // std::map iterates sorted
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  }
  return out;
}

std::uint64_t config_hash(const ConfigMap& cfg) {
  const std::string dump = config_dump(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ashang
