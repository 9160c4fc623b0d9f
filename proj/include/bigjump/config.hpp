#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bigjump/classify.hpp"
#include "bigjump/risk_model.hpp"
#include "bigjump/verifiers.hpp"

namespace bigjump {

// Configuration errors carry every problem found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::ostringstream os;
    os << "invalid configuration (" << errors.size() << " error"
       << (errors.size() == 1 ? "" : "s") << "):";
    for (const auto& e : errors) os << "\n  - " << e;
    return os.str();
  }
  std::vector<std::string> errors_;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{
      "classify",   "sum-asym",   "random-sum", "scale-mixture", "convolution",
      "kesten",     "translation", "dependence", "risk-model",    "ks-arrivals"};
  return kinds;
}

struct ExperimentConfig {
  std::string experiment;
  std::string label;
  std::uint64_t seed = 1;
  std::optional<RuinSet> set;
  VectorLaw law;
  Sizes sizes;
  std::vector<double> levels = default_levels();
  std::optional<PassBand> band;
  std::string expect = "pass";
  std::string out_dir;

  // per-experiment payloads
  unsigned n_summands = 2;
  SequenceStructure structure = SequenceStructure::independent;
  std::optional<MarginalLaw> dep_shock;
  std::optional<CountingLaw> counting;
  std::optional<ThetaLaw> theta;
  std::optional<VectorLaw> law2;
  unsigned kesten_n_max = 10;
  double kesten_epsilon = 0.5;
  std::vector<double> shift;
  DependenceKind dep_kind = DependenceKind::qai;
  ClassifyParams classify;
  double risk_lambda = 1.0;
  double risk_horizon = 1.0;
  unsigned risk_t_mesh = 64;
  std::uint64_t risk_path_dump = 0;
  ReturnProcess returns;
  std::vector<unsigned> ks_n{1, 2, 5};
  std::uint64_t ks_m_min = 10'000;

  nlohmann::json canonical;  // normalized config with defaults filled in
  std::string config_hash;
};

namespace cfgdetail {

using nlohmann::json;

struct Collector {
  std::vector<std::string> errors;
  void add(const std::string& where, const std::string& what) {
    errors.push_back(where + ": " + what);
  }
};

inline void check_keys(const json& obj, const std::string& where,
                       const std::set<std::string>& allowed, Collector& errs) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      errs.add(where, "unknown key '" + it.key() + "'");
    }
  }
}

inline double require_number(const json& obj, const std::string& where, const char* key,
                             Collector& errs, double fallback = 0.0) {
  if (!obj.contains(key)) {
    errs.add(where, std::string("missing key '") + key + "'");
    return fallback;
  }
  if (!obj[key].is_number()) {
    errs.add(where, std::string("'") + key + "' must be a number");
    return fallback;
  }
  return obj[key].get<double>();
}

inline double optional_number(const json& obj, const std::string& where, const char* key,
                              double fallback, Collector& errs) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    errs.add(where, std::string("'") + key + "' must be a number");
    return fallback;
  }
  return obj[key].get<double>();
}

inline std::vector<double> require_array(const json& obj, const std::string& where,
                                         const char* key, Collector& errs) {
  std::vector<double> out;
  if (!obj.contains(key)) {
    errs.add(where, std::string("missing key '") + key + "'");
    return out;
  }
  if (!obj[key].is_array()) {
    errs.add(where, std::string("'") + key + "' must be an array of numbers");
    return out;
  }
  for (const auto& v : obj[key]) {
    if (!v.is_number()) {
      errs.add(where, std::string("'") + key + "' must contain numbers only");
      return {};
    }
    out.push_back(v.get<double>());
  }
  return out;
}

inline std::optional<MarginalLaw> parse_marginal(const json& m, const std::string& where,
                                                 Collector& errs) {
  if (!m.is_object()) {
    errs.add(where, "marginal must be an object");
    return std::nullopt;
  }
  const std::string kind = m.value("kind", "");
  try {
    if (kind == "pareto") {
      check_keys(m, where, {"kind", "alpha", "x_min"}, errs);
      return MarginalLaw::pareto(require_number(m, where, "alpha", errs, 1.0),
                                 optional_number(m, where, "x_min", 1.0, errs));
    }
    if (kind == "lognormal") {
      check_keys(m, where, {"kind", "mu", "sigma"}, errs);
      return MarginalLaw::lognormal(require_number(m, where, "mu", errs),
                                    require_number(m, where, "sigma", errs, 1.0));
    }
    if (kind == "weibull") {
      check_keys(m, where, {"kind", "shape", "scale"}, errs);
      return MarginalLaw::weibull(require_number(m, where, "shape", errs, 0.5),
                                  require_number(m, where, "scale", errs, 1.0));
    }
    if (kind == "exponential") {
      check_keys(m, where, {"kind", "rate"}, errs);
      return MarginalLaw::exponential(require_number(m, where, "rate", errs, 1.0));
    }
    errs.add(where, "unknown marginal kind '" + kind + "'");
  } catch (const std::invalid_argument& e) {
    errs.add(where, e.what());
  }
  return std::nullopt;
}

inline std::optional<VectorLaw> parse_law(const json& l, const std::string& where,
                                          Collector& errs) {
  if (!l.is_object()) {
    errs.add(where, "law must be an object");
    return std::nullopt;
  }
  check_keys(l, where, {"marginals", "coupling", "shock"}, errs);
  VectorLaw law;
  if (!l.contains("marginals") || !l["marginals"].is_array() || l["marginals"].empty()) {
    errs.add(where, "'marginals' must be a non-empty array");
    return std::nullopt;
  }
  for (std::size_t i = 0; i < l["marginals"].size(); ++i) {
    std::ostringstream sub;
    sub << where << ".marginals[" << i << "]";
    if (auto m = parse_marginal(l["marginals"][i], sub.str(), errs)) {
      law.marginals.push_back(*m);
    }
  }
  const std::string coupling = l.value("coupling", "independent");
  if (coupling == "independent") {
    law.coupling = Coupling::independent;
  } else if (coupling == "comonotone") {
    law.coupling = Coupling::comonotone;
  } else if (coupling == "common_light_shock") {
    law.coupling = Coupling::common_light_shock;
  } else {
    errs.add(where, "unknown coupling '" + coupling + "'");
  }
  if (l.contains("shock")) {
    law.shock = parse_marginal(l["shock"], where + ".shock", errs);
  }
  if (law.marginals.empty()) return std::nullopt;
  try {
    law.validate();
  } catch (const std::invalid_argument& e) {
    errs.add(where, e.what());
    return std::nullopt;
  }
  return law;
}

inline std::optional<RuinSet> parse_set(const json& s, const std::string& where,
                                        Collector& errs) {
  if (!s.is_object()) {
    errs.add(where, "set must be an object");
    return std::nullopt;
  }
  const std::string kind = s.value("kind", "");
  try {
    if (kind == "halfspace") {
      check_keys(s, where, {"kind", "weights", "threshold"}, errs);
      const auto weights = require_array(s, where, "weights", errs);
      const double threshold = optional_number(s, where, "threshold", 1.0, errs);
      if (weights.empty()) return std::nullopt;
      return RuinSet::halfspace(weights, threshold);
    }
    if (kind == "any_exceed") {
      check_keys(s, where, {"kind", "barriers"}, errs);
      const auto barriers = require_array(s, where, "barriers", errs);
      if (!barriers.empty()) return RuinSet::any_exceed(barriers);
      return std::nullopt;
    }
    if (kind == "all_exceed") {
      check_keys(s, where, {"kind", "barriers"}, errs);
      const auto barriers = require_array(s, where, "barriers", errs);
      if (!barriers.empty()) return RuinSet::all_exceed(barriers);
      return std::nullopt;
    }
    errs.add(where, "unknown set kind '" + kind + "'");
  } catch (const std::invalid_argument& e) {
    errs.add(where, e.what());
  }
  return std::nullopt;
}

inline std::optional<CountingLaw> parse_counting(const json& c, const std::string& where,
                                                 Collector& errs) {
  if (!c.is_object()) {
    errs.add(where, "counting must be an object");
    return std::nullopt;
  }
  const std::string kind = c.value("kind", "");
  try {
    if (kind == "poisson") {
      check_keys(c, where, {"kind", "mean"}, errs);
      return CountingLaw::poisson(require_number(c, where, "mean", errs, 1.0));
    }
    if (kind == "geometric") {
      check_keys(c, where, {"kind", "q"}, errs);
      return CountingLaw::geometric(require_number(c, where, "q", errs, 0.5));
    }
    if (kind == "uniform_int") {
      check_keys(c, where, {"kind", "lo", "hi"}, errs);
      const double lo = require_number(c, where, "lo", errs, 1.0);
      const double hi = require_number(c, where, "hi", errs, 1.0);
      if (lo < 0 || hi < lo) {
        errs.add(where, "uniform_int needs 0 <= lo <= hi");
        return std::nullopt;
      }
      return CountingLaw::uniform_int(static_cast<std::uint64_t>(lo),
                                      static_cast<std::uint64_t>(hi));
    }
    if (kind == "degenerate") {
      check_keys(c, where, {"kind", "value"}, errs);
      const double v = require_number(c, where, "value", errs, 1.0);
      if (v < 0) {
        errs.add(where, "degenerate count must be >= 0");
        return std::nullopt;
      }
      return CountingLaw::degenerate(static_cast<std::uint64_t>(v));
    }
    errs.add(where, "unknown counting kind '" + kind +
                        "' (heavy-tailed counting laws are not supported)");
  } catch (const std::invalid_argument& e) {
    errs.add(where, e.what());
  }
  return std::nullopt;
}

inline std::optional<ThetaLaw> parse_theta(const json& t, const std::string& where,
                                           Collector& errs) {
  if (!t.is_object()) {
    errs.add(where, "theta must be an object");
    return std::nullopt;
  }
  const std::string kind = t.value("kind", "");
  const std::string mode_s = t.value("mode", "scalar");
  ThetaLaw::Mode mode = ThetaLaw::Mode::scalar;
  if (mode_s == "componentwise") {
    mode = ThetaLaw::Mode::componentwise;
  } else if (mode_s != "scalar") {
    errs.add(where, "unknown theta mode '" + mode_s + "'");
  }
  try {
    if (kind == "degenerate") {
      check_keys(t, where, {"kind", "value", "mode"}, errs);
      return ThetaLaw::degenerate(require_number(t, where, "value", errs, 1.0), mode);
    }
    if (kind == "bounded_uniform") {
      check_keys(t, where, {"kind", "lo", "hi", "mode"}, errs);
      return ThetaLaw::bounded_uniform(require_number(t, where, "lo", errs, 1.0),
                                       require_number(t, where, "hi", errs, 1.0), mode);
    }
    errs.add(where, "unknown theta kind '" + kind +
                        "' (unbounded scaling laws are not supported)");
  } catch (const std::invalid_argument& e) {
    errs.add(where, e.what());
  }
  return std::nullopt;
}

inline void parse_returns(const json& r, const std::string& where, ExperimentConfig& cfg,
                          Collector& errs) {
  if (!r.is_object()) {
    errs.add(where, "returns must be an object");
    return;
  }
  const std::string kind = r.value("kind", "");
  try {
    if (kind == "constant") {
      check_keys(r, where, {"kind", "rate"}, errs);
      cfg.returns = ReturnProcess::constant(optional_number(r, where, "rate", 0.0, errs));
      return;
    }
    if (kind == "clipped_random_walk") {
      check_keys(r, where, {"kind", "sigma", "clip_lo", "clip_hi", "mesh_points"}, errs);
      cfg.returns = ReturnProcess::clipped_random_walk(
          require_number(r, where, "sigma", errs, 0.1),
          require_number(r, where, "clip_lo", errs, 0.2),
          require_number(r, where, "clip_hi", errs, 0.2),
          static_cast<unsigned>(optional_number(r, where, "mesh_points", 256, errs)));
      return;
    }
    errs.add(where, "unknown returns kind '" + kind + "'");
  } catch (const std::invalid_argument& e) {
    errs.add(where, e.what());
  }
}

}  // namespace cfgdetail

inline std::string hash_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline ExperimentConfig parse_config_json(const nlohmann::json& j) {
  using cfgdetail::Collector;
  using nlohmann::json;
  Collector errs;
  ExperimentConfig cfg;

  if (!j.is_object()) {
    throw ConfigError({"top level: config must be a JSON object"});
  }

  static const std::set<std::string> common_keys{
      "experiment", "label",  "seed",     "set",      "law",     "sizes",
      "quantiles",  "pass_band", "expect", "out_dir"};
  std::set<std::string> allowed = common_keys;

  cfg.experiment = j.value("experiment", "");
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), cfg.experiment) == kinds.end()) {
    errs.add("experiment", "unknown kind '" + cfg.experiment + "'");
    throw ConfigError(std::move(errs.errors));
  }
  if (cfg.experiment == "sum-asym") {
    allowed.insert({"n_summands", "dependence"});
  } else if (cfg.experiment == "random-sum") {
    allowed.insert({"counting"});
  } else if (cfg.experiment == "scale-mixture") {
    allowed.insert({"theta", "n_summands"});
  } else if (cfg.experiment == "convolution") {
    allowed.insert({"law2"});
  } else if (cfg.experiment == "kesten") {
    allowed.insert({"n_max", "epsilon"});
  } else if (cfg.experiment == "translation") {
    allowed.insert({"shift"});
  } else if (cfg.experiment == "dependence") {
    allowed.insert({"which", "dependence"});
  } else if (cfg.experiment == "classify") {
    allowed.insert({"shift_a", "b", "b_grid", "hill_k"});
  } else if (cfg.experiment == "risk-model") {
    allowed.insert({"risk"});
  } else if (cfg.experiment == "ks-arrivals") {
    allowed.insert({"risk", "ks_n", "m_min"});
  }
  cfgdetail::check_keys(j, "top level", allowed, errs);

  cfg.label = j.value("label", "");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      errs.add("seed", "must be a nonnegative integer");
    } else {
      const auto s = j["seed"].get<std::int64_t>();
      if (s < 0) errs.add("seed", "must be a nonnegative integer");
      else cfg.seed = static_cast<std::uint64_t>(s);
    }
  }
  cfg.expect = j.value("expect", "pass");
  if (cfg.expect != "pass" && cfg.expect != "fail" && cfg.expect != "inconclusive") {
    errs.add("expect", "must be one of pass|fail|inconclusive");
  }
  cfg.out_dir = j.value("out_dir", "");

  const bool needs_set = cfg.experiment != "ks-arrivals";
  if (needs_set) {
    if (j.contains("set")) {
      cfg.set = cfgdetail::parse_set(j["set"], "set", errs);
    } else {
      errs.add("set", "missing");
    }
    if (j.contains("law")) {
      if (auto law = cfgdetail::parse_law(j["law"], "law", errs)) cfg.law = *law;
    } else {
      errs.add("law", "missing");
    }
    if (cfg.set && !cfg.law.marginals.empty() && cfg.set->dims() != cfg.law.dims()) {
      errs.add("law", "dimension differs from the set");
    }
  }

  if (j.contains("sizes")) {
    const auto& s = j["sizes"];
    cfgdetail::check_keys(s, "sizes", {"n_paths", "n_grid", "n_inner", "n_walks"}, errs);
    auto read_size = [&](const char* key, std::uint64_t fallback) {
      const double v = cfgdetail::optional_number(s, "sizes", key,
                                                  static_cast<double>(fallback), errs);
      if (v < 1) {
        errs.add("sizes", std::string("'") + key + "' must be >= 1");
        return fallback;
      }
      return static_cast<std::uint64_t>(v);
    };
    cfg.sizes.n_paths = read_size("n_paths", cfg.sizes.n_paths);
    cfg.sizes.n_grid = read_size("n_grid", cfg.sizes.n_grid);
    cfg.sizes.n_inner = read_size("n_inner", cfg.sizes.n_inner);
    cfg.sizes.n_walks = read_size("n_walks", cfg.sizes.n_walks);
  }

  if (j.contains("quantiles")) {
    cfg.levels = cfgdetail::require_array(j, "quantiles", "quantiles", errs);
    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
      if (cfg.levels[i] <= 0.0 || cfg.levels[i] >= 1.0) {
        errs.add("quantiles", "levels must lie in (0,1)");
        break;
      }
      if (i > 0 && cfg.levels[i] <= cfg.levels[i - 1]) {
        errs.add("quantiles", "levels must be strictly increasing");
        break;
      }
    }
    if (cfg.levels.empty()) errs.add("quantiles", "must not be empty");
  }

  if (j.contains("pass_band")) {
    const auto band = cfgdetail::require_array(j, "pass_band", "pass_band", errs);
    if (band.size() != 2 || !(band[0] > 0.0) || !(band[1] > band[0])) {
      errs.add("pass_band", "must be [lo, hi] with 0 < lo < hi");
    } else {
      cfg.band = PassBand{band[0], band[1]};
    }
  }

  // experiment payloads
  if (cfg.experiment == "sum-asym" || cfg.experiment == "scale-mixture") {
    const double n = cfgdetail::optional_number(j, "top level", "n_summands", 2.0, errs);
    if (n < 1 || n > 64) errs.add("n_summands", "must lie in [1, 64]");
    else cfg.n_summands = static_cast<unsigned>(n);
  }
  if (cfg.experiment == "sum-asym" || cfg.experiment == "dependence") {
    if (j.contains("dependence")) {
      const auto& dep = j["dependence"];
      cfgdetail::check_keys(dep, "dependence", {"structure", "shock"}, errs);
      const std::string structure = dep.value("structure", "independent");
      try {
        cfg.structure = sequence_structure_from_string(structure);
      } catch (const std::invalid_argument& e) {
        errs.add("dependence", e.what());
      }
      if (dep.contains("shock")) {
        cfg.dep_shock = cfgdetail::parse_marginal(dep["shock"], "dependence.shock", errs);
      }
      if (cfg.structure == SequenceStructure::qai_common_shock) {
        if (!cfg.dep_shock) {
          errs.add("dependence", "qai_common_shock requires a shock law");
        } else if (cfg.dep_shock->kind != MarginalKind::exponential) {
          errs.add("dependence",
                   "the shared shock must be light-tailed (exponential); a heavy "
                   "shock would break asymptotic independence");
        }
      }
    }
  }
  if (cfg.experiment == "random-sum") {
    if (j.contains("counting")) {
      cfg.counting = cfgdetail::parse_counting(j["counting"], "counting", errs);
      if (cfg.counting) {
        try {
          cfg.counting->validate();
        } catch (const std::invalid_argument& e) {
          errs.add("counting", e.what());
        }
      }
    } else {
      errs.add("counting", "missing");
    }
  }
  if (cfg.experiment == "scale-mixture") {
    if (j.contains("theta")) {
      cfg.theta = cfgdetail::parse_theta(j["theta"], "theta", errs);
    } else {
      errs.add("theta", "missing");
    }
  }
  if (cfg.experiment == "convolution") {
    if (j.contains("law2")) {
      cfg.law2 = cfgdetail::parse_law(j["law2"], "law2", errs);
      if (cfg.law2 && cfg.set && cfg.law2->dims() != cfg.set->dims()) {
        errs.add("law2", "dimension differs from the set");
      }
    } else {
      errs.add("law2", "missing");
    }
  }
  if (cfg.experiment == "kesten") {
    const double n = cfgdetail::optional_number(j, "top level", "n_max", 10.0, errs);
    if (n < 1 || n > 20) errs.add("n_max", "must lie in [1, 20]");
    else cfg.kesten_n_max = static_cast<unsigned>(n);
    cfg.kesten_epsilon = cfgdetail::optional_number(j, "top level", "epsilon", 0.5, errs);
    if (!(cfg.kesten_epsilon > 0.0)) errs.add("epsilon", "must be positive");
  }
  if (cfg.experiment == "translation") {
    cfg.shift = cfgdetail::require_array(j, "top level", "shift", errs);
    if (cfg.set && cfg.shift.size() != cfg.set->dims()) {
      errs.add("shift", "dimension differs from the set");
    }
  }
  if (cfg.experiment == "dependence") {
    const std::string which = j.value("which", "qai");
    try {
      cfg.dep_kind = dependence_kind_from_string(which);
    } catch (const std::invalid_argument& e) {
      errs.add("which", e.what());
    }
  }
  if (cfg.experiment == "classify") {
    cfg.classify.shift_a = cfgdetail::optional_number(j, "top level", "shift_a", 1.0, errs);
    if (!(cfg.classify.shift_a > 0.0)) errs.add("shift_a", "must be positive");
    cfg.classify.b = cfgdetail::optional_number(j, "top level", "b", 0.5, errs);
    if (!(cfg.classify.b > 0.0 && cfg.classify.b < 1.0)) errs.add("b", "must lie in (0,1)");
    if (j.contains("b_grid")) {
      cfg.classify.b_grid = cfgdetail::require_array(j, "top level", "b_grid", errs);
      for (double b : cfg.classify.b_grid) {
        if (!(b > 0.0 && b <= 1.0)) {
          errs.add("b_grid", "entries must lie in (0,1]");
          break;
        }
      }
    }
    const double k = cfgdetail::optional_number(j, "top level", "hill_k", 1000.0, errs);
    if (k < 10) errs.add("hill_k", "must be >= 10");
    else cfg.classify.hill_k = static_cast<std::size_t>(k);
  }
  if (cfg.experiment == "risk-model" || cfg.experiment == "ks-arrivals") {
    if (j.contains("risk")) {
      const auto& r = j["risk"];
      const std::set<std::string> risk_keys =
          cfg.experiment == "risk-model"
              ? std::set<std::string>{"lambda", "horizon", "returns", "t_mesh", "path_dump"}
              : std::set<std::string>{"lambda", "horizon"};
      cfgdetail::check_keys(r, "risk", risk_keys, errs);
      cfg.risk_lambda = cfgdetail::require_number(r, "risk", "lambda", errs, 1.0);
      if (!(cfg.risk_lambda > 0.0)) errs.add("risk.lambda", "must be positive");
      cfg.risk_horizon = cfgdetail::optional_number(r, "risk", "horizon", 1.0, errs);
      if (!(cfg.risk_horizon > 0.0)) errs.add("risk.horizon", "must be positive");
      if (cfg.experiment == "risk-model") {
        const double mesh = cfgdetail::optional_number(r, "risk", "t_mesh", 64.0, errs);
        if (mesh < 16) errs.add("risk.t_mesh", "needs at least 16 quadrature points");
        else cfg.risk_t_mesh = static_cast<unsigned>(mesh);
        const double dump = cfgdetail::optional_number(r, "risk", "path_dump", 0.0, errs);
        if (dump < 0 || dump > 10'000) {
          errs.add("risk.path_dump", "debug dump is bounded to 10000 paths");
        } else {
          cfg.risk_path_dump = static_cast<std::uint64_t>(dump);
        }
        if (r.contains("returns")) {
          cfgdetail::parse_returns(r["returns"], "risk.returns", cfg, errs);
        } else {
          errs.add("risk.returns", "missing");
        }
        if (cfg.returns.kind == ReturnProcess::Kind::clipped_random_walk &&
            cfg.risk_t_mesh < cfg.returns.mesh_points) {
          errs.add("risk.t_mesh",
                   "quadrature mesh is coarser than the return-process mesh");
        }
      }
    } else {
      errs.add("risk", "missing");
    }
  }
  if (cfg.experiment == "ks-arrivals") {
    if (j.contains("ks_n")) {
      const auto ns = cfgdetail::require_array(j, "top level", "ks_n", errs);
      cfg.ks_n.clear();
      for (double v : ns) {
        if (v < 1 || v > 64) {
          errs.add("ks_n", "entries must lie in [1, 64]");
          break;
        }
        cfg.ks_n.push_back(static_cast<unsigned>(v));
      }
      if (cfg.ks_n.empty()) errs.add("ks_n", "must not be empty");
    }
    const double m = cfgdetail::optional_number(j, "top level", "m_min", 10000.0, errs);
    if (m < 100) errs.add("m_min", "must be >= 100");
    else cfg.ks_m_min = static_cast<std::uint64_t>(m);
  }

  if (!errs.errors.empty()) throw ConfigError(std::move(errs.errors));

  // Canonical form: the input with defaults materialized; hashing this keeps
  // archives comparable across configs that spell defaults differently.
  nlohmann::json canon = j;
  canon["seed"] = cfg.seed;
  canon["label"] = cfg.label;
  canon["expect"] = cfg.expect;
  canon["quantiles"] = cfg.levels;
  canon["sizes"] = {{"n_paths", cfg.sizes.n_paths},
                    {"n_grid", cfg.sizes.n_grid},
                    {"n_inner", cfg.sizes.n_inner},
                    {"n_walks", cfg.sizes.n_walks}};
  canon.erase("out_dir");
  cfg.canonical = canon;
  cfg.config_hash = hash_hex(canon.dump());
  return cfg;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path.string()});
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("JSON parse error: ") + e.what()});
  }
  return parse_config_json(j);
}

}  // namespace bigjump
