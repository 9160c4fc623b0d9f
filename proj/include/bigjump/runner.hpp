#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "bigjump/config.hpp"
#include "bigjump/report.hpp"

namespace bigjump {

struct RunOutcome {
  int exit_code = 1;
  ExperimentReport report;
  nlohmann::json report_json;
  std::filesystem::path archive_dir;
  double wall_seconds = 0.0;
};

// Dispatches a validated config to its verifier.
inline ExperimentReport execute(const ExperimentConfig& cfg, unsigned workers) {
  ExperimentReport report;
  if (cfg.experiment == "classify") {
    report = classify_report(*cfg.set, cfg.law, cfg.sizes, cfg.seed, workers, cfg.classify,
                             cfg.levels);
  } else if (cfg.experiment == "sum-asym") {
    report.main = verify_finite_sum_sbj(*cfg.set, cfg.law, cfg.n_summands, cfg.structure,
                                        cfg.dep_shock, cfg.sizes, cfg.seed, workers,
                                        cfg.levels, cfg.band.value_or(PassBand{0.9, 1.1}));
  } else if (cfg.experiment == "random-sum") {
    report.main = verify_random_sum(*cfg.set, cfg.law, *cfg.counting, cfg.sizes, cfg.seed,
                                    workers, cfg.levels,
                                    cfg.band.value_or(PassBand{0.85, 1.15}));
  } else if (cfg.experiment == "scale-mixture") {
    report.main = verify_scale_mixture(*cfg.set, cfg.law, *cfg.theta, cfg.n_summands,
                                       cfg.sizes, cfg.seed, workers, cfg.levels,
                                       cfg.band.value_or(PassBand{0.9, 1.1}));
  } else if (cfg.experiment == "convolution") {
    report.main = verify_convolution_maxsum(*cfg.set, cfg.law, *cfg.law2, cfg.sizes,
                                            cfg.seed, workers, cfg.levels,
                                            cfg.band.value_or(PassBand{0.9, 1.1}));
  } else if (cfg.experiment == "kesten") {
    report.main = verify_kesten_growth(*cfg.set, cfg.law, cfg.kesten_n_max,
                                       cfg.kesten_epsilon, cfg.sizes, cfg.seed, workers);
  } else if (cfg.experiment == "translation") {
    report.main = verify_translation_insensitivity(
        *cfg.set, cfg.law, cfg.shift, cfg.sizes, cfg.seed, workers, cfg.levels,
        cfg.band.value_or(PassBand{0.9, 1.1}));
  } else if (cfg.experiment == "dependence") {
    report.main = check_dependence_assumption(*cfg.set, cfg.law, cfg.structure,
                                              cfg.dep_shock, cfg.dep_kind, cfg.sizes,
                                              cfg.seed, workers, cfg.levels);
  } else if (cfg.experiment == "risk-model") {
    RiskConfig risk{cfg.risk_lambda, cfg.risk_horizon, cfg.law, cfg.returns, *cfg.set};
    report.main = verify_aggregate_claims(risk, cfg.sizes, cfg.seed, workers, cfg.levels,
                               cfg.band.value_or(PassBand{0.85, 1.15}), cfg.risk_t_mesh);
    if (cfg.risk_path_dump > 0) {
      const auto records = simulate_paths(risk, cfg.risk_path_dump, cfg.seed, workers);
      std::ostringstream os;
      os << "path,claim_index,arrival,discount";
      for (std::size_t j = 0; j < risk.set.dims(); ++j) os << ",claim_" << j;
      os << ",y_total\n";
      for (std::size_t p = 0; p < records.size(); ++p) {
        const auto& rec = records[p];
        const double y_total = risk.set.scalarize(rec.total);
        for (std::size_t i = 0; i < rec.discounts.size(); ++i) {
          os << p << ',' << i << ',' << detail::format_double(rec.arrivals[i]) << ','
             << detail::format_double(rec.discounts[i]);
          for (std::size_t j = 0; j < risk.set.dims(); ++j) {
            os << ',' << detail::format_double(rec.claims[i * risk.set.dims() + j]);
          }
          os << ',' << detail::format_double(y_total) << '\n';
        }
      }
      report.extra_files.emplace_back("paths.csv", os.str());
    }
  } else if (cfg.experiment == "ks-arrivals") {
    report.main = check_order_statistics_identity(cfg.risk_lambda, cfg.risk_horizon,
                                                  cfg.ks_n, cfg.sizes.n_paths, cfg.ks_m_min,
                                                  cfg.seed, workers);
  } else {
    throw std::runtime_error("unknown experiment kind: " + cfg.experiment);
  }
  return report;
}

// Runs the experiment and writes the archive atomically: everything lands in
// a temporary sibling directory that is renamed over the target at the end,
// so a crashed run never leaves a half-written archive behind.
inline RunOutcome run_experiment(const ExperimentConfig& cfg, unsigned workers,
                                 const std::filesystem::path& out_override = {}) {
  namespace fs = std::filesystem;
  RunOutcome outcome;

  const auto t0 = std::chrono::steady_clock::now();
  outcome.report = execute(cfg, workers);
  outcome.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  outcome.report_json = report_to_json(outcome.report, cfg.canonical, cfg.config_hash,
                                       resolve_workers(workers),
                                       outcome.wall_seconds * 1000.0);
  outcome.exit_code = verdict_exit_code(outcome.report.main.verdict);

  fs::path out_dir = out_override;
  if (out_dir.empty() && !cfg.out_dir.empty()) out_dir = cfg.out_dir;
  if (out_dir.empty()) return outcome;  // in-memory run

  const fs::path tmp = out_dir.string() + ".partial";
  try {
    fs::remove_all(tmp);
    fs::create_directories(tmp / "curves");
    {
      std::ofstream os(tmp / "config.json");
      os << cfg.canonical.dump(2) << '\n';
    }
    {
      std::ofstream os(tmp / "report.json");
      os << outcome.report_json.dump(2) << '\n';
    }
    {
      std::ofstream os(tmp / "curves" / "curve.csv");
      write_curve_csv(os, outcome.report.main.curve);
    }
    for (const auto& [name, curve] : outcome.report.extra_curves) {
      std::ofstream os(tmp / "curves" / (name + ".csv"));
      write_curve_csv(os, curve);
    }
    for (const auto& [name, content] : outcome.report.extra_files) {
      std::ofstream os(tmp / name);
      os << content;
    }
    fs::remove_all(out_dir);
    fs::create_directories(out_dir.parent_path().empty() ? "." : out_dir.parent_path());
    fs::rename(tmp, out_dir);
    outcome.archive_dir = out_dir;
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
  return outcome;
}

// Manifest format: one config path per line, '#' starts a comment. Every
// config is validated before anything runs; a single bad config aborts the
// whole suite with exit 1.
inline int emit_suite(const std::filesystem::path& manifest, unsigned workers,
                      const std::filesystem::path& out_root, std::ostream& summary,
                      std::ostream& log = std::cerr) {
  namespace fs = std::filesystem;
  std::ifstream in(manifest);
  if (!in) {
    log << "cannot open manifest: " << manifest << '\n';
    return 1;
  }
  std::vector<std::pair<fs::path, ExperimentConfig>> configs;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
      line.pop_back();
    }
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    fs::path p = line.substr(start);
    if (p.is_relative()) p = manifest.parent_path() / p;
    try {
      configs.emplace_back(p, parse_config(p));
    } catch (const ConfigError& e) {
      log << p.string() << ": " << e.what() << '\n';
      return 1;
    }
  }

  summary << "tag,verdict,expected,deepest_x,ratio,ci_lo,ci_hi,runtime_s\n";
  bool all_expected = true;
  for (const auto& [path, cfg] : configs) {
    const std::string tag = path.stem().string();
    fs::path out_dir = out_root.empty() ? fs::path{} : out_root / tag;
    RunOutcome outcome;
    try {
      outcome = run_experiment(cfg, workers, out_dir);
    } catch (const std::exception& e) {
      log << tag << ": error: " << e.what() << '\n';
      return 1;
    }
    const auto& main = outcome.report.main;
    double deepest_x = std::numeric_limits<double>::quiet_NaN();
    double ratio = deepest_x, ci_lo = deepest_x, ci_hi = deepest_x;
    if (const auto idx = main.curve.deepest_resolvable()) {
      const auto& pt = main.curve.points[*idx];
      deepest_x = pt.x;
      ratio = pt.ratio;
      ci_lo = pt.ci_lo;
      ci_hi = pt.ci_hi;
    }
    summary << tag << ',' << verdict_name(main.verdict) << ',' << cfg.expect << ','
            << detail::format_double(deepest_x) << ',' << detail::format_double(ratio)
            << ',' << detail::format_double(ci_lo) << ',' << detail::format_double(ci_hi)
            << ',' << detail::format_double(outcome.wall_seconds) << '\n';
    summary.flush();
    if (verdict_name(main.verdict) != cfg.expect) {
      all_expected = false;
      log << tag << ": verdict " << verdict_name(main.verdict) << ", expected "
          << cfg.expect << '\n';
    }
  }
  return all_expected ? 0 : 2;
}

}  // namespace bigjump
