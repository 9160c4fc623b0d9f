#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bigjump/verifiers.hpp"

namespace bigjump {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchemaVersion = "1";

// Extended report with named side curves (used by the classification run and
// the variation profile, which produce one curve per parameter value) and
// optional extra archive files such as the per-path debug dump.
struct ExperimentReport {
  VerifierReport main;
  std::vector<std::pair<std::string, RatioCurve>> extra_curves;
  std::vector<std::pair<std::string, std::string>> extra_files;
};

namespace detail {

inline nlohmann::json curve_to_json(const RatioCurve& curve) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& pt : curve.points) {
    nlohmann::json row;
    row["x"] = pt.x;
    row["lhs"] = pt.lhs;
    row["rhs"] = pt.rhs;
    row["ratio"] = std::isfinite(pt.ratio) ? nlohmann::json(pt.ratio) : nlohmann::json();
    row["ci_lo"] = std::isfinite(pt.ci_lo) ? nlohmann::json(pt.ci_lo) : nlohmann::json();
    row["ci_hi"] = std::isfinite(pt.ci_hi) ? nlohmann::json(pt.ci_hi) : nlohmann::json();
    row["n_lhs"] = pt.n_lhs;
    row["n_rhs"] = pt.n_rhs;
    row["resolvable"] = pt.resolvable;
    points.push_back(std::move(row));
  }
  return nlohmann::json{{"points", std::move(points)}};
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Fixed column order; consumed by any external plotting tool.
inline void write_curve_csv(std::ostream& os, const RatioCurve& curve) {
  os << "x,lhs,rhs,ratio,ci_lo,ci_hi,n_exceed\n";
  for (const auto& pt : curve.points) {
    os << detail::format_double(pt.x) << ',' << detail::format_double(pt.lhs) << ','
       << detail::format_double(pt.rhs) << ',' << detail::format_double(pt.ratio) << ','
       << detail::format_double(pt.ci_lo) << ',' << detail::format_double(pt.ci_hi) << ','
       << pt.n_lhs << '\n';
  }
}

// Everything except meta.wall_ms is reproducible byte for byte.
inline nlohmann::json report_to_json(const ExperimentReport& report,
                                     const nlohmann::json& config,
                                     const std::string& config_hash, unsigned workers,
                                     double wall_ms) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["config"] = config;
  j["config_hash"] = config_hash;
  j["seed"] = report.main.seed;
  j["tag"] = report.main.tag;
  j["verdict"] = verdict_name(report.main.verdict);
  j["rule"] = report.main.rule;
  j["n_paths"] = report.main.n_paths;
  j["grid_levels"] = report.main.grid_levels;
  j["metrics"] = report.main.metrics;
  j["violations"] = report.main.violations;
  j["curve"] = detail::curve_to_json(report.main.curve);
  nlohmann::json extras = nlohmann::json::object();
  for (const auto& [name, curve] : report.extra_curves) {
    extras[name] = detail::curve_to_json(curve);
  }
  j["extra_curves"] = std::move(extras);
  j["meta"] = {{"wall_ms", wall_ms}, {"workers", workers}};
  return j;
}

inline int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::pass: return 0;
    case Verdict::fail: return 2;
    case Verdict::inconclusive: return 3;
  }
  return 1;
}

}  // namespace bigjump
