#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bigjump/tail_estimate.hpp"

namespace bigjump {

// Exceedance counts below this are treated as unresolvable: the ratio at such
// a grid point is flagged instead of interpreted.
inline constexpr std::uint64_t kMinExceedances = 50;

struct RatioPoint {
  double x = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t n_lhs = 0;  // exceedance count behind lhs
  std::uint64_t n_rhs = 0;  // exceedance count behind rhs
  bool resolvable = false;
};

// Conservative ratio interval from two independently bounded binomials:
// [lhs_lo/rhs_hi, lhs_hi/rhs_lo].
inline RatioPoint make_ratio_point(double x, std::uint64_t lhs_count, std::uint64_t lhs_trials,
                                   std::uint64_t rhs_count, std::uint64_t rhs_trials,
                                   double rhs_scale = 1.0, std::uint64_t min_count = kMinExceedances) {
  RatioPoint pt;
  pt.x = x;
  pt.n_lhs = lhs_count;
  pt.n_rhs = rhs_count;
  pt.lhs = static_cast<double>(lhs_count) / static_cast<double>(lhs_trials);
  pt.rhs = rhs_scale * static_cast<double>(rhs_count) / static_cast<double>(rhs_trials);
  pt.resolvable = lhs_count >= min_count && rhs_count >= min_count;
  if (rhs_count > 0) {
    pt.ratio = pt.lhs / pt.rhs;
    const BinomialCi lci = clopper_pearson(lhs_count, lhs_trials);
    const BinomialCi rci = clopper_pearson(rhs_count, rhs_trials);
    pt.ci_lo = lci.lo / (rhs_scale * rci.hi);
    pt.ci_hi = rci.lo > 0.0 ? lci.hi / (rhs_scale * rci.lo)
                            : std::numeric_limits<double>::infinity();
  }
  return pt;
}

struct RatioCurve {
  std::vector<RatioPoint> points;

  // Largest grid point that still carries enough statistics.
  std::optional<std::size_t> deepest_resolvable() const {
    for (std::size_t i = points.size(); i-- > 0;) {
      if (points[i].resolvable) return i;
    }
    return std::nullopt;
  }
};

struct PassBand {
  double lo = 0.9;
  double hi = 1.1;
};

enum class Verdict { pass, fail, inconclusive };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

// Pass iff the ratio CI at the deepest resolvable grid point intersects the
// band; no resolvable point means the run cannot decide either way.
inline Verdict band_verdict(const RatioCurve& curve, const PassBand& band,
                            std::size_t* deepest_out = nullptr) {
  const auto idx = curve.deepest_resolvable();
  if (!idx) return Verdict::inconclusive;
  if (deepest_out) *deepest_out = *idx;
  const RatioPoint& pt = curve.points[*idx];
  if (std::isnan(pt.ci_lo) || std::isnan(pt.ci_hi)) return Verdict::inconclusive;
  return (pt.ci_lo <= band.hi && pt.ci_hi >= band.lo) ? Verdict::pass : Verdict::fail;
}

}  // namespace bigjump
