#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bigjump/diagnostics.hpp"
#include "bigjump/report.hpp"
#include "bigjump/verifiers.hpp"

namespace bigjump {

struct ClassifyParams {
  double shift_a = 1.0;
  double b = 0.5;
  std::vector<double> b_grid{0.8, 0.9, 0.95, 0.99};
  std::size_t hill_k = 1000;
};

// Tail-class diagnostics for the scalarized law: long-tail, dominated
// variation, consistent variation and the two-fold convolution ratio, plus
// tail-index recovery. Verdicts are CI-based at the achievable range, never
// claims about the actual limits; the overall verdict passes only when every
// class check is consistent with a heavy tail, so a light-tailed
// configuration fails as a negative control.
inline ExperimentReport classify_report(const RuinSet& set, const VectorLaw& law,
                                        const Sizes& sizes, std::uint64_t seed,
                                        unsigned workers = 0,
                                        const ClassifyParams& params = {},
                                        const std::vector<double>& levels = default_levels()) {
  law.validate();
  SampleBatch batch1, batch2;
  batch1.seed = SeedSpec{seed, kClaimsStream, 0};
  batch2.seed = SeedSpec{seed, kSecondLaw, 0};
  batch1.law_tag = batch2.law_tag = law.to_string();
  batch1.dims = batch2.dims = law.dims();
  batch1.count = batch2.count = sizes.n_paths;
  batch1.y = draw_scalarized(law, set, sizes.n_paths, batch1.seed, workers);
  batch2.y = draw_scalarized(law, set, sizes.n_paths, batch2.seed, workers);

  TailEstimate tail{batch1.y};

  ExperimentReport report;
  report.main.tag = "class_diagnostics";
  report.main.seed = seed;
  report.main.n_paths = sizes.n_paths;
  report.main.grid_levels = levels;

  // long tail: F(x-a)/F(x) stays near 1
  const RatioCurve lcurve = long_tail_curve(tail, params.shift_a, levels);
  const Verdict l_verdict = band_verdict(lcurve, {1.0 / 1.15, 1.15});

  // dominated variation: F(bx)/F(x) stable across the grid
  const RatioCurve dcurve = dominated_variation_curve(tail, params.b, levels);
  Verdict d_verdict = Verdict::inconclusive;
  {
    std::vector<double> ratios;
    for (const auto& pt : dcurve.points) {
      if (pt.resolvable) ratios.push_back(pt.ratio);
    }
    if (ratios.size() >= 2) {
      const double growth = ratios.back() / ratios.front();
      d_verdict = growth <= 1.5 ? Verdict::pass : Verdict::fail;
      report.main.metrics["d_ratio_growth"] = growth;
    }
    if (!ratios.empty()) report.main.metrics["d_ratio_deepest"] = ratios.back();
  }

  // consistent variation: per-b plateaus flat and drifting to 1 as b -> 1
  const auto profile = consistent_variation_profile(tail, params.b_grid, levels);
  Verdict c_verdict = Verdict::pass;
  double plateau_last = 0.0;
  for (const auto& prof : profile) {
    if (prof.plateau == 0.0) {
      c_verdict = Verdict::inconclusive;
      break;
    }
    if (prof.spread > 1.3) c_verdict = Verdict::fail;
    plateau_last = prof.plateau;
  }
  if (c_verdict == Verdict::pass &&
      !(plateau_last >= 1.0 / 1.1 && plateau_last <= 1.1)) {
    c_verdict = Verdict::fail;
  }

  // subexponential: two-fold convolution ratio near 2
  const RatioCurve scurve = subexponential_curve(batch1, batch2, levels);
  const Verdict s_verdict = band_verdict(scurve, {1.8, 2.2});

  // tail index
  const std::size_t k = std::min(params.hill_k, tail.size() / 10);
  HillEstimate hill;
  bool hill_ok = false;
  if (k >= 10) {
    hill = hill_index(tail, k);
    hill_ok = true;
    report.main.metrics["hill_alpha"] = hill.alpha;
    report.main.metrics["hill_ci_lo"] = hill.ci_lo;
    report.main.metrics["hill_ci_hi"] = hill.ci_hi;
    report.main.metrics["hill_drift_z"] = hill.drift_z;
    report.main.metrics["hill_unstable"] = hill.unstable ? 1.0 : 0.0;
  }

  auto flag = [](Verdict v) { return v == Verdict::pass ? 1.0 : 0.0; };
  report.main.metrics["class_long"] = flag(l_verdict);
  report.main.metrics["class_dominated"] = flag(d_verdict);
  report.main.metrics["class_consistent"] = flag(c_verdict);
  report.main.metrics["class_subexponential"] = flag(s_verdict);
  if (!profile.empty()) report.main.metrics["c_plateau_last"] = plateau_last;

  report.main.curve = lcurve;
  report.extra_curves.emplace_back("dominated_variation", dcurve);
  report.extra_curves.emplace_back("subexponential", scurve);
  for (const auto& prof : profile) {
    std::ostringstream name;
    name << "profile_b" << prof.b;
    report.extra_curves.emplace_back(name.str(), prof.curve);
  }

  std::ostringstream rule;
  rule << "consistent-with-class checks at the deepest grid point with >= "
       << kMinExceedances
       << " exceedances: long CI in [0.87,1.15]; dominated growth <= 1.5; "
          "plateaus flat (spread <= 1.3) with last plateau in [0.91,1.10]; "
          "two-fold ratio CI in [1.8,2.2]; overall pass iff all four hold";
  report.main.rule = rule.str();

  const bool all_pass = l_verdict == Verdict::pass && d_verdict == Verdict::pass &&
                        c_verdict == Verdict::pass && s_verdict == Verdict::pass;
  const bool any_inconclusive =
      l_verdict == Verdict::inconclusive || d_verdict == Verdict::inconclusive ||
      c_verdict == Verdict::inconclusive || s_verdict == Verdict::inconclusive || !hill_ok;
  report.main.verdict = all_pass ? Verdict::pass
                                 : (any_inconclusive ? Verdict::inconclusive : Verdict::fail);
  return report;
}

}  // namespace bigjump
