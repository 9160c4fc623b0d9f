#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bigjump/ratio_curve.hpp"
#include "bigjump/sampling.hpp"
#include "bigjump/tail_estimate.hpp"

namespace bigjump {

// ratio(x) = F_A(x - a) / F_A(x); tends to 1 along long-tailed laws.
inline RatioCurve long_tail_curve(const TailEstimate& t, double shift_a,
                                  const std::vector<double>& levels = default_levels()) {
  if (!(shift_a >= 0.0)) throw std::invalid_argument("long_tail_curve: shift must be >= 0");
  if (shift_a >= t.max_value()) {
    throw std::invalid_argument("long_tail_curve: shift exceeds the sample range");
  }
  RatioCurve curve;
  for (double x : quantile_grid(t, levels)) {
    curve.points.push_back(make_ratio_point(x, t.count_above(x - shift_a), t.size(),
                                            t.count_above(x), t.size()));
  }
  return curve;
}

// ratio(x) = F_A(b x) / F_A(x) for b in (0,1); bounded along dominatedly
// varying laws, exploding along light tails.
inline RatioCurve dominated_variation_curve(const TailEstimate& t, double b,
                                            const std::vector<double>& levels = default_levels()) {
  if (!(b > 0.0 && b < 1.0)) {
    throw std::invalid_argument("dominated_variation_curve: b must lie in (0,1)");
  }
  RatioCurve curve;
  for (double x : quantile_grid(t, levels)) {
    curve.points.push_back(
        make_ratio_point(x, t.count_above(b * x), t.size(), t.count_above(x), t.size()));
  }
  return curve;
}

struct VariationProfile {
  double b = 0.0;
  double plateau = 0.0;   // median ratio over the probed grid
  double spread = 0.0;    // max/min ratio across the grid; ~1 means a flat plateau
  RatioCurve curve;
};

// One dominated-variation curve per b; for consistently varying laws the
// per-b plateau drifts to 1 as b increases toward 1.
inline std::vector<VariationProfile> consistent_variation_profile(
    const TailEstimate& t, const std::vector<double>& b_grid,
    const std::vector<double>& levels = default_levels()) {
  std::vector<VariationProfile> out;
  for (std::size_t i = 1; i < b_grid.size(); ++i) {
    if (b_grid[i] <= b_grid[i - 1]) {
      throw std::invalid_argument(
          "consistent_variation_profile: b grid must ascend toward 1");
    }
  }
  for (double b : b_grid) {
    if (!(b > 0.0 && b <= 1.0)) {
      throw std::invalid_argument("consistent_variation_profile: b must lie in (0,1]");
    }
    VariationProfile prof;
    prof.b = b;
    if (b == 1.0) {
      prof.plateau = 1.0;
      prof.spread = 1.0;
      out.push_back(std::move(prof));
      continue;
    }
    prof.curve = dominated_variation_curve(t, b, levels);
    std::vector<double> ratios;
    for (const auto& pt : prof.curve.points) {
      if (pt.resolvable) ratios.push_back(pt.ratio);
    }
    if (!ratios.empty()) {
      std::vector<double> sorted = ratios;
      std::sort(sorted.begin(), sorted.end());
      prof.plateau = sorted[sorted.size() / 2];
      prof.spread = sorted.back() / sorted.front();
    }
    out.push_back(std::move(prof));
  }
  return out;
}

// ratio(x) = P[Y' + Y'' > x] / P[Y > x] from two independent batches of the
// same law; tends to 2 exactly when the scalarized law is subexponential.
// The denominator pools both batches.
inline RatioCurve subexponential_curve(const SampleBatch& batch1, const SampleBatch& batch2,
                                       const std::vector<double>& levels = default_levels()) {
  if (batch1.y.empty() || batch2.y.empty()) {
    throw std::invalid_argument("subexponential_curve: batches must carry scalarizations");
  }
  if (batch1.y.size() != batch2.y.size()) {
    throw std::invalid_argument("subexponential_curve: batch sizes differ");
  }
  if (batch1.law_tag != batch2.law_tag) {
    throw std::invalid_argument("subexponential_curve: batches come from different laws");
  }
  if (batch1.seed == batch2.seed) {
    throw std::invalid_argument(
        "subexponential_curve: batches share a seed and are not independent");
  }
  const std::size_t n = batch1.y.size();
  std::vector<double> sums(n);
  for (std::size_t i = 0; i < n; ++i) sums[i] = batch1.y[i] + batch2.y[i];
  TailEstimate sum_tail(std::move(sums));

  std::vector<double> pooled;
  pooled.reserve(2 * n);
  pooled.insert(pooled.end(), batch1.y.begin(), batch1.y.end());
  pooled.insert(pooled.end(), batch2.y.begin(), batch2.y.end());
  TailEstimate single_tail(std::move(pooled));

  RatioCurve curve;
  for (double x : quantile_grid(single_tail, levels)) {
    curve.points.push_back(make_ratio_point(x, sum_tail.count_above(x), sum_tail.size(),
                                            single_tail.count_above(x), single_tail.size()));
  }
  return curve;
}

struct HillEstimate {
  double alpha = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t k = 0;
  bool unstable = false;  // tail index drifts across threshold windows
  double drift_z = 0.0;
};

// Hill estimator over the top k order statistics with the asymptotic
// normal interval alpha*(1 +- 1.96/sqrt(k)). The stability probe compares the
// estimate across a 16-fold spread of windows: a genuine power tail gives a
// flat plateau, a light tail drifts monotonically with depth.
inline HillEstimate hill_index(const TailEstimate& t, std::size_t k) {
  const std::size_t n = t.size();
  if (k < 10 || k > n / 10) {
    throw std::invalid_argument("hill_index: need 10 <= k <= n/10");
  }
  const auto& v = t.sorted_values();
  auto hill_at = [&](std::size_t kk) {
    const double x_ref = v[n - kk - 1];
    if (!(x_ref > 0.0)) {
      throw std::invalid_argument("hill_index: nonpositive order statistic in the tail window");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < kk; ++i) acc += std::log(v[n - 1 - i] / x_ref);
    return static_cast<double>(kk) / acc;
  };

  HillEstimate est;
  est.k = k;
  est.alpha = hill_at(k);
  const double half = 1.96 / std::sqrt(static_cast<double>(k));
  est.ci_lo = est.alpha * (1.0 - half);
  est.ci_hi = est.alpha * (1.0 + half);

  const std::size_t k_wide = std::min(4 * k, n / 10);
  const std::size_t k_narrow = std::max<std::size_t>(k / 4, 10);
  if (k_wide > k && k_narrow < k) {
    const double drift = hill_at(k_narrow) - hill_at(k_wide);
    const double scale = est.alpha * std::sqrt(1.0 / static_cast<double>(k_narrow) +
                                               1.0 / static_cast<double>(k_wide));
    est.drift_z = drift / scale;
    est.unstable = std::fabs(est.drift_z) > 3.0;
  }
  return est;
}

}  // namespace bigjump
