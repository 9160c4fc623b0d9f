#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "bigjump/verifiers.hpp"

namespace bigjump {

// Log-return process of the investment portfolio over [0, T]. Either a
// deterministic constant force, or a Gaussian random walk on a fixed mesh
// whose path is clipped into [-clip_lo, clip_hi]; clipping enforces the
// almost-sure bounds exactly rather than probabilistically.
struct ReturnProcess {
  enum class Kind { constant, clipped_random_walk };

  Kind kind = Kind::constant;
  double rate = 0.0;       // constant: R_t = rate * t
  double sigma = 0.0;      // walk: increment scale per unit time
  double clip_lo = 0.0;    // C1 >= 0: inf R_t > -C1
  double clip_hi = 0.0;    // C2 >= 0: sup R_t <= C2
  unsigned mesh_points = 256;

  static ReturnProcess constant(double rate) {
    ReturnProcess r;
    r.kind = Kind::constant;
    r.rate = rate;
    return r;
  }
  static ReturnProcess clipped_random_walk(double sigma, double clip_lo, double clip_hi,
                                           unsigned mesh_points = 256) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("returns: sigma must be >= 0");
    if (!(clip_lo >= 0.0) || !(clip_hi >= 0.0) || !std::isfinite(clip_lo) ||
        !std::isfinite(clip_hi)) {
      throw std::invalid_argument("returns: clip bounds must be finite and >= 0");
    }
    if (mesh_points == 0) throw std::invalid_argument("returns: mesh needs >= 1 point");
    ReturnProcess r;
    r.kind = Kind::clipped_random_walk;
    r.sigma = sigma;
    r.clip_lo = clip_lo;
    r.clip_hi = clip_hi;
    r.mesh_points = mesh_points;
    return r;
  }

  // Almost-sure bounds of R_t over [0, T]; discount factors live in
  // [exp(-bound_hi), exp(bound_lo)].
  double bound_lo(double horizon) const {
    return kind == Kind::constant ? std::max(0.0, -rate * horizon) : clip_lo;
  }
  double bound_hi(double horizon) const {
    return kind == Kind::constant ? std::max(0.0, rate * horizon) : clip_hi;
  }
};

struct RiskConfig {
  double lambda = 1.0;   // Poisson claim intensity
  double horizon = 1.0;  // T
  VectorLaw claim_law;
  ReturnProcess returns;
  RuinSet set;

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("risk: lambda must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("risk: horizon must be positive");
    claim_law.validate();
    if (claim_law.dims() != set.dims()) {
      throw std::invalid_argument("risk: claim law and set dimension mismatch");
    }
  }
};

struct PathRecord {
  std::vector<double> arrivals;   // ascending in (0, T]
  std::vector<double> claims;     // row-major claim vectors
  std::vector<double> discounts;  // exp(-R_{tau_i}) per claim
  std::vector<double> total;      // D(T), componentwise discounted sum
};

namespace detail {

// Clipped-walk evaluator for one path: piecewise constant between mesh nodes,
// plateau k (t in [k dt, (k+1) dt)) carries the clipped prefix sum of k
// increments, so R = 0 on the first plateau.
class WalkEvaluator {
 public:
  WalkEvaluator(const ReturnProcess& rp, double horizon, const CounterRng& rng)
      : rp_(rp), horizon_(horizon), rng_(rng), dt_(horizon / rp.mesh_points),
        step_(rp.sigma * std::sqrt(horizon / rp.mesh_points)) {}

  // Requires nondecreasing query times across calls on one path.
  double log_return_at(double t) {
    if (rp_.kind == ReturnProcess::Kind::constant) return rp_.rate * t;
    const unsigned idx = std::min<unsigned>(static_cast<unsigned>(t / dt_),
                                            rp_.mesh_points - 1);
    while (steps_done_ < idx) {
      const double z = inverse_normal_cdf(rng_.uniform(steps_done_));
      value_ = std::clamp(value_ + step_ * z, -rp_.clip_lo, rp_.clip_hi);
      ++steps_done_;
    }
    return value_;
  }

 private:
  const ReturnProcess& rp_;
  double horizon_;
  CounterRng rng_;
  double dt_;
  double step_;
  double value_ = 0.0;
  unsigned steps_done_ = 0;
};

}  // namespace detail

// Simulates full path records: Poisson count, conditionally-uniform arrival
// times, iid claims, discount factors from the return process. The claim count
// and the claim draws share streams with verify_random_sum, so a constant(0)
// return process reproduces the randomly-stopped-sum machinery exactly.
inline std::vector<PathRecord> simulate_paths(const RiskConfig& cfg, std::uint64_t n_paths,
                                              std::uint64_t seed, unsigned workers = 0) {
  cfg.validate();
  if (n_paths > 100'000) {
    throw std::invalid_argument("simulate_paths: per-path records are capped at 1e5 paths; "
                                "use lhs_tail for larger runs");
  }
  const std::size_t d = cfg.claim_law.dims();
  const CountingLaw counting = CountingLaw::poisson(cfg.lambda * cfg.horizon);
  const CounterRng count_rng(seed, kCountStream, 0);
  const std::uint64_t stride = cfg.claim_law.uniforms_per_draw();
  std::vector<PathRecord> records(n_paths);

  map_chunks<int>(n_paths, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
    std::vector<double> claim(d);
    for (std::uint64_t p = begin; p < end; ++p) {
      PathRecord& rec = records[p];
      const std::uint64_t n_claims = counting.draw(count_rng, p);
      const CounterRng claims(seed, kClaimsStream, p);
      const CounterRng arrivals(seed, kArrivalStream, p);
      detail::WalkEvaluator walk(cfg.returns, cfg.horizon,
                                 CounterRng(seed, kReturnStream, p));
      rec.arrivals.resize(n_claims);
      for (std::uint64_t i = 0; i < n_claims; ++i) {
        rec.arrivals[i] = cfg.horizon * arrivals.uniform(i);
      }
      std::sort(rec.arrivals.begin(), rec.arrivals.end());
      rec.claims.resize(n_claims * d);
      rec.discounts.resize(n_claims);
      rec.total.assign(d, 0.0);
      for (std::uint64_t i = 0; i < n_claims; ++i) {
        cfg.claim_law.draw(claims, i * stride, claim);
        const double factor = std::exp(-walk.log_return_at(rec.arrivals[i]));
        rec.discounts[i] = factor;
        for (std::size_t j = 0; j < d; ++j) {
          rec.claims[i * d + j] = claim[j];
          rec.total[j] += claim[j] * factor;
        }
      }
    }
    return 0;
  });
  return records;
}

struct LhsTail {
  TailEstimate tail;                       // distribution of Y_A(D(T))
  std::uint64_t discount_bound_violations; // factors outside [e^-C2, e^C1]
  double empirical_claim_mean;             // mean N_T across paths
};

// Exceedance side of the aggregate-claims check: Y_A(D(T)) over n_paths
// simulated paths, streamed and then frozen into a TailEstimate.
inline LhsTail lhs_tail(const RiskConfig& cfg, std::uint64_t n_paths, std::uint64_t seed,
                        unsigned workers = 0) {
  cfg.validate();
  const std::size_t d = cfg.claim_law.dims();
  const CountingLaw counting = CountingLaw::poisson(cfg.lambda * cfg.horizon);
  const CounterRng count_rng(seed, kCountStream, 0);
  const std::uint64_t stride = cfg.claim_law.uniforms_per_draw();
  const double f_lo = std::exp(-cfg.returns.bound_hi(cfg.horizon)) * (1.0 - 1e-12);
  const double f_hi = std::exp(cfg.returns.bound_lo(cfg.horizon)) * (1.0 + 1e-12);

  std::vector<double> y(n_paths);
  struct Part {
    std::uint64_t violations = 0;
    std::uint64_t claim_total = 0;
    Part& operator+=(const Part& o) {
      violations += o.violations;
      claim_total += o.claim_total;
      return *this;
    }
  };
  auto parts = map_chunks<Part>(
      n_paths, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        Part part;
        std::vector<double> claim(d), total(d), arrivals;
        for (std::uint64_t p = begin; p < end; ++p) {
          const std::uint64_t n_claims = counting.draw(count_rng, p);
          part.claim_total += n_claims;
          if (n_claims == 0) {
            y[p] = 0.0;
            continue;
          }
          const CounterRng claims(seed, kClaimsStream, p);
          const CounterRng arr(seed, kArrivalStream, p);
          detail::WalkEvaluator walk(cfg.returns, cfg.horizon,
                                     CounterRng(seed, kReturnStream, p));
          arrivals.resize(n_claims);
          for (std::uint64_t i = 0; i < n_claims; ++i) {
            arrivals[i] = cfg.horizon * arr.uniform(i);
          }
          std::sort(arrivals.begin(), arrivals.end());
          std::fill(total.begin(), total.end(), 0.0);
          for (std::uint64_t i = 0; i < n_claims; ++i) {
            cfg.claim_law.draw(claims, i * stride, claim);
            const double factor = std::exp(-walk.log_return_at(arrivals[i]));
            if (factor < f_lo || factor > f_hi) ++part.violations;
            for (std::size_t j = 0; j < d; ++j) total[j] += claim[j] * factor;
          }
          y[p] = cfg.set.scalarize(total);
        }
        return part;
      });
  const auto folded = detail::fold_parts(std::move(parts), Part{});
  return LhsTail{TailEstimate(std::move(y)), folded.violations,
                 static_cast<double>(folded.claim_total) / static_cast<double>(n_paths)};
}

struct RhsIntegral {
  std::vector<double> thresholds;
  std::vector<double> value;  // lambda * integral_0^T P[X e^{-R_t} in xA] dt
  std::vector<double> sd;     // conservative, fully-correlated error propagation
  std::vector<std::uint64_t> inner_exceed;  // undiscounted inner counts, diagnostic
};

// Quadrature side: trapezoid over the t mesh of the inner Monte Carlo
// estimate of P[X e^{-R_t} in xA]. One claim sample is shared across all mesh
// nodes (only the discount factor varies), which makes the integrand smooth
// in t; walk marginals come from an independent sample of return paths.
inline RhsIntegral rhs_integral(const RiskConfig& cfg, std::uint64_t n_inner,
                                unsigned t_mesh, const std::vector<double>& thresholds,
                                std::uint64_t seed, unsigned workers = 0,
                                std::uint64_t n_walks = 20'000) {
  cfg.validate();
  if (t_mesh < 16) throw std::invalid_argument("rhs_integral: need at least 16 mesh points");
  if (cfg.returns.kind == ReturnProcess::Kind::clipped_random_walk &&
      t_mesh < cfg.returns.mesh_points) {
    throw std::invalid_argument(
        "rhs_integral: quadrature mesh is coarser than the return-process mesh");
  }

  std::vector<double> y = draw_scalarized(cfg.claim_law, cfg.set, n_inner,
                                          SeedSpec{seed, kInnerClaims, 0}, workers);
  std::sort(y.begin(), y.end());

  // Marginal log-returns at each quadrature node.
  const double T = cfg.horizon;
  std::vector<std::vector<double>> node_returns(t_mesh);
  if (cfg.returns.kind == ReturnProcess::Kind::constant) {
    for (unsigned k = 0; k < t_mesh; ++k) {
      const double t = T * static_cast<double>(k) / static_cast<double>(t_mesh - 1);
      node_returns[k] = {cfg.returns.rate * t};
    }
  } else {
    for (auto& v : node_returns) v.resize(n_walks);
    map_chunks<int>(n_walks, workers,
                    [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
                      for (std::uint64_t w = begin; w < end; ++w) {
                        detail::WalkEvaluator walk(cfg.returns, T,
                                                   CounterRng(seed, kInnerWalks, w));
                        for (unsigned k = 0; k < t_mesh; ++k) {
                          const double t =
                              T * static_cast<double>(k) / static_cast<double>(t_mesh - 1);
                          node_returns[k][w] = walk.log_return_at(t);
                        }
                      }
                      return 0;
                    });
  }

  auto exceed_fraction = [&](double threshold) {
    const auto it = std::upper_bound(y.begin(), y.end(), threshold);
    return static_cast<double>(y.end() - it) / static_cast<double>(y.size());
  };

  RhsIntegral out;
  out.thresholds = thresholds;
  const double dt = T / static_cast<double>(t_mesh - 1);
  for (double x : thresholds) {
    double integral = 0.0, sd = 0.0;
    for (unsigned k = 0; k < t_mesh; ++k) {
      // Mean and empirical spread of the per-walk exceedance fraction; the
      // walk part of the error is the observed across-walk variance, the
      // claim part the shared binomial term. Both propagate through the
      // quadrature weights fully correlated (claims and walks are reused at
      // every node), which errs on the wide side.
      double mean = 0.0, sq = 0.0;
      for (double r : node_returns[k]) {
        const double f = exceed_fraction(x * std::exp(r));
        mean += f;
        sq += f * f;
      }
      const auto m = static_cast<double>(node_returns[k].size());
      mean /= m;
      const double var_walk = m > 1 ? std::max(sq / m - mean * mean, 0.0) / m : 0.0;
      const double var_claim = mean * (1.0 - mean) / static_cast<double>(n_inner);
      const double w = (k == 0 || k + 1 == t_mesh) ? 0.5 * dt : dt;
      integral += w * mean;
      sd += w * std::sqrt(var_walk + var_claim);
    }
    out.value.push_back(cfg.lambda * integral);
    out.sd.push_back(cfg.lambda * sd);
    out.inner_exceed.push_back(static_cast<std::uint64_t>(
        static_cast<double>(y.size()) * exceed_fraction(x) + 0.5));
  }
  return out;
}

// Aggregate-claims equivalence: Y_A(D(T)) exceedance against
// lambda * integral of the discounted single-claim exceedance; the grid is
// anchored at quantiles of the undiscounted single-claim scalarization.
inline VerifierReport verify_aggregate_claims(const RiskConfig& cfg, const Sizes& sizes,
                                   std::uint64_t seed, unsigned workers = 0,
                                   const std::vector<double>& levels = default_levels(),
                                   PassBand band = {0.85, 1.15}, unsigned t_mesh = 64) {
  cfg.validate();
  const auto single = detail::single_term_tail(cfg.set, cfg.claim_law,
                                               SequenceStructure::independent, std::nullopt,
                                               sizes.n_grid, seed, workers);
  const std::vector<double> grid = quantile_grid(single, levels);

  const LhsTail lhs = lhs_tail(cfg, sizes.n_paths, seed, workers);
  const RhsIntegral rhs = rhs_integral(cfg, sizes.n_inner, t_mesh, grid, seed, workers,
                                       sizes.n_walks);

  VerifierReport report;
  report.tag = "discounted_aggregate_claims";
  report.rule = detail::band_rule(band, "lhs/rhs ratio") +
                "; discount factors must respect the return-process bounds exactly";
  report.seed = seed;
  report.n_paths = sizes.n_paths;
  report.grid_levels = levels;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    RatioPoint pt;
    pt.x = grid[k];
    pt.n_lhs = lhs.tail.count_above(grid[k]);
    pt.n_rhs = rhs.inner_exceed[k];
    pt.lhs = static_cast<double>(pt.n_lhs) / static_cast<double>(sizes.n_paths);
    pt.rhs = rhs.value[k];
    pt.resolvable = pt.n_lhs >= kMinExceedances;
    if (pt.rhs > 0.0) {
      pt.ratio = pt.lhs / pt.rhs;
      const auto lci = clopper_pearson(pt.n_lhs, sizes.n_paths);
      const double rhs_lo = std::max(pt.rhs - 1.96 * rhs.sd[k], 1e-300);
      const double rhs_hi = pt.rhs + 1.96 * rhs.sd[k];
      pt.ci_lo = lci.lo / rhs_hi;
      pt.ci_hi = lci.hi / rhs_lo;
    }
    report.curve.points.push_back(pt);
  }
  report.violations["discount_bounds"] = lhs.discount_bound_violations;
  report.metrics["empirical_claim_mean"] = lhs.empirical_claim_mean;
  report.metrics["expected_claim_mean"] = cfg.lambda * cfg.horizon;

  std::size_t deepest = 0;
  Verdict v = band_verdict(report.curve, band, &deepest);
  if (lhs.discount_bound_violations > 0) v = Verdict::fail;
  report.verdict = v;
  if (v != Verdict::inconclusive) {
    report.metrics["deepest_x"] = report.curve.points[deepest].x;
    report.metrics["deepest_ratio"] = report.curve.points[deepest].ratio;
  }
  return report;
}

// Conditioned arrival times against scaled uniform order statistics. Route
// one simulates the Poisson process by sequential exponential inter-arrival
// times and conditions on N_T = n; route two draws sorted uniforms directly.
// Coordinates are compared by a two-sample Kolmogorov-Smirnov distance with a
// much larger reference sample, so the criterion reduces to the one-sample
// band 1.63/sqrt(m).
inline VerifierReport check_order_statistics_identity(double lambda, double horizon,
                                                      const std::vector<unsigned>& n_values,
                                                      std::uint64_t n_paths,
                                                      std::uint64_t m_min, std::uint64_t seed,
                                                      unsigned workers = 0) {
  if (!(lambda > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("check_order_statistics_identity: lambda, T must be positive");
  }
  for (unsigned n : n_values) {
    if (n == 0) throw std::invalid_argument("check_order_statistics_identity: n >= 1");
  }
  VerifierReport report;
  report.tag = "arrival_order_statistics";
  report.seed = seed;
  report.n_paths = n_paths;
  report.rule = "pass iff every coordinate's two-sample KS distance stays below "
                "1.63*sqrt((m1+m2)/(m1*m2)) and each conditioned sample has >= m_min paths";

  const unsigned n_max = *std::max_element(n_values.begin(), n_values.end());
  // Route 1: collect conditioned arrival vectors per requested n.
  struct Part {
    std::vector<std::vector<double>> collected;  // per requested n, flattened
    Part& operator+=(Part& o) {
      for (std::size_t i = 0; i < collected.size(); ++i) {
        collected[i].insert(collected[i].end(), o.collected[i].begin(), o.collected[i].end());
      }
      return *this;
    }
  };
  auto parts = map_chunks<Part>(
      n_paths, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        Part part;
        part.collected.resize(n_values.size());
        std::vector<double> arr;
        for (std::uint64_t p = begin; p < end; ++p) {
          const CounterRng rng(seed, kExpArrivals, p);
          arr.clear();
          double t = 0.0;
          std::uint64_t i = 0;
          while (arr.size() <= n_max + 1) {
            t += -std::log1p(-rng.uniform(i++)) / lambda;
            if (t > horizon) break;
            arr.push_back(t);
          }
          for (std::size_t which = 0; which < n_values.size(); ++which) {
            if (arr.size() == n_values[which]) {
              part.collected[which].insert(part.collected[which].end(), arr.begin(),
                                           arr.end());
            }
          }
        }
        return part;
      });
  Part all;
  all.collected.resize(n_values.size());
  for (auto& p : parts) all += p;

  bool pass = true, enough = true;
  for (std::size_t which = 0; which < n_values.size(); ++which) {
    const unsigned n = n_values[which];
    const std::uint64_t m1 = all.collected[which].size() / n;
    std::ostringstream key;
    key << "m_n" << n;
    report.metrics[key.str()] = static_cast<double>(m1);
    if (m1 < m_min) {
      enough = false;
      continue;
    }
    // Route 2: reference sample of scaled sorted uniforms, 32x larger.
    const std::uint64_t m2 = std::min<std::uint64_t>(32 * m1, 4'000'000);
    std::vector<std::vector<double>> ref(n, std::vector<double>(m2));
    const CounterRng rng(seed, kOsUniforms, 1000 + n);
    std::vector<double> u(n);
    for (std::uint64_t j = 0; j < m2; ++j) {
      for (unsigned i = 0; i < n; ++i) u[i] = horizon * rng.uniform(j * n + i);
      std::sort(u.begin(), u.end());
      for (unsigned i = 0; i < n; ++i) ref[i][j] = u[i];
    }
    const double threshold =
        1.63 * std::sqrt(static_cast<double>(m1 + m2) /
                         (static_cast<double>(m1) * static_cast<double>(m2)));
    for (unsigned coord = 0; coord < n; ++coord) {
      std::vector<double> a(m1);
      for (std::uint64_t j = 0; j < m1; ++j) a[j] = all.collected[which][j * n + coord];
      std::sort(a.begin(), a.end());
      std::vector<double>& b = ref[coord];
      std::sort(b.begin(), b.end());
      // two-sample KS distance by merge walk
      double dmax = 0.0;
      std::size_t i = 0, j = 0;
      while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        const double fa = static_cast<double>(i) / static_cast<double>(a.size());
        const double fb = static_cast<double>(j) / static_cast<double>(b.size());
        dmax = std::max(dmax, std::fabs(fa - fb));
      }
      std::ostringstream mkey;
      mkey << "ks_n" << n << "_coord" << coord + 1;
      report.metrics[mkey.str()] = dmax;
      if (dmax >= threshold) pass = false;
    }
    std::ostringstream tkey;
    tkey << "ks_threshold_n" << n;
    report.metrics[tkey.str()] = threshold;
  }
  report.verdict = !enough ? Verdict::inconclusive : (pass ? Verdict::pass : Verdict::fail);
  return report;
}

}  // namespace bigjump
