#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bigjump/diagnostics.hpp"
#include "bigjump/geometry.hpp"
#include "bigjump/laws.hpp"
#include "bigjump/parallel.hpp"
#include "bigjump/ratio_curve.hpp"
#include "bigjump/sampling.hpp"
#include "bigjump/tail_estimate.hpp"

namespace bigjump {

// Stream ids; every verifier draws each logical source from its own stream so
// that configurations sharing a master seed share exactly the draws they are
// meant to share (common random numbers) and nothing else.
enum StreamId : std::uint64_t {
  kGridStream = 1,      // single-term sample used for the threshold grid
  kClaimsStream = 2,    // per-path claim tuples
  kCountStream = 3,     // per-path claim counts N
  kThetaStream = 4,     // per-path scaling factors
  kArrivalStream = 5,   // per-path arrival uniforms (order-statistics route)
  kReturnStream = 6,    // per-path log-return walk increments
  kInnerClaims = 7,     // claim sample behind the quadrature side
  kInnerWalks = 8,      // walk sample behind the quadrature side
  kSecondLaw = 9,       // second summand in the two-law convolution check
  kExpArrivals = 10,    // sequential exponential inter-arrival route
  kOsUniforms = 11,     // reference uniform order-statistics sample
};

struct Sizes {
  std::uint64_t n_paths = 1'000'000;
  std::uint64_t n_grid = 1'000'000;
  std::uint64_t n_inner = 1'000'000;
  std::uint64_t n_walks = 20'000;
};

struct VerifierReport {
  std::string tag;
  Verdict verdict = Verdict::inconclusive;
  std::string rule;  // the acceptance rule this report was judged by
  RatioCurve curve;
  std::map<std::string, double> metrics;
  std::map<std::string, std::uint64_t> violations;
  std::uint64_t seed = 0;
  std::uint64_t n_paths = 0;
  std::vector<double> grid_levels;
};

namespace detail {

inline std::string band_rule(const PassBand& band, const char* what) {
  std::ostringstream os;
  os << "pass iff " << what << " CI at the deepest grid point with >= "
     << kMinExceedances << " lhs exceedances intersects [" << band.lo << "," << band.hi
     << "]";
  return os.str();
}

// Threshold grid anchored at quantiles of a single summand drawn under the
// same structure (so a common shock participates in the anchor too).
inline TailEstimate single_term_tail(const RuinSet& set, const VectorLaw& law,
                                     SequenceStructure structure,
                                     const std::optional<MarginalLaw>& shock,
                                     std::uint64_t n_grid, std::uint64_t master,
                                     unsigned workers) {
  const CounterRng rng(master, kGridStream, 0);
  const std::uint64_t stride = sequence_stride(law, structure, 1);
  std::vector<double> y(n_grid);
  map_chunks<int>(n_grid, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
    std::vector<double> buf(law.dims());
    for (std::uint64_t i = begin; i < end; ++i) {
      draw_sequence_into(law, structure, shock, 1, rng, i * stride, buf);
      y[i] = set.scalarize(buf);
    }
    return 0;
  });
  return TailEstimate(std::move(y));
}

struct GridCounts {
  std::vector<std::uint64_t> lhs, rhs, sum_y, pair_joint;
  std::uint64_t subadd_violations = 0;
  std::uint64_t dominance_violations = 0;

  explicit GridCounts(std::size_t g = 0)
      : lhs(g, 0), rhs(g, 0), sum_y(g, 0), pair_joint(g, 0) {}

  GridCounts& operator+=(const GridCounts& o) {
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      lhs[i] += o.lhs[i];
      rhs[i] += o.rhs[i];
      sum_y[i] += o.sum_y[i];
      pair_joint[i] += o.pair_joint[i];
    }
    subadd_violations += o.subadd_violations;
    dominance_violations += o.dominance_violations;
    return *this;
  }
};

template <class Part>
Part fold_parts(std::vector<Part> parts, Part init) {
  for (auto& p : parts) init += p;
  return init;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pathwise subadditivity: Y_A(sum of vectors) <= sum of Y_A values, checked
// tuple by tuple with a small relative rounding allowance. The inequality is
// deterministic, so a single violation fails the check.
inline VerifierReport check_pathwise_subadditivity(const RuinSet& set, const VectorLaw& law,
                                                   const std::vector<unsigned>& tuple_sizes,
                                                   std::uint64_t n_tuples, std::uint64_t seed,
                                                   unsigned workers = 0) {
  law.validate();
  VerifierReport report;
  report.tag = "pathwise_subadditivity";
  report.rule = "pass iff zero violations of Y_A(sum) <= sum(Y_A) + 1e-12 * scale";
  report.seed = seed;
  report.n_paths = n_tuples;

  std::uint64_t total_violations = 0;
  double worst_excess = 0.0;
  const std::size_t d = law.dims();
  for (unsigned n : tuple_sizes) {
    if (n == 0) throw std::invalid_argument("check_pathwise_subadditivity: tuple size 0");
    const std::uint64_t stream = kClaimsStream + 100ULL * n;
    struct Part {
      std::uint64_t violations = 0;
      double worst = 0.0;
      Part& operator+=(const Part& o) {
        violations += o.violations;
        worst = std::max(worst, o.worst);
        return *this;
      }
    };
    auto parts = map_chunks<Part>(
        n_tuples, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
          Part part;
          std::vector<double> tuple(n * d), sum(d);
          for (std::uint64_t t = begin; t < end; ++t) {
            const CounterRng rng(seed, stream, t);
            draw_sequence_into(law, SequenceStructure::independent, std::nullopt, n, rng,
                               0, tuple);
            std::fill(sum.begin(), sum.end(), 0.0);
            double y_sum = 0.0;
            for (unsigned i = 0; i < n; ++i) {
              std::span<const double> xi(tuple.data() + i * d, d);
              y_sum += set.scalarize(xi);
              for (std::size_t j = 0; j < d; ++j) sum[j] += xi[j];
            }
            const double y_total = set.scalarize(sum);
            const double slack = 1e-12 * std::max(1.0, y_sum);
            if (y_total > y_sum + slack) {
              ++part.violations;
              part.worst = std::max(part.worst, (y_total - y_sum) / std::max(1.0, y_sum));
            }
          }
          return part;
        });
    const auto folded = detail::fold_parts(std::move(parts), Part{});
    total_violations += folded.violations;
    worst_excess = std::max(worst_excess, folded.worst);
  }
  report.violations["subadditivity"] = total_violations;
  report.metrics["worst_relative_excess"] = worst_excess;
  report.verdict = total_violations == 0 ? Verdict::pass : Verdict::fail;
  return report;
}

// ---------------------------------------------------------------------------
// Finite-sum single-big-jump equivalence: P[S_n in xA] against the sum of the
// per-summand exceedance probabilities, estimated on the same tuples. Also
// tracks, exactly and per grid point, the distribution-level dominance
// count(S_n in xA) <= count(sum of Y_A > x) and the Bonferroni lower bound.
inline VerifierReport verify_finite_sum_sbj(
    const RuinSet& set, const VectorLaw& law, unsigned n_summands,
    SequenceStructure structure, const std::optional<MarginalLaw>& shock,
    const Sizes& sizes, std::uint64_t seed, unsigned workers = 0,
    const std::vector<double>& levels = default_levels(), PassBand band = {0.9, 1.1}) {
  law.validate();
  if (n_summands == 0) throw std::invalid_argument("verify_finite_sum_sbj: need n >= 1");

  const auto single = detail::single_term_tail(set, law, structure, shock, sizes.n_grid,
                                               seed, workers);
  const std::vector<double> grid = quantile_grid(single, levels);
  const std::size_t g = grid.size();
  const std::size_t d = law.dims();
  const unsigned n = n_summands;

  auto parts = map_chunks<detail::GridCounts>(
      sizes.n_paths, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        detail::GridCounts counts(g);
        std::vector<double> tuple(n * d), sum(d), ys(n);
        for (std::uint64_t p = begin; p < end; ++p) {
          const CounterRng rng(seed, kClaimsStream, p);
          draw_sequence_into(law, structure, shock, n, rng, 0, tuple);
          std::fill(sum.begin(), sum.end(), 0.0);
          double y_sum = 0.0;
          for (unsigned i = 0; i < n; ++i) {
            std::span<const double> xi(tuple.data() + i * d, d);
            ys[i] = set.scalarize(xi);
            y_sum += ys[i];
            for (std::size_t j = 0; j < d; ++j) sum[j] += xi[j];
          }
          const double y_total = set.scalarize(sum);
          if (y_total > y_sum + 1e-12 * std::max(1.0, y_sum)) ++counts.subadd_violations;
          for (std::size_t k = 0; k < g; ++k) {
            const double x = grid[k];
            const bool in_lhs = y_total > x;
            counts.lhs[k] += in_lhs;
            counts.sum_y[k] += y_sum > x;
            // dominance up to rounding: on halfspace sets the two sides are equal
            if (in_lhs && !(y_sum > x * (1.0 - 1e-12))) ++counts.dominance_violations;
            std::uint64_t exceed = 0;
            for (unsigned i = 0; i < n; ++i) exceed += ys[i] > x;
            counts.rhs[k] += exceed;
            if (exceed >= 2) counts.pair_joint[k] += exceed * (exceed - 1) / 2;
          }
        }
        return counts;
      });
  const auto counts = detail::fold_parts(std::move(parts), detail::GridCounts(g));

  VerifierReport report;
  report.tag = "finite_sum_equivalence";
  report.rule = detail::band_rule(band, "lhs/rhs ratio");
  report.seed = seed;
  report.n_paths = sizes.n_paths;
  report.grid_levels = levels;
  std::uint64_t bonferroni_violations = 0;
  for (std::size_t k = 0; k < g; ++k) {
    // rhs = sum_i P[X^(i) in xA]: pooled count over n_paths*n trials scaled by n.
    report.curve.points.push_back(make_ratio_point(grid[k], counts.lhs[k], sizes.n_paths,
                                                   counts.rhs[k], sizes.n_paths * n,
                                                   static_cast<double>(n)));
    // Bonferroni: count(S_n in xA) >= sum_i count_i - sum_{i<j} count(both), exact.
    const std::uint64_t lower = counts.rhs[k] > counts.pair_joint[k]
                                    ? counts.rhs[k] - counts.pair_joint[k]
                                    : 0;
    if (counts.lhs[k] < lower) ++bonferroni_violations;
  }
  report.violations["subadditivity"] = counts.subadd_violations;
  report.violations["distribution_dominance"] = counts.dominance_violations;
  report.violations["bonferroni_lower_bound"] = bonferroni_violations;

  std::size_t deepest = 0;
  Verdict v = band_verdict(report.curve, band, &deepest);
  if (counts.subadd_violations + counts.dominance_violations + bonferroni_violations > 0) {
    v = Verdict::fail;
  }
  report.verdict = v;
  if (v != Verdict::inconclusive) {
    report.metrics["deepest_x"] = report.curve.points[deepest].x;
    report.metrics["deepest_ratio"] = report.curve.points[deepest].ratio;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Randomly stopped sums: P[S_N in xA] against E[N] * P[X in xA]. The
// single-claim side reuses the first claim of each path's claim stream, so a
// degenerate N = 1 reproduces the lhs count for count.
inline VerifierReport verify_random_sum(const RuinSet& set, const VectorLaw& law,
                                        const CountingLaw& counting, const Sizes& sizes,
                                        std::uint64_t seed, unsigned workers = 0,
                                        const std::vector<double>& levels = default_levels(),
                                        PassBand band = {0.85, 1.15}) {
  law.validate();
  counting.validate();
  const auto single = detail::single_term_tail(set, law, SequenceStructure::independent,
                                               std::nullopt, sizes.n_grid, seed, workers);
  const std::vector<double> grid = quantile_grid(single, levels);
  const std::size_t g = grid.size();
  const std::size_t d = law.dims();
  const std::uint64_t stride = law.uniforms_per_draw();
  const double mean_n = counting.mean();

  struct Part {
    std::vector<std::uint64_t> lhs, single;
    double n_sum = 0.0;
    explicit Part(std::size_t g = 0) : lhs(g, 0), single(g, 0) {}
    Part& operator+=(const Part& o) {
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        lhs[i] += o.lhs[i];
        single[i] += o.single[i];
      }
      n_sum += o.n_sum;
      return *this;
    }
  };

  const CounterRng count_rng(seed, kCountStream, 0);
  auto parts = map_chunks<Part>(
      sizes.n_paths, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        Part part(g);
        std::vector<double> claim(d), sum(d);
        for (std::uint64_t p = begin; p < end; ++p) {
          const std::uint64_t n_claims = counting.draw(count_rng, p);
          part.n_sum += static_cast<double>(n_claims);
          const CounterRng claims(seed, kClaimsStream, p);
          std::fill(sum.begin(), sum.end(), 0.0);
          double y_first = 0.0;
          for (std::uint64_t i = 0; i < std::max<std::uint64_t>(n_claims, 1); ++i) {
            law.draw(claims, i * stride, claim);
            if (i == 0) y_first = set.scalarize(claim);
            if (i < n_claims) {
              for (std::size_t j = 0; j < d; ++j) sum[j] += claim[j];
            }
          }
          const double y_total = n_claims == 0 ? 0.0 : set.scalarize(sum);
          for (std::size_t k = 0; k < g; ++k) {
            part.lhs[k] += y_total > grid[k];
            part.single[k] += y_first > grid[k];
          }
        }
        return part;
      });
  const auto counts = detail::fold_parts(std::move(parts), Part(g));

  VerifierReport report;
  report.tag = "random_sum_equivalence";
  report.rule = detail::band_rule(band, "lhs / (E[N] * single-claim) ratio");
  report.seed = seed;
  report.n_paths = sizes.n_paths;
  report.grid_levels = levels;
  for (std::size_t k = 0; k < g; ++k) {
    report.curve.points.push_back(make_ratio_point(grid[k], counts.lhs[k], sizes.n_paths,
                                                   counts.single[k], sizes.n_paths, mean_n));
  }
  report.metrics["counting_mean_analytic"] = mean_n;
  report.metrics["counting_mean_empirical"] =
      counts.n_sum / static_cast<double>(sizes.n_paths);
  std::size_t deepest = 0;
  report.verdict = band_verdict(report.curve, band, &deepest);
  if (report.verdict != Verdict::inconclusive) {
    report.metrics["deepest_x"] = report.curve.points[deepest].x;
    report.metrics["deepest_ratio"] = report.curve.points[deepest].ratio;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Scale-mixture single big jump plus the weak-equivalence bracket. With
// theta supported on [a,b] the sandwich count(Y > x/a) <= count(thetaY > x)
// <= count(Y > x/b) holds path by path; violations are counted exactly.
inline VerifierReport verify_scale_mixture(const RuinSet& set, const VectorLaw& law,
                                           const ThetaLaw& theta, unsigned n_summands,
                                           const Sizes& sizes, std::uint64_t seed,
                                           unsigned workers = 0,
                                           const std::vector<double>& levels = default_levels(),
                                           PassBand band = {0.9, 1.1}) {
  law.validate();
  if (n_summands == 0) throw std::invalid_argument("verify_scale_mixture: need n >= 1");
  const std::size_t d = law.dims();
  const unsigned n = n_summands;
  const std::uint64_t stride = law.uniforms_per_draw();
  const std::uint64_t theta_stride = theta.uniforms_per_draw() *
                                     (theta.mode == ThetaLaw::Mode::componentwise ? d : 1);

  // Grid anchors at quantiles of one mixed term theta * X.
  std::vector<double> mixed(sizes.n_grid);
  {
    const CounterRng grid_claims(seed, kGridStream, 0);
    const CounterRng grid_theta(seed, kThetaStream, ~0ULL);
    map_chunks<int>(sizes.n_grid, workers,
                    [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
                      std::vector<double> buf(d);
                      for (std::uint64_t i = begin; i < end; ++i) {
                        law.draw(grid_claims, i * stride, buf);
                        if (theta.mode == ThetaLaw::Mode::componentwise) {
                          for (std::size_t j = 0; j < d; ++j) {
                            buf[j] *= theta.draw(grid_theta, i * d + j);
                          }
                          mixed[i] = set.scalarize(buf);
                        } else {
                          mixed[i] = theta.draw(grid_theta, i) * set.scalarize(buf);
                        }
                      }
                      return 0;
                    });
  }
  const TailEstimate mixed_tail(std::move(mixed));
  const std::vector<double> grid = quantile_grid(mixed_tail, levels);
  const std::size_t g = grid.size();

  struct Part {
    std::vector<std::uint64_t> lhs, rhs, mixed_first, plain_first, plain_lo, plain_hi;
    std::uint64_t sandwich_violations = 0;
    explicit Part(std::size_t g = 0)
        : lhs(g, 0), rhs(g, 0), mixed_first(g, 0), plain_first(g, 0), plain_lo(g, 0),
          plain_hi(g, 0) {}
    Part& operator+=(const Part& o) {
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        lhs[i] += o.lhs[i];
        rhs[i] += o.rhs[i];
        mixed_first[i] += o.mixed_first[i];
        plain_first[i] += o.plain_first[i];
        plain_lo[i] += o.plain_lo[i];
        plain_hi[i] += o.plain_hi[i];
      }
      sandwich_violations += o.sandwich_violations;
      return *this;
    }
  };

  const double a = theta.lo, b = theta.hi;
  auto parts = map_chunks<Part>(
      sizes.n_paths, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        Part part(g);
        std::vector<double> claim(d), term(d), sum(d);
        for (std::uint64_t p = begin; p < end; ++p) {
          const CounterRng claims(seed, kClaimsStream, p);
          const CounterRng thetas(seed, kThetaStream, p);
          std::fill(sum.begin(), sum.end(), 0.0);
          double y_mixed_first = 0.0, y_plain_first = 0.0;
          for (unsigned i = 0; i < n; ++i) {
            law.draw(claims, i * stride, claim);
            if (theta.mode == ThetaLaw::Mode::componentwise) {
              for (std::size_t j = 0; j < d; ++j) {
                term[j] = claim[j] * theta.draw(thetas, i * theta_stride + j);
              }
            } else {
              const double t = theta.draw(thetas, i * theta_stride);
              for (std::size_t j = 0; j < d; ++j) term[j] = claim[j] * t;
            }
            const double y_term = set.scalarize(term);
            for (std::size_t k = 0; k < g; ++k) part.rhs[k] += y_term > grid[k];
            if (i == 0) {
              y_mixed_first = y_term;
              y_plain_first = set.scalarize(claim);
            }
            for (std::size_t j = 0; j < d; ++j) sum[j] += term[j];
          }
          const double y_total = set.scalarize(sum);
          for (std::size_t k = 0; k < g; ++k) {
            const double x = grid[k];
            part.lhs[k] += y_total > x;
            const bool in_mixed = y_mixed_first > x;
            const bool lo_in = y_plain_first > x / a;  // theta >= a forces this into the set
            const bool hi_in = y_plain_first > x / b;
            part.mixed_first[k] += in_mixed;
            part.plain_first[k] += y_plain_first > x;
            part.plain_lo[k] += lo_in;
            part.plain_hi[k] += hi_in;
            // a touch of slack: scalarize(theta X) and theta * Y round differently
            const bool lo_strict = y_plain_first > (x / a) * (1.0 + 1e-12);
            const bool hi_loose = y_plain_first > (x / b) * (1.0 - 1e-12);
            if ((lo_strict && !in_mixed) || (in_mixed && !hi_loose)) {
              ++part.sandwich_violations;
            }
          }
        }
        return part;
      });
  const auto counts = detail::fold_parts(std::move(parts), Part(g));

  VerifierReport report;
  report.tag = "scale_mixture_equivalence";
  report.rule = detail::band_rule(band, "mixed-sum/per-term ratio") +
                "; bracket: count(Y > x/a) <= count(thetaY > x) <= count(Y > x/b), exact";
  report.seed = seed;
  report.n_paths = sizes.n_paths;
  report.grid_levels = levels;
  for (std::size_t k = 0; k < g; ++k) {
    report.curve.points.push_back(make_ratio_point(grid[k], counts.lhs[k], sizes.n_paths,
                                                   counts.rhs[k], sizes.n_paths));
  }
  report.violations["scaling_sandwich"] = counts.sandwich_violations;

  std::size_t deepest = 0;
  Verdict v = band_verdict(report.curve, band, &deepest);
  if (v != Verdict::inconclusive) {
    report.metrics["deepest_x"] = report.curve.points[deepest].x;
    report.metrics["deepest_ratio"] = report.curve.points[deepest].ratio;
  }
  // Bracket at the deepest point where the plain first-term counts resolve;
  // the sandwich inequality holds at every x, so this point may sit shallower
  // than the band point.
  for (std::size_t k = g; k-- > 0;) {
    if (counts.plain_first[k] >= kMinExceedances &&
        counts.mixed_first[k] >= kMinExceedances) {
      const double denom = static_cast<double>(counts.plain_first[k]);
      report.metrics["bracket_x"] = grid[k];
      report.metrics["bracket_ratio"] = static_cast<double>(counts.mixed_first[k]) / denom;
      report.metrics["bracket_lower"] = static_cast<double>(counts.plain_lo[k]) / denom;
      report.metrics["bracket_upper"] = static_cast<double>(counts.plain_hi[k]) / denom;
      break;
    }
  }
  if (counts.sandwich_violations > 0) v = Verdict::fail;
  report.verdict = v;
  return report;
}

// ---------------------------------------------------------------------------
// Two-law convolution max-sum equivalence: P[X1 + X2 in xA] against
// P[X1 in xA] + P[X2 in xA] on common draws. The grid anchors at quantiles of
// the first (dominant) law's scalarization.
inline VerifierReport verify_convolution_maxsum(const RuinSet& set, const VectorLaw& law1,
                                                const VectorLaw& law2, const Sizes& sizes,
                                                std::uint64_t seed, unsigned workers = 0,
                                                const std::vector<double>& levels = default_levels(),
                                                PassBand band = {0.9, 1.1}) {
  law1.validate();
  law2.validate();
  if (law1.dims() != law2.dims()) {
    throw std::invalid_argument("verify_convolution_maxsum: dimension mismatch");
  }
  const auto single = detail::single_term_tail(set, law1, SequenceStructure::independent,
                                               std::nullopt, sizes.n_grid, seed, workers);
  const std::vector<double> grid = quantile_grid(single, levels);
  const std::size_t g = grid.size();
  const std::size_t d = law1.dims();

  struct Part {
    std::vector<std::uint64_t> lhs, rhs;
    explicit Part(std::size_t g = 0) : lhs(g, 0), rhs(g, 0) {}
    Part& operator+=(const Part& o) {
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        lhs[i] += o.lhs[i];
        rhs[i] += o.rhs[i];
      }
      return *this;
    }
  };
  auto parts = map_chunks<Part>(
      sizes.n_paths, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        Part part(g);
        std::vector<double> x1(d), x2(d), sum(d);
        for (std::uint64_t p = begin; p < end; ++p) {
          law1.draw(CounterRng(seed, kClaimsStream, p), 0, x1);
          law2.draw(CounterRng(seed, kSecondLaw, p), 0, x2);
          for (std::size_t j = 0; j < d; ++j) sum[j] = x1[j] + x2[j];
          const double y1 = set.scalarize(x1);
          const double y2 = set.scalarize(x2);
          const double ys = set.scalarize(sum);
          for (std::size_t k = 0; k < g; ++k) {
            part.lhs[k] += ys > grid[k];
            part.rhs[k] += (y1 > grid[k]) + (y2 > grid[k]);
          }
        }
        return part;
      });
  const auto counts = detail::fold_parts(std::move(parts), Part(g));

  VerifierReport report;
  report.tag = "convolution_max_sum";
  report.rule = detail::band_rule(band, "sum-tail/(tail1+tail2) ratio");
  report.seed = seed;
  report.n_paths = sizes.n_paths;
  report.grid_levels = levels;
  for (std::size_t k = 0; k < g; ++k) {
    report.curve.points.push_back(make_ratio_point(grid[k], counts.lhs[k], sizes.n_paths,
                                                   counts.rhs[k], sizes.n_paths));
  }
  std::size_t deepest = 0;
  report.verdict = band_verdict(report.curve, band, &deepest);
  if (report.verdict != Verdict::inconclusive) {
    report.metrics["deepest_x"] = report.curve.points[deepest].x;
    report.metrics["deepest_ratio"] = report.curve.points[deepest].ratio;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Kesten-style geometric growth control: with r_n = P[S_n in xA]/(n P[X in xA])
// at the fixed 99% anchor, q_n = r_n/(1+eps)^n must peak at small n and fall
// afterwards; the implied constant is K = max_n q_n. Partial sums share their
// leading summands (common random numbers), so the q series is smooth in n.
inline VerifierReport verify_kesten_growth(const RuinSet& set, const VectorLaw& law,
                                           unsigned n_max, double epsilon, const Sizes& sizes,
                                           std::uint64_t seed, unsigned workers = 0) {
  law.validate();
  if (n_max == 0 || n_max > 20) {
    throw std::invalid_argument("verify_kesten_growth: need 1 <= n_max <= 20");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("verify_kesten_growth: epsilon > 0");

  const auto single = detail::single_term_tail(set, law, SequenceStructure::independent,
                                               std::nullopt, sizes.n_grid, seed, workers);
  const double x_star = single.quantile(0.99);
  const std::size_t d = law.dims();

  struct Part {
    std::vector<std::uint64_t> count;  // per n
    explicit Part(std::size_t n = 0) : count(n, 0) {}
    Part& operator+=(const Part& o) {
      for (std::size_t i = 0; i < count.size(); ++i) count[i] += o.count[i];
      return *this;
    }
  };
  auto parts = map_chunks<Part>(
      sizes.n_paths, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        Part part(n_max);
        std::vector<double> claim(d), sum(d);
        const std::uint64_t per_claim = law.uniforms_per_draw();
        for (std::uint64_t p = begin; p < end; ++p) {
          const CounterRng rng(seed, kClaimsStream, p);
          std::fill(sum.begin(), sum.end(), 0.0);
          for (unsigned i = 0; i < n_max; ++i) {
            law.draw(rng, i * per_claim, claim);
            for (std::size_t j = 0; j < d; ++j) sum[j] += claim[j];
            part.count[i] += set.scalarize(sum) > x_star;
          }
        }
        return part;
      });
  const auto counts = detail::fold_parts(std::move(parts), Part(n_max));

  VerifierReport report;
  report.tag = "kesten_growth";
  report.seed = seed;
  report.n_paths = sizes.n_paths;
  {
    std::ostringstream os;
    os << "pass iff q_n = r_n/(1+" << epsilon
       << ")^n peaks at n <= 3 and is nonincreasing beyond n = 3 within 3x binomial "
          "noise; K_hat = max q_n";
    report.rule = os.str();
  }

  const double p1 = static_cast<double>(counts.count[0]) /
                    static_cast<double>(sizes.n_paths);
  std::vector<double> q(n_max), rel_noise(n_max);
  double k_hat = 0.0;
  std::size_t argmax = 0;
  for (unsigned i = 0; i < n_max; ++i) {
    const double pn = static_cast<double>(counts.count[i]) /
                      static_cast<double>(sizes.n_paths);
    const double rn = pn / (static_cast<double>(i + 1) * p1);
    q[i] = rn / std::pow(1.0 + epsilon, static_cast<double>(i + 1));
    rel_noise[i] = counts.count[i] > 0
                       ? 1.0 / std::sqrt(static_cast<double>(counts.count[i]))
                       : 1.0;
    if (q[i] > k_hat) {
      k_hat = q[i];
      argmax = i;
    }
    // curve row: x = n, lhs = P[S_n in xA], rhs = n (1+eps)^n P[X in xA]
    RatioPoint pt;
    pt.x = static_cast<double>(i + 1);
    pt.lhs = pn;
    pt.rhs = static_cast<double>(i + 1) * p1 *
             std::pow(1.0 + epsilon, static_cast<double>(i + 1));
    pt.ratio = q[i];
    pt.n_lhs = counts.count[i];
    pt.n_rhs = counts.count[0];
    pt.ci_lo = q[i] * (1.0 - 1.96 * rel_noise[i]);
    pt.ci_hi = q[i] * (1.0 + 1.96 * rel_noise[i]);
    pt.resolvable = counts.count[i] >= kMinExceedances;
    report.curve.points.push_back(pt);
  }
  bool monotone = true;
  for (unsigned i = 2; i + 1 < n_max; ++i) {
    const double slack = 3.0 * (rel_noise[i] + rel_noise[i + 1]);
    if (q[i + 1] > q[i] * (1.0 + slack)) monotone = false;
  }
  // Smallest eps that would make the tail of the q series nonincreasing:
  // the worst observed growth factor of r_n beyond n = 2. For heavy tails
  // this sits well below the configured eps; light tails need more.
  double eps_min = 0.0;
  for (unsigned i = 1; i + 1 < n_max; ++i) {
    const double r_i = q[i] * std::pow(1.0 + epsilon, static_cast<double>(i + 1));
    const double r_next = q[i + 1] * std::pow(1.0 + epsilon, static_cast<double>(i + 2));
    if (r_i > 0.0) eps_min = std::max(eps_min, r_next / r_i - 1.0);
  }
  report.metrics["epsilon_min_sustaining"] = eps_min;
  report.metrics["x_star"] = x_star;
  report.metrics["k_hat"] = k_hat;
  report.metrics["k_hat_argmax_n"] = static_cast<double>(argmax + 1);
  report.metrics["anchor_exceedance"] = p1;
  report.verdict =
      (monotone && argmax + 1 <= 3 && std::isfinite(k_hat)) ? Verdict::pass : Verdict::fail;
  return report;
}

// ---------------------------------------------------------------------------
// Translation insensitivity: P[X in xA + a] / P[X in xA] on shared draws,
// with the exact sandwich implications at radius u1 = max_p |p^T a| counted
// as hard violations.
inline VerifierReport verify_translation_insensitivity(
    const RuinSet& set, const VectorLaw& law, const std::vector<double>& shift,
    const Sizes& sizes, std::uint64_t seed, unsigned workers = 0,
    const std::vector<double>& levels = default_levels(), PassBand band = {0.9, 1.1}) {
  law.validate();
  if (shift.size() != set.dims()) {
    throw std::invalid_argument("verify_translation_insensitivity: shift dimension mismatch");
  }
  const auto single = detail::single_term_tail(set, law, SequenceStructure::independent,
                                               std::nullopt, sizes.n_grid, seed, workers);
  const std::vector<double> grid = quantile_grid(single, levels);
  const std::size_t g = grid.size();
  const std::size_t d = law.dims();
  const double u1 = set.shift_radius(shift);

  struct Part {
    std::vector<std::uint64_t> plain, shifted;
    std::uint64_t sandwich_violations = 0;
    explicit Part(std::size_t g = 0) : plain(g, 0), shifted(g, 0) {}
    Part& operator+=(const Part& o) {
      for (std::size_t i = 0; i < plain.size(); ++i) {
        plain[i] += o.plain[i];
        shifted[i] += o.shifted[i];
      }
      sandwich_violations += o.sandwich_violations;
      return *this;
    }
  };
  auto parts = map_chunks<Part>(
      sizes.n_paths, workers, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        Part part(g);
        std::vector<double> x(d);
        for (std::uint64_t p = begin; p < end; ++p) {
          law.draw(CounterRng(seed, kClaimsStream, p), 0, x);
          const double y_plain = set.scalarize(x);
          const double y_shift = set.scalarize_shifted(x, shift);
          for (std::size_t k = 0; k < g; ++k) {
            const double u = grid[k];
            part.plain[k] += y_plain > u;
            part.shifted[k] += y_shift > u;
            if (u > u1) {
              const double eps = 1e-12 * std::max(1.0, u);
              if (y_plain > u + u1 + eps && !(y_shift > u - eps)) ++part.sandwich_violations;
              if (y_shift > u + eps && !(y_plain > u - u1 - eps)) ++part.sandwich_violations;
            }
          }
        }
        return part;
      });
  const auto counts = detail::fold_parts(std::move(parts), Part(g));

  VerifierReport report;
  report.tag = "translation_insensitivity";
  report.rule = detail::band_rule(band, "shifted/plain ratio") +
                "; sandwich implications at u1 = max_p |p.a| hold exactly";
  report.seed = seed;
  report.n_paths = sizes.n_paths;
  report.grid_levels = levels;
  for (std::size_t k = 0; k < g; ++k) {
    report.curve.points.push_back(make_ratio_point(grid[k], counts.shifted[k], sizes.n_paths,
                                                   counts.plain[k], sizes.n_paths));
  }
  report.violations["sandwich"] = counts.sandwich_violations;
  report.metrics["u1"] = u1;
  std::size_t deepest = 0;
  Verdict v = band_verdict(report.curve, band, &deepest);
  if (counts.sandwich_violations > 0) v = Verdict::fail;
  report.verdict = v;
  if (v != Verdict::inconclusive) {
    report.metrics["deepest_x"] = report.curve.points[deepest].x;
    report.metrics["deepest_ratio"] = report.curve.points[deepest].ratio;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Dependence assumption checkers over pairs of scalarized summands.
enum class DependenceKind { qai, tai, rd };

inline DependenceKind dependence_kind_from_string(const std::string& s) {
  if (s == "qai") return DependenceKind::qai;
  if (s == "tai") return DependenceKind::tai;
  if (s == "rd") return DependenceKind::rd;
  throw std::invalid_argument("unknown dependence kind: " + s);
}

// Pair-level estimands on a shared threshold grid:
//   qai: P[Y1 > x, Y2 > x] / (P[Y1 > x] + P[Y2 > x])
//   tai: P[Y1 > x | Y2 > x]
//   rd:  max over deep bins of P[Y1 > x | Y2 in bin] / P[Y1 > x]
inline VerifierReport dependence_report_from_pairs(const std::vector<double>& y1,
                                                   const std::vector<double>& y2,
                                                   DependenceKind which,
                                                   const std::vector<double>& levels =
                                                       default_levels()) {
  if (y1.size() != y2.size() || y1.empty()) {
    throw std::invalid_argument("dependence_report_from_pairs: need paired samples");
  }
  const std::size_t n = y1.size();
  std::vector<double> pooled;
  pooled.reserve(2 * n);
  pooled.insert(pooled.end(), y1.begin(), y1.end());
  pooled.insert(pooled.end(), y2.begin(), y2.end());
  const TailEstimate pool(std::move(pooled));
  const std::vector<double> grid = quantile_grid(pool, levels);
  const std::size_t g = grid.size();

  std::vector<std::uint64_t> joint(g, 0), s1(g, 0), s2(g, 0);
  // rd bins on y2: (grid[b], grid[b+1]] and (grid[g-1], inf)
  std::vector<std::vector<std::uint64_t>> bin_joint(g, std::vector<std::uint64_t>(g, 0));
  std::vector<std::uint64_t> bin_count(g, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t b = g;  // bin of y2[i]
    for (std::size_t k = 0; k < g; ++k) {
      const bool e1 = y1[i] > grid[k];
      joint[k] += e1 && y2[i] > grid[k];
      s1[k] += e1;
      s2[k] += y2[i] > grid[k];
    }
    for (std::size_t k = g; k-- > 0;) {
      if (y2[i] > grid[k]) {
        b = k;
        break;
      }
    }
    if (b < g) {
      ++bin_count[b];
      for (std::size_t k = 0; k < g; ++k) bin_joint[k][b] += y1[i] > grid[k];
    }
  }

  VerifierReport report;
  report.n_paths = n;
  report.grid_levels = levels;
  std::vector<double> estimand(g, 0.0);
  std::vector<bool> usable(g, false);
  for (std::size_t k = 0; k < g; ++k) {
    double denom = 0.0;
    switch (which) {
      case DependenceKind::qai:
        denom = static_cast<double>(s1[k] + s2[k]);
        usable[k] = s1[k] + s2[k] >= kMinExceedances;
        break;
      case DependenceKind::tai:
        denom = static_cast<double>(s2[k]);
        usable[k] = s2[k] >= kMinExceedances;
        break;
      case DependenceKind::rd:
        usable[k] = s1[k] >= kMinExceedances;
        break;
    }
    if (which == DependenceKind::rd) {
      double c_hat = 0.0;
      const double base = static_cast<double>(s1[k]) / static_cast<double>(n);
      for (std::size_t b = 0; b < g; ++b) {
        if (bin_count[b] < kMinExceedances) continue;
        const double cond =
            static_cast<double>(bin_joint[k][b]) / static_cast<double>(bin_count[b]);
        if (base > 0.0) c_hat = std::max(c_hat, cond / base);
      }
      estimand[k] = c_hat;
    } else {
      estimand[k] = denom > 0.0 ? static_cast<double>(joint[k]) / denom : 0.0;
    }
    RatioPoint pt;
    pt.x = grid[k];
    pt.lhs = static_cast<double>(joint[k]) / static_cast<double>(n);
    pt.rhs = which == DependenceKind::rd
                 ? static_cast<double>(s1[k]) / static_cast<double>(n)
                 : (which == DependenceKind::qai
                        ? static_cast<double>(s1[k] + s2[k]) / static_cast<double>(n)
                        : static_cast<double>(s2[k]) / static_cast<double>(n));
    pt.ratio = estimand[k];
    pt.n_lhs = joint[k];
    pt.n_rhs = which == DependenceKind::qai ? s1[k] + s2[k] : s2[k];
    pt.resolvable = usable[k];
    if (which != DependenceKind::rd && pt.n_rhs > 0) {
      const auto jci = clopper_pearson(joint[k], n);
      const auto dci = clopper_pearson(pt.n_rhs, which == DependenceKind::qai ? 2 * n : n);
      const double dlo = dci.lo * (which == DependenceKind::qai ? 2.0 : 1.0);
      const double dhi = dci.hi * (which == DependenceKind::qai ? 2.0 : 1.0);
      pt.ci_lo = dhi > 0 ? jci.lo / dhi : 0.0;
      pt.ci_hi = dlo > 0 ? jci.hi / dlo : std::numeric_limits<double>::infinity();
    }
    report.curve.points.push_back(pt);
  }

  switch (which) {
    case DependenceKind::qai:
      report.tag = "dependence_qai";
      report.rule = "pass iff the joint/(p1+p2) estimand is nonincreasing across the grid "
                    "(25% slack) and < 0.05 at the deepest resolvable point";
      break;
    case DependenceKind::tai:
      report.tag = "dependence_tai";
      report.rule = "pass iff P[Y1 > x | Y2 > x] is nonincreasing across the grid "
                    "(25% slack) and < 0.05 at the deepest resolvable point";
      break;
    case DependenceKind::rd:
      report.tag = "dependence_rd";
      report.rule = "reports the empirical regression constant C_hat over deep bins; "
                    "pass iff estimable at the deepest resolvable point";
      break;
  }

  std::optional<std::size_t> deepest;
  for (std::size_t k = g; k-- > 0;) {
    if (usable[k]) {
      deepest = k;
      break;
    }
  }
  if (!deepest) {
    report.verdict = Verdict::inconclusive;
    return report;
  }
  report.metrics["deepest_x"] = grid[*deepest];
  report.metrics["estimand_deepest"] = estimand[*deepest];
  if (which == DependenceKind::rd) {
    report.metrics["c_hat"] = estimand[*deepest];
    report.metrics["bin_edges"] = static_cast<double>(g);
    report.verdict = estimand[*deepest] > 0.0 ? Verdict::pass : Verdict::inconclusive;
    return report;
  }
  bool decreasing = true;
  double prev = -1.0;
  for (std::size_t k = 0; k <= *deepest; ++k) {
    if (!usable[k]) continue;
    if (prev >= 0.0 && estimand[k] > prev * 1.25 + 1e-12) decreasing = false;
    prev = estimand[k];
  }
  report.verdict = (decreasing && estimand[*deepest] < 0.05) ? Verdict::pass : Verdict::fail;
  return report;
}

inline VerifierReport check_dependence_assumption(
    const RuinSet& set, const VectorLaw& law, SequenceStructure structure,
    const std::optional<MarginalLaw>& shock, DependenceKind which, const Sizes& sizes,
    std::uint64_t seed, unsigned workers = 0,
    const std::vector<double>& levels = default_levels()) {
  law.validate();
  const std::size_t d = law.dims();
  std::vector<double> y1(sizes.n_paths), y2(sizes.n_paths);
  map_chunks<int>(sizes.n_paths, workers,
                  [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
                    std::vector<double> pair(2 * d);
                    for (std::uint64_t p = begin; p < end; ++p) {
                      const CounterRng rng(seed, kClaimsStream, p);
                      draw_sequence_into(law, structure, shock, 2, rng, 0, pair);
                      y1[p] = set.scalarize(std::span<const double>(pair.data(), d));
                      y2[p] = set.scalarize(std::span<const double>(pair.data() + d, d));
                    }
                    return 0;
                  });
  auto report = dependence_report_from_pairs(y1, y2, which, levels);
  report.seed = seed;
  return report;
}

}  // namespace bigjump
