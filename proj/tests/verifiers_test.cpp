#include <catch2/catch_amalgamated.hpp>

#include "bigjump/verifiers.hpp"

using namespace bigjump;

namespace {

const RuinSet& halfspace2() {
  static const RuinSet s = RuinSet::halfspace({0.5, 0.5}, 1.0);
  return s;
}
const RuinSet& anyexceed2() {
  static const RuinSet s = RuinSet::any_exceed({1.0, 1.0});
  return s;
}
VectorLaw pareto2d(double alpha) { return VectorLaw::iid(MarginalLaw::pareto(alpha), 2); }
VectorLaw exp2d() { return VectorLaw::iid(MarginalLaw::exponential(1.0), 2); }

Sizes small_sizes(std::uint64_t n) {
  Sizes s;
  s.n_paths = n;
  s.n_grid = std::max<std::uint64_t>(n, 100'000);
  return s;
}

std::vector<std::uint64_t> lhs_counts(const VerifierReport& r) {
  std::vector<std::uint64_t> out;
  for (const auto& pt : r.curve.points) out.push_back(pt.n_lhs);
  return out;
}

}  // namespace

TEST_CASE("pathwise subadditivity holds for both set kinds and laws") {
  for (const auto* set : {&halfspace2(), &anyexceed2()}) {
    for (const auto& law : {pareto2d(1.5), VectorLaw::iid(MarginalLaw::lognormal(0.0, 1.0), 2)}) {
      const auto report = check_pathwise_subadditivity(*set, law, {2, 3}, 100'000, 99, 2);
      REQUIRE(report.verdict == Verdict::pass);
      REQUIRE(report.violations.at("subadditivity") == 0);
    }
  }
}

TEST_CASE("finite-sum verifier: n = 1 gives ratio identically one") {
  const auto report = verify_finite_sum_sbj(halfspace2(), pareto2d(1.5), 1,
                                            SequenceStructure::independent, std::nullopt,
                                            small_sizes(100'000), 7, 2);
  for (const auto& pt : report.curve.points) {
    REQUIRE(pt.n_lhs == pt.n_rhs);
    if (pt.n_rhs > 0) REQUIRE(pt.ratio == Catch::Approx(1.0));
  }
  REQUIRE(report.verdict == Verdict::pass);
}

TEST_CASE("finite-sum verifier passes on heavy tails and fails the light control") {
  const auto heavy = verify_finite_sum_sbj(halfspace2(), pareto2d(1.5), 2,
                                           SequenceStructure::independent, std::nullopt,
                                           small_sizes(1'000'000), 11, 2);
  REQUIRE(heavy.verdict == Verdict::pass);
  // exceedance estimates are nonincreasing along the grid
  for (std::size_t i = 1; i < heavy.curve.points.size(); ++i) {
    REQUIRE(heavy.curve.points[i].n_lhs <= heavy.curve.points[i - 1].n_lhs);
    REQUIRE(heavy.curve.points[i].n_rhs <= heavy.curve.points[i - 1].n_rhs);
  }
  REQUIRE(heavy.violations.at("subadditivity") == 0);
  REQUIRE(heavy.violations.at("distribution_dominance") == 0);
  REQUIRE(heavy.violations.at("bonferroni_lower_bound") == 0);
  REQUIRE(heavy.metrics.at("deepest_ratio") > 0.85);
  REQUIRE(heavy.metrics.at("deepest_ratio") < 1.15);

  const auto light = verify_finite_sum_sbj(halfspace2(), exp2d(), 2,
                                           SequenceStructure::independent, std::nullopt,
                                           small_sizes(1'000'000), 11, 2);
  REQUIRE(light.verdict == Verdict::fail);
  REQUIRE(light.metrics.at("deepest_ratio") > 2.0);
}

TEST_CASE("finite-sum verifier accepts the common-shock structure") {
  const auto report = verify_finite_sum_sbj(halfspace2(), pareto2d(1.5), 2,
                                            SequenceStructure::qai_common_shock,
                                            MarginalLaw::exponential(1.0),
                                            small_sizes(1'000'000), 13, 2);
  REQUIRE(report.verdict == Verdict::pass);
}

TEST_CASE("finite-sum verifier is deterministic across worker counts") {
  const auto one = verify_finite_sum_sbj(anyexceed2(), pareto2d(1.5), 3,
                                         SequenceStructure::independent, std::nullopt,
                                         small_sizes(200'000), 17, 1);
  const auto four = verify_finite_sum_sbj(anyexceed2(), pareto2d(1.5), 3,
                                          SequenceStructure::independent, std::nullopt,
                                          small_sizes(200'000), 17, 4);
  REQUIRE(lhs_counts(one) == lhs_counts(four));
  for (std::size_t i = 0; i < one.curve.points.size(); ++i) {
    REQUIRE(one.curve.points[i].n_rhs == four.curve.points[i].n_rhs);
    REQUIRE(one.curve.points[i].x == four.curve.points[i].x);
  }
}

TEST_CASE("random-sum verifier: degenerate N reproduces counts exactly") {
  const auto report = verify_random_sum(anyexceed2(), pareto2d(1.5),
                                        CountingLaw::degenerate(1), small_sizes(200'000),
                                        23, 2);
  for (const auto& pt : report.curve.points) {
    REQUIRE(pt.n_lhs == pt.n_rhs);
    if (pt.n_rhs > 0) REQUIRE(pt.ratio == Catch::Approx(1.0));
  }
  REQUIRE(report.verdict == Verdict::pass);
}

TEST_CASE("random-sum verifier: poisson and bounded counting laws pass") {
  const std::vector<double> levels{0.9, 0.99, 0.999};
  const auto pois = verify_random_sum(anyexceed2(), pareto2d(1.5), CountingLaw::poisson(3.0),
                                      small_sizes(1'000'000), 29, 2, levels);
  REQUIRE(pois.verdict == Verdict::pass);
  REQUIRE(pois.metrics.at("counting_mean_empirical") ==
          Catch::Approx(3.0).margin(0.01));

  const auto uni = verify_random_sum(anyexceed2(), pareto2d(1.5),
                                     CountingLaw::uniform_int(1, 3), small_sizes(500'000),
                                     31, 2, levels);
  REQUIRE(uni.verdict == Verdict::pass);

  const auto light = verify_random_sum(anyexceed2(), exp2d(), CountingLaw::poisson(3.0),
                                       small_sizes(1'000'000), 29, 2, levels);
  REQUIRE(light.verdict == Verdict::fail);
}

TEST_CASE("scale mixture with degenerate theta reduces to the finite-sum verifier") {
  const auto mixture = verify_scale_mixture(halfspace2(), pareto2d(1.5),
                                            ThetaLaw::degenerate(1.0), 2,
                                            small_sizes(200'000), 37, 2);
  const auto plain = verify_finite_sum_sbj(halfspace2(), pareto2d(1.5), 2,
                                           SequenceStructure::independent, std::nullopt,
                                           small_sizes(200'000), 37, 2);
  REQUIRE(lhs_counts(mixture) == lhs_counts(plain));
  REQUIRE(mixture.violations.at("scaling_sandwich") == 0);
}

TEST_CASE("scale mixture bracket and band hold for bounded uniform theta") {
  const auto report = verify_scale_mixture(halfspace2(), pareto2d(1.5),
                                           ThetaLaw::bounded_uniform(0.5, 2.0), 2,
                                           small_sizes(1'000'000), 41, 2);
  REQUIRE(report.verdict == Verdict::pass);
  REQUIRE(report.violations.at("scaling_sandwich") == 0);
  const double bracket = report.metrics.at("bracket_ratio");
  REQUIRE(bracket > report.metrics.at("bracket_lower") - 1e-12);
  REQUIRE(bracket < report.metrics.at("bracket_upper") + 1e-12);
  // analytic pareto scaling bounds for theta in [0.5, 2], alpha = 1.5
  REQUIRE(bracket > std::pow(0.5, 1.5));
  REQUIRE(bracket < std::pow(2.0, 1.5));
}

TEST_CASE("componentwise theta is accepted and stays within the sandwich") {
  const auto report = verify_scale_mixture(
      halfspace2(), pareto2d(1.5),
      ThetaLaw::bounded_uniform(0.5, 2.0, ThetaLaw::Mode::componentwise), 2,
      small_sizes(200'000), 43, 2);
  REQUIRE(report.violations.at("scaling_sandwich") == 0);
}

TEST_CASE("convolution verifier: equal laws, dominated second law, light second law") {
  const auto equal = verify_convolution_maxsum(halfspace2(), pareto2d(1.5), pareto2d(1.5),
                                               small_sizes(1'000'000), 47, 2);
  REQUIRE(equal.verdict == Verdict::pass);

  const auto dominated = verify_convolution_maxsum(halfspace2(), pareto2d(1.5),
                                                   pareto2d(2.5), small_sizes(1'000'000),
                                                   53, 2);
  REQUIRE(dominated.verdict == Verdict::pass);

  const auto light_second = verify_convolution_maxsum(halfspace2(), pareto2d(1.5), exp2d(),
                                                      small_sizes(1'000'000), 59, 2);
  REQUIRE(light_second.verdict == Verdict::pass);

  const auto both_light = verify_convolution_maxsum(halfspace2(), exp2d(), exp2d(),
                                                    small_sizes(1'000'000), 61, 2);
  REQUIRE(both_light.verdict == Verdict::fail);
}

TEST_CASE("kesten growth: monotone decay, anchored r1, stable K across seeds") {
  const auto law = VectorLaw::iid(MarginalLaw::pareto(1.5), 1);
  const auto set = RuinSet::halfspace({1.0}, 1.0);
  const auto a = verify_kesten_growth(set, law, 6, 0.5, small_sizes(300'000), 67, 2);
  REQUIRE(a.verdict == Verdict::pass);
  REQUIRE(a.curve.points[0].ratio == Catch::Approx(1.0 / 1.5));  // r_1 = 1 by anchoring
  REQUIRE(a.metrics.at("k_hat") >= 1.0 / 1.5 - 1e-12);
  const auto b = verify_kesten_growth(set, law, 6, 0.5, small_sizes(300'000), 68, 2);
  const double rel = std::fabs(a.metrics.at("k_hat") - b.metrics.at("k_hat")) /
                     a.metrics.at("k_hat");
  REQUIRE(rel < 0.25);
}

TEST_CASE("kesten growth covers the light-tailed case with a large enough epsilon") {
  const auto law = VectorLaw::iid(MarginalLaw::exponential(1.0), 1);
  const auto set = RuinSet::halfspace({1.0}, 1.0);
  const auto report = verify_kesten_growth(set, law, 6, 0.5, small_sizes(200'000), 71, 2);
  // boundedness over the simulated range: K_hat finite either way, and the
  // minimal sustaining epsilon is reported
  REQUIRE(std::isfinite(report.metrics.at("k_hat")));
  REQUIRE(report.metrics.at("epsilon_min_sustaining") >= 0.0);

  const auto heavy = verify_kesten_growth(set, VectorLaw::iid(MarginalLaw::pareto(1.5), 1),
                                          6, 0.5, small_sizes(200'000), 71, 2);
  REQUIRE(heavy.metrics.at("epsilon_min_sustaining") <
          report.metrics.at("epsilon_min_sustaining"));
}

TEST_CASE("finite-sum ratio agrees with the quadrature oracle route") {
  // the two-summand sum of halfspace scalarizations is a four-fold marginal
  // convolution; deterministic quadrature pins its tail at the 99.9% anchor
  const std::vector<double> levels{0.9, 0.99, 0.999};
  const auto report = verify_finite_sum_sbj(halfspace2(), pareto2d(1.5), 2,
                                            SequenceStructure::independent, std::nullopt,
                                            small_sizes(1'000'000), 113, 2, levels);
  const auto idx = report.curve.deepest_resolvable();
  REQUIRE(idx.has_value());
  const auto& pt = report.curve.points[*idx];
  // independent quadrature value of the same ratio at the true quantile: 1.0575
  REQUIRE(pt.ci_lo < 1.0575);
  REQUIRE(pt.ci_hi > 1.0575);
}

TEST_CASE("translation insensitivity: zero shift is exact, heavy passes, light fails") {
  const auto zero = verify_translation_insensitivity(halfspace2(), pareto2d(1.5),
                                                     {0.0, 0.0}, small_sizes(100'000), 73, 2);
  for (const auto& pt : zero.curve.points) {
    REQUIRE(pt.n_lhs == pt.n_rhs);
  }
  REQUIRE(zero.violations.at("sandwich") == 0);

  const auto heavy = verify_translation_insensitivity(halfspace2(), pareto2d(1.5),
                                                      {1.0, 1.0}, small_sizes(1'000'000),
                                                      79, 2);
  REQUIRE(heavy.verdict == Verdict::pass);
  REQUIRE(heavy.violations.at("sandwich") == 0);
  REQUIRE(heavy.metrics.at("u1") == Catch::Approx(1.0));

  const auto light = verify_translation_insensitivity(halfspace2(), exp2d(), {1.0, 1.0},
                                                      small_sizes(1'000'000), 83, 2);
  REQUIRE(light.verdict == Verdict::fail);
}

TEST_CASE("dependence checkers: independent, comonotone, common shock") {
  const Sizes sz = small_sizes(1'000'000);
  const auto qai_indep = check_dependence_assumption(halfspace2(), pareto2d(1.5),
                                                     SequenceStructure::independent,
                                                     std::nullopt, DependenceKind::qai, sz,
                                                     89, 2);
  REQUIRE(qai_indep.verdict == Verdict::pass);
  REQUIRE(qai_indep.metrics.at("estimand_deepest") < 0.05);

  const auto qai_comono = check_dependence_assumption(halfspace2(), pareto2d(1.5),
                                                      SequenceStructure::comonotone_duplicate,
                                                      std::nullopt, DependenceKind::qai, sz,
                                                      89, 2);
  REQUIRE(qai_comono.verdict == Verdict::fail);
  REQUIRE(qai_comono.metrics.at("estimand_deepest") == Catch::Approx(0.5).margin(0.01));

  const auto qai_shock = check_dependence_assumption(halfspace2(), pareto2d(1.5),
                                                     SequenceStructure::qai_common_shock,
                                                     MarginalLaw::exponential(1.0),
                                                     DependenceKind::qai, sz, 89, 2);
  REQUIRE(qai_shock.verdict == Verdict::pass);

  const auto tai_indep = check_dependence_assumption(halfspace2(), pareto2d(1.5),
                                                     SequenceStructure::independent,
                                                     std::nullopt, DependenceKind::tai, sz,
                                                     89, 2);
  REQUIRE(tai_indep.verdict == Verdict::pass);

  const auto tai_comono = check_dependence_assumption(halfspace2(), pareto2d(1.5),
                                                      SequenceStructure::comonotone_duplicate,
                                                      std::nullopt, DependenceKind::tai, sz,
                                                      89, 2);
  REQUIRE(tai_comono.verdict == Verdict::fail);

  const auto rd_indep = check_dependence_assumption(halfspace2(), pareto2d(1.5),
                                                    SequenceStructure::independent,
                                                    std::nullopt, DependenceKind::rd, sz,
                                                    89, 2);
  REQUIRE(rd_indep.verdict == Verdict::pass);
  REQUIRE(rd_indep.metrics.at("c_hat") > 0.0);
  REQUIRE(rd_indep.metrics.at("c_hat") < 3.0);  // independence: constant near 1
}

TEST_CASE("tiny samples come back inconclusive, not pass or fail") {
  Sizes tiny;
  tiny.n_paths = 100;
  tiny.n_grid = 1000;
  const auto report = verify_finite_sum_sbj(halfspace2(), pareto2d(1.5), 2,
                                            SequenceStructure::independent, std::nullopt,
                                            tiny, 97, 1);
  REQUIRE(report.verdict == Verdict::inconclusive);
}
