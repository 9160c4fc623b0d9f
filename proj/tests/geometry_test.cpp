#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "bigjump/geometry.hpp"
#include "bigjump/rng.hpp"

using namespace bigjump;

TEST_CASE("halfspace constructor scales weights by the threshold") {
  auto g = RuinSet::halfspace({0.5, 0.5}, 1.0);
  REQUIRE(g.dims() == 2);
  REQUIRE(g.direction_count() == 1);
  REQUIRE(g.direction(0) == std::vector<double>{0.5, 0.5});

  auto one_d = RuinSet::halfspace({1.0}, 2.0);
  REQUIRE(one_d.direction(0) == std::vector<double>{0.5});

  auto skew = RuinSet::halfspace({0.3, 0.7}, 2.0);
  REQUIRE(skew.direction(0)[0] == Catch::Approx(0.15));
  REQUIRE(skew.direction(0)[1] == Catch::Approx(0.35));

  REQUIRE_THROWS_AS(RuinSet::halfspace({0.0, 0.0}, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(RuinSet::halfspace({0.5, 0.5}, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(RuinSet::halfspace({0.5, 0.5}, -1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(RuinSet::halfspace({0.4, 0.4}, 1.0), std::invalid_argument);
}

TEST_CASE("any_exceed constructor uses reciprocal barriers on the axes") {
  auto s = RuinSet::any_exceed({1.0, 1.0});
  REQUIRE(s.direction_count() == 2);
  auto scaled = RuinSet::any_exceed({2.0, 4.0});
  std::vector<std::vector<double>> dirs{scaled.direction(0), scaled.direction(1)};
  std::sort(dirs.begin(), dirs.end());
  REQUIRE(dirs[0] == std::vector<double>{0.0, 0.25});
  REQUIRE(dirs[1] == std::vector<double>{0.5, 0.0});

  REQUIRE(RuinSet::any_exceed({1.0, 1.0, 1.0}).direction_count() == 3);
  REQUIRE_THROWS_AS(RuinSet::any_exceed({1.0, 0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(RuinSet::any_exceed({-1.0}), std::invalid_argument);
}

TEST_CASE("all_exceed box is refused for d >= 2 and degenerates for d = 1") {
  REQUIRE_THROWS_WITH(RuinSet::all_exceed({1.0, 1.0}),
                      Catch::Matchers::ContainsSubstring("non-convex"));
  REQUIRE_THROWS_AS(RuinSet::all_exceed({1.0, 2.0, 3.0}), std::invalid_argument);
  auto line = RuinSet::all_exceed({3.0});
  REQUIRE(line.dims() == 1);
  REQUIRE(line.direction(0)[0] == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("scalarization matches the worked examples") {
  auto g = RuinSet::halfspace({0.5, 0.5}, 1.0);
  REQUIRE(g.scalarize(std::vector<double>{3.0, 1.0}) == Catch::Approx(2.0));
  auto s = RuinSet::any_exceed({1.0, 1.0});
  REQUIRE(s.scalarize(std::vector<double>{2.0, 0.5}) == Catch::Approx(2.0));
  REQUIRE(s.scalarize(std::vector<double>{0.0, 0.0}) == 0.0);
  REQUIRE_THROWS_AS(g.scalarize(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("membership uses strict inequality, the set is open") {
  auto g = RuinSet::halfspace({0.5, 0.5}, 1.0);
  const std::vector<double> x{3.0, 1.0};
  REQUIRE(g.member(x, 1.5));
  REQUIRE_FALSE(g.member(x, 2.0));  // boundary excluded
  auto s = RuinSet::any_exceed({1.0, 1.0});
  REQUIRE_FALSE(s.member(std::vector<double>{0.9, 0.9}, 1.0));
  REQUIRE_THROWS_AS(g.member(x, 0.0), std::invalid_argument);
}

TEST_CASE("shifted scalarization clamps at zero and matches examples") {
  auto g = RuinSet::halfspace({0.5, 0.5}, 1.0);
  const std::vector<double> x{3.0, 1.0};
  REQUIRE(g.scalarize_shifted(x, std::vector<double>{1.0, 1.0}) == Catch::Approx(1.0));
  REQUIRE(g.scalarize_shifted(x, std::vector<double>{0.0, 0.0}) ==
          Catch::Approx(g.scalarize(x)));
  auto s = RuinSet::any_exceed({1.0, 1.0});
  REQUIRE(s.scalarize_shifted(std::vector<double>{2.0, 0.5},
                              std::vector<double>{1.0, 0.0}) == Catch::Approx(1.0));
  // Shift large enough to push every direction negative.
  REQUIRE(g.scalarize_shifted(std::vector<double>{1.0, 1.0},
                              std::vector<double>{5.0, 5.0}) == 0.0);
}

TEST_CASE("duplicate and dominated directions are pruned without changing Y_A") {
  auto dup = RuinSet::any_exceed({1.0, 1.0});
  REQUIRE(dup.direction_count() == 2);
  // nothing dominated here; halfspace keeps its single direction
  auto g = RuinSet::halfspace({0.5, 0.5}, 1.0);
  REQUIRE(g.direction_count() == 1);
}

namespace {

std::vector<double> random_point(const CounterRng& rng, std::uint64_t base, std::size_t d,
                                 double scale) {
  std::vector<double> x(d);
  for (std::size_t j = 0; j < d; ++j) {
    x[j] = scale * std::pow(rng.uniform(base + j), -0.75);  // heavy-ish positive points
  }
  return x;
}

}  // namespace

TEST_CASE("subadditivity, homogeneity, monotonicity hold on random pairs") {
  const auto sets = {RuinSet::halfspace({0.5, 0.5}, 1.0), RuinSet::any_exceed({1.0, 2.0})};
  CounterRng rng(2718, 11, 0);
  for (const auto& set : sets) {
    for (std::uint64_t i = 0; i < 100000; ++i) {
      const auto x = random_point(rng, 8 * i, 2, 1.0);
      const auto y = random_point(rng, 8 * i + 2, 2, 2.0);
      const double yx = set.scalarize(x);
      const double yy = set.scalarize(y);
      std::vector<double> sum{x[0] + y[0], x[1] + y[1]};
      const double ys = set.scalarize(sum);
      REQUIRE(ys <= (yx + yy) * (1.0 + 1e-12) + 1e-300);

      const double lambda = 0.25 + 3.0 * rng.uniform(8 * i + 4);
      std::vector<double> lx{lambda * x[0], lambda * x[1]};
      REQUIRE(set.scalarize(lx) == Catch::Approx(lambda * yx).epsilon(1e-12));

      std::vector<double> bigger{x[0] + 0.5, x[1]};
      REQUIRE(set.scalarize(bigger) >= yx);

      // boundary openness: x never belongs to Y_A(x) * A
      if (yx > 0.0) REQUIRE_FALSE(set.member(x, yx));
    }
  }
}

TEST_CASE("halfspace scalarization is exactly linear") {
  auto g = RuinSet::halfspace({0.25, 0.75}, 2.0);
  CounterRng rng(11, 3, 0);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto x = random_point(rng, 4 * i, 2, 1.0);
    const auto y = random_point(rng, 4 * i + 2, 2, 1.0);
    std::vector<double> sum{x[0] + y[0], x[1] + y[1]};
    const double lhs = g.scalarize(sum);
    const double rhs = g.scalarize(x) + g.scalarize(y);
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("sandwich property holds with u1 = max_p |p.a|") {
  const auto sets = {RuinSet::halfspace({0.5, 0.5}, 1.0), RuinSet::any_exceed({1.0, 2.0})};
  const std::vector<double> a{0.7, -0.3};
  CounterRng rng(333, 17, 0);
  for (const auto& set : sets) {
    const double u1 = set.shift_radius(a);
    REQUIRE(u1 > 0.0);
    for (std::uint64_t i = 0; i < 50000; ++i) {
      const auto x = random_point(rng, 4 * i, 2, 1.5);
      const double u = u1 + 0.1 + 5.0 * rng.uniform(4 * i + 3);
      const double y_plain = set.scalarize(x);
      const double y_shift = set.scalarize_shifted(x, a);
      // x in (u+u1)A  =>  x in uA + a  =>  x in (u-u1)A
      if (y_plain > u + u1) REQUIRE(y_shift > u * (1.0 - 1e-12));
      if (y_shift > u) REQUIRE(y_plain > (u - u1) * (1.0 - 1e-12));
    }
  }
}
