#include <cmath>
#include <vector>

#include "doctest.h"
#include "lavgap/cantor.hpp"
#include "lavgap/sampling.hpp"

using namespace lavgap;

TEST_CASE("pure geometric lengths") {
  CantorSet set(CantorSpec::generalized(0.25, 0.0));
  CHECK(set.length(0) == doctest::Approx(1.0));
  CHECK(set.length(2) == doctest::Approx(1.0 / 16.0));
  CHECK(set.reindexOffset() == 0);
  CHECK(set.dimension() == doctest::Approx(0.5));
}

TEST_CASE("reindexing selects an admissible tail") {
  // lambda=0.4, gamma=1: l2/l1 = 0.8 violates the ratio; a positive offset
  // must be chosen and the reindexed sequence must satisfy both conditions.
  CantorSet set(CantorSpec::generalized(0.4, 1.0));
  CHECK(set.reindexOffset() > 0);
  CHECK(set.length(0) == doctest::Approx(1.0));
  for (int j = 1; j <= set.maxDepth(); ++j) {
    CHECK(set.length(j - 1) > 2.0 * set.length(j));
  }
  for (int j = 1; j < set.maxDepth(); ++j) {
    CHECK(set.length(j - 1) - 2 * set.length(j) >
          set.length(j) - 2 * set.length(j + 1));
  }
}

TEST_CASE("meager lengths") {
  CantorSet set(CantorSpec::meager(1.0));
  // Raw l_j = exp(-2^j). The ratio condition holds from j0 = 0, but the
  // removed-gap monotonicity fails at the first step
  // (1 - 2e^{-1} < e^{-1} - 2e^{-3}), so the reindexing shifts by one and
  // l~_j = exp(-2^{j+1}) / exp(-2).
  CHECK(set.reindexOffset() == 1);
  CHECK(set.length(3) == doctest::Approx(std::exp(-16.0) / std::exp(-2.0)));
  CHECK(set.dimension() == 0.0);
  for (int j = 1; j < set.maxDepth(); ++j) {
    CHECK(set.length(j - 1) > 2.0 * set.length(j));
    CHECK(set.length(j - 1) - 2 * set.length(j) >
          set.length(j) - 2 * set.length(j + 1));
  }
}

TEST_CASE("generation structure and nesting") {
  CantorSet set(CantorSpec::generalized(0.25, 0.0));
  auto g0 = set.generation(0);
  CHECK(g0.intervals.size() == 1);
  CHECK(g0.intervals[0].a == doctest::Approx(-0.5));
  CHECK(g0.intervals[0].b == doctest::Approx(0.5));

  auto g1 = set.generation(1);
  REQUIRE(g1.intervals.size() == 2);
  CHECK(g1.intervals[0].a == doctest::Approx(-0.5));
  CHECK(g1.intervals[0].b == doctest::Approx(-0.25));
  CHECK(g1.intervals[1].a == doctest::Approx(0.25));
  CHECK(g1.intervals[1].b == doctest::Approx(0.5));

  // Nesting: every generation-(m+1) interval sits inside a generation-m one.
  for (int m = 0; m + 1 <= 6; ++m) {
    auto parent = set.generation(m);
    auto child = set.generation(m + 1);
    for (const auto& c : child.intervals) {
      bool nested = false;
      for (const auto& p : parent.intervals)
        nested = nested || (c.a >= p.a - 1e-15 && c.b <= p.b + 1e-15);
      CHECK(nested);
    }
  }
}

TEST_CASE("middle-thirds analogue") {
  // lambda = 1/3 on [-1/2, 1/2]: generation 2 has 4 intervals of length 1/9.
  CantorSet set(CantorSpec::generalized(1.0 / 3.0, 0.0));
  auto g2 = set.generation(2);
  REQUIRE(g2.intervals.size() == 4);
  for (const auto& iv : g2.intervals) CHECK(iv.length() == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("distance exactness") {
  CantorSet set(CantorSpec::generalized(0.25, 0.0));
  CHECK(set.distance(0.5).value == doctest::Approx(0.0));
  CHECK(set.distance(0.0).value == doctest::Approx(0.25));
  CHECK(set.distance(1.0).value == doctest::Approx(0.5));
  CHECK(set.distance(1.0).derivative == doctest::Approx(1.0));

  // Distance vanishes on every generation endpoint.
  for (int m = 1; m <= 8; ++m) {
    for (const auto& iv : set.generation(m).intervals) {
      CHECK(set.distance(iv.a).value == doctest::Approx(0.0));
      CHECK(set.distance(iv.b).value == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("distance is 1-Lipschitz and consistent with brute force") {
  CantorSet set(CantorSpec::generalized(0.25, 0.0));
  // Brute-force oracle: distance to generation-12 endpoints brackets the
  // true distance within l_12.
  auto g = set.generation(12);
  auto brute = [&](double x) {
    double best = 1e300;
    for (const auto& iv : g.intervals) {
      best = std::min(best, std::abs(x - iv.a));
      best = std::min(best, std::abs(x - iv.b));
    }
    return best;
  };
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double x = 1.4 * (rng.uniform() - 0.5);
    const auto d = set.distance(x);
    CHECK(d.value <= brute(x) + 1e-12);
    CHECK(d.value >= brute(x) - set.length(12));
  }
  // Lipschitz.
  for (int i = 0; i < 2000; ++i) {
    const double x = 1.2 * (rng.uniform() - 0.5);
    const double h = 1e-4 * rng.uniform();
    CHECK(std::abs(set.distance(x + h).value - set.distance(x).value) <= h + 1e-15);
  }
}

TEST_CASE("measure atoms conserve mass") {
  auto prod = CantorProduct::make(CantorSpec::generalized(0.25, 0.0, 2));
  for (int depth : {0, 1, 3, 6}) {
    double mass = 0.0;
    prod->traverse(
        depth, [](const CantorProduct::Cell&) { return false; },
        [&](const CantorProduct::Cell& c) { mass += c.mass; });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ball mass bounds") {
  auto prod = CantorProduct::make(CantorSpec::generalized(0.25, 0.0, 1));
  // Total mass once the ball covers the hull.
  std::vector<double> center{0.0};
  CHECK(prod->ballMass(center, 2.0, 8) == doctest::Approx(1.0));
  // Zero off the set.
  std::vector<double> off{0.3};
  CHECK(prod->ballMass(off, 1e-9, 8) == doctest::Approx(0.0));

  // Measure scaling: ball of radius l_j/2 - l_{j+1} around a set point meets
  // at most one generation-j interval.
  const CantorSet& axis = prod->axis();
  for (int j = 1; j <= 6; ++j) {
    const double t = 0.5 * axis.length(j) - axis.length(j + 1);
    std::vector<double> c{-0.5};
    CHECK(prod->ballMass(c, t, 12) <= std::pow(0.5, j) * (1.0 + 1e-9));
  }
}

TEST_CASE("neighborhood volume: exact merge and scaling slope") {
  auto prod = CantorProduct::make(CantorSpec::generalized(0.25, 0.0, 1));
  // Large t: the whole inflated hull.
  CHECK(neighborhoodVolume(*prod, 10.0).numeric == doctest::Approx(21.0));

  // Log-log slope of |C_t| equals power - D within 0.05 for gamma = 0.
  const double dim = prod->dimension();
  std::vector<double> ts, vs;
  for (int i = 0; i <= 40; ++i) {
    const double t = std::pow(10.0, -6.0 + 4.0 * i / 40.0);
    ts.push_back(std::log(t));
    vs.push_back(std::log(neighborhoodVolume(*prod, t).numeric));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sx += ts[i];
    sy += vs[i];
    sxx += ts[i] * ts[i];
    sxy += ts[i] * vs[i];
  }
  const double n = static_cast<double>(ts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(1.0 - dim).epsilon(0.05));
}

TEST_CASE("product distance and gradient") {
  auto prod = CantorProduct::make(CantorSpec::generalized(0.25, 0.0, 2));
  std::vector<double> x{0.0, 1.0};
  auto pd = prod->distanceWithGradient(x);
  CHECK(pd.value == doctest::Approx(std::sqrt(0.25 * 0.25 + 0.25)));
  // Gradient is a unit vector a.e.
  double g2 = 0.0;
  for (double g : pd.gradient) g2 += g * g;
  CHECK(g2 == doctest::Approx(1.0));
}

TEST_CASE("point set degenerates cleanly") {
  auto prod = CantorProduct::make(CantorSpec::point(2));
  std::vector<double> x{0.3, -0.4};
  CHECK(prod->distance(x).value == doctest::Approx(0.5));
  double mass = 0.0;
  prod->traverse(
      0, [](const CantorProduct::Cell&) { return false; },
      [&](const CantorProduct::Cell& c) { mass += c.mass; });
  CHECK(mass == doctest::Approx(1.0));
}

TEST_CASE("spec validation") {
  CHECK_THROWS(CantorSet(CantorSpec::generalized(0.6, 0.0)));
  CHECK_THROWS(CantorSet(CantorSpec::meager(-1.0)));
}
