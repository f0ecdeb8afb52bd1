#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lavgap/forms.hpp"
#include "lavgap/quadrature.hpp"
#include "lavgap/sampling.hpp"
#include "oracle_sampling.hpp"

using namespace lavgap;
using lavgap::testing::relDiff;
using lavgap::testing::ShellSampler;

TEST_CASE("cutoff functions") {
  CHECK(thetaCutoff(0.2) == doctest::Approx(0.0));
  CHECK(thetaCutoff(0.6) == doctest::Approx(1.0));
  CHECK(thetaCutoff(0.375) == doctest::Approx(0.5));  // smoothstep symmetry
  CHECK(thetaCutoffPrime(0.2) == doctest::Approx(0.0));
  CHECK(thetaCutoffPrime(0.55) == doctest::Approx(0.0));
  // |theta'| <= 7.5 with the max at the midpoint.
  double maxP = 0.0;
  for (double t = 0.2; t <= 0.55; t += 1e-4) maxP = std::max(maxP, thetaCutoffPrime(t));
  CHECK(maxP <= 7.5 + 1e-9);
  CHECK(maxP == doctest::Approx(7.5).epsilon(1e-4));

  CHECK(etaCutoff(0.25) == doctest::Approx(0.25));
  CHECK(etaCutoffPrime(0.25 - 1e-9) == doctest::Approx(1.0));
  CHECK(etaCutoffPrime(0.25 + 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(etaCutoff(0.75) == doctest::Approx(0.5));
  CHECK(etaCutoffPrime(0.75 - 1e-9) == doctest::Approx(0.0).epsilon(1e-6));
  for (double t = 0.0; t < 1.0; t += 1e-3) CHECK(etaCutoff(t) <= t + 1e-12);
}

TEST_CASE("fundamental solution values") {
  CHECK(gammaValue(1, 3.0) == doctest::Approx(1.5));
  CHECK(gammaValue(3, 1.0) == doctest::Approx(-1.0 / (4.0 * std::numbers::pi)));
  CHECK(surfaceArea(2) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(surfaceArea(3) == doctest::Approx(4.0 * std::numbers::pi));

  // |*dGamma_2| = 1/(2 pi) on the unit circle.
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double z[2] = {std::cos(phi), std::sin(phi)};
    auto k = starDGamma(2, 0, 2, z);
    CHECK(k.norm() == doctest::Approx(1.0 / (2.0 * std::numbers::pi)));
  }
}

TEST_CASE("kernel closedness and flux normalization") {
  // d(*dGamma_n) = 0 off the pole, via the finite-difference oracle.
  for (int n : {2, 3}) {
    FormField kernel;
    kernel.dim = n;
    kernel.degree = n - 1;
    kernel.eval = [n](std::span<const double> x) { return starDGamma(n, 0, n, x); };
    kernel.evalDerivative = [n](std::span<const double>) { return ExteriorElement(n, n); };
    Rng rng(17);
    for (int i = 0; i < 50; ++i) {
      std::vector<double> x(n);
      double nrm = 0.0;
      for (int d = 0; d < n; ++d) {
        x[d] = rng.uniform() - 0.5;
        nrm += x[d] * x[d];
      }
      if (std::sqrt(nrm) < 0.2) continue;
      auto fd = fdDerivative(kernel, x, 1e-5);
      CHECK(fd.norm() <= 1e-6);
    }

    // Flux through the boundary of (-eps, eps)^n equals 1.
    for (double eps : {0.3, 0.7}) {
      FaceQuadConfig cfg;
      cfg.tolerance = 1e-7;
      auto flux = integrateFaces(kernel, eps, cfg);
      CHECK(flux.value == doctest::Approx(1.0).epsilon(1e-4));
    }
  }
}

TEST_CASE("fd oracle on closed forms") {
  // Constant field: derivative vanishes identically.
  FormField constant;
  constant.dim = 3;
  constant.degree = 1;
  constant.eval = [](std::span<const double>) {
    auto e = ExteriorElement::basis(3, {2});
    return 3.7 * e;
  };
  std::vector<double> x{0.3, -0.2, 0.5};
  CHECK(fdDerivative(constant, x, 1e-5).norm() <= 1e-12);

  // f = x1 dx2: df = dx1 ^ dx2.
  FormField linear;
  linear.dim = 3;
  linear.degree = 1;
  linear.eval = [](std::span<const double> p) {
    ExteriorElement e(3, 1);
    e.setCoefficient(MultiIndex::fromIndices({2}, 3), p[0]);
    return e;
  };
  auto df = fdDerivative(linear, x, 1e-5);
  CHECK(df.coefficient(MultiIndex::fromIndices({1, 2}, 3)) == doctest::Approx(1.0).epsilon(1e-9));

  // d(d(.)) = 0 on a polynomial 1-form, with d computed analytically and the
  // second d by differences.
  FormField poly;
  poly.dim = 3;
  poly.degree = 1;
  poly.eval = [](std::span<const double> p) {
    ExteriorElement e(3, 1);
    e.setCoefficient(MultiIndex::fromIndices({1}, 3), p[1] * p[1] * p[2]);
    e.setCoefficient(MultiIndex::fromIndices({3}, 3), p[0] * p[1]);
    return e;
  };
  FormField dPoly;
  dPoly.dim = 3;
  dPoly.degree = 2;
  dPoly.eval = [&](std::span<const double> p) { return fdDerivative(poly, p, 1e-4); };
  auto ddf = fdDerivative(dPoly, x, 1e-4);
  CHECK(ddf.norm() <= 1e-4);
}

TEST_CASE("basic pair: supports and derivative oracle") {
  for (int N : {2, 3}) {
    for (int m = 1; m < N; ++m) {
      PairGeometry geom = makeBasicGeometry(N, m);
      FormField u = makeUType(geom);
      FormField A = makeAType(geom);
      CHECK(u.degree == N - m - 1);
      CHECK(A.degree == m - 1);

      // theta plateau at zero: u vanishes when |x^| is small.
      std::vector<double> x(N, 0.0);
      x[0] = 0.5;
      x[N - 1] = 0.5 / (4.0 * std::sqrt(static_cast<double>(N))) * 0.5;
      if (m == N - 1) CHECK(u.eval(x).isZero());

      // Derivative oracle in the transition shell.
      ShellSampler sampler(geom, 91 + N * 10 + m, 1e-5);
      std::vector<double> pt;
      int done = 0;
      double worstU = 0.0, worstA = 0.0;
      for (int i = 0; i < 200 && done < 100; ++i) {
        if (!sampler.uShellPoint(pt)) continue;
        auto analytic = u.evalDerivative(pt);
        auto fd = fdDerivative(u, pt, 1e-5);
        worstU = std::max(worstU, relDiff(analytic, fd));
        ++done;
      }
      CHECK(done >= 100);
      CHECK(worstU <= 1e-6);

      done = 0;
      for (int i = 0; i < 200 && done < 100; ++i) {
        if (!sampler.aShellPoint(pt)) continue;
        auto analytic = A.evalDerivative(pt);
        auto fd = fdDerivative(A, pt, 1e-5);
        worstA = std::max(worstA, relDiff(analytic, fd));
        ++done;
      }
      CHECK(done >= 100);
      CHECK(worstA <= 1e-6);
    }
  }
}

TEST_CASE("fractal pair: derivative oracle at fixed atom depth") {
  CantorSpec spec = CantorSpec::generalized(0.25, -2.0, 2);
  PairGeometry geom = makeGeometry(3, spec, 5);
  geom.adaptiveTree = false;  // oracle checks run against the exact mu_5 sum
  FormField u = makeUType(geom);
  FormField A = makeAType(geom);

  ShellSampler sampler(geom, 1234, 1e-5);
  std::vector<double> pt;
  int done = 0;
  double worst = 0.0;
  for (int i = 0; i < 300 && done < 120; ++i) {
    if (!sampler.uShellPoint(pt)) continue;
    worst = std::max(worst, relDiff(u.evalDerivative(pt), fdDerivative(u, pt, 1e-5)));
    ++done;
  }
  CHECK(done >= 120);
  CHECK(worst <= 1e-6);

  done = 0;
  worst = 0.0;
  for (int i = 0; i < 300 && done < 120; ++i) {
    if (!sampler.aShellPoint(pt)) continue;
    worst = std::max(worst, relDiff(A.evalDerivative(pt), fdDerivative(A, pt, 1e-5)));
    ++done;
  }
  CHECK(done >= 120);
  CHECK(worst <= 1e-6);
}

TEST_CASE("adaptive tree matches the full atom sum") {
  CantorSpec spec = CantorSpec::generalized(0.25, -2.0, 2);
  PairGeometry adaptive = makeGeometry(3, spec, 8);
  adaptive.openTol = 0.03;
  PairGeometry exact = adaptive;
  exact.adaptiveTree = false;
  FormField aFast = makeAType(adaptive);
  FormField aExact = makeAType(exact);

  Rng rng(55);
  double worstVal = 0.0, worstDer = 0.0;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> x(3);
    x[0] = 1.6 * (rng.uniform() - 0.5);
    x[1] = 1.6 * (rng.uniform() - 0.5);
    x[2] = (rng.uniform() < 0.5 ? -1 : 1) * (0.05 + 0.9 * rng.uniform());
    worstVal = std::max(worstVal, relDiff(aFast.eval(x), aExact.eval(x)));
    worstDer = std::max(worstDer, relDiff(aFast.evalDerivative(x), aExact.evalDerivative(x)));
  }
  CHECK(worstVal <= 3e-3);
  CHECK(worstDer <= 3e-3);
}

TEST_CASE("degenerate fractal evaluator reduces to the basic forms") {
  PairGeometry basic = makeBasicGeometry(3, 2);
  CHECK(basic.distConst == doctest::Approx(1.0));
  FormField u = makeUType(basic);
  // d(x-, {0}) = |x-|: u must reduce exactly to the basic saddle-point form.
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x{1.4 * (rng.uniform() - 0.5), 1.4 * (rng.uniform() - 0.5),
                          1.4 * (rng.uniform() - 0.5)};
    const double rBar = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    const double rHat = std::abs(x[2]);
    if (rHat < 1e-6) continue;
    const double arg = std::sqrt(3.0) * rHat / etaCutoff(rBar);
    const double expected = thetaCutoff(arg) * 0.5;  // |*dGamma_1| = 1/2
    CHECK(u.eval(x).norm() == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("separator sandwich and support disjointness") {
  CantorSpec spec = CantorSpec::generalized(0.25, -2.0, 2);
  PairGeometry geom = makeGeometry(3, spec, 6);
  FormField u = makeUType(geom);
  FormField A = makeAType(geom);
  ScalarField rho = makeRhoField(geom);

  long long overlap = 0;
  long long sandwichFail = 0;
  for (long long i = 0; i < 100000; ++i) {
    auto x = jitteredBoxPoint(static_cast<std::uint64_t>(i), 3, -1.0, 1.0, 99, 1e-9);
    const bool inDu = u.derivativeSupport(x);
    const bool inDa = A.derivativeSupport(x);
    const double nu = inDu ? u.evalDerivative(x).norm() : 0.0;
    const double na = inDa ? A.evalDerivative(x).norm() : 0.0;
    if (std::min(nu, na) != 0.0) ++overlap;
    const double r = rho(x);
    if (r * nu != 0.0) ++sandwichFail;
    if ((1.0 - r) * na != 0.0) ++sandwichFail;
  }
  CHECK(overlap == 0);
  CHECK(sandwichFail == 0);
}

TEST_CASE("du support-shell estimate: |du| <= c |x^|^{m-N} with stable c") {
  PairGeometry geom = makeBasicGeometry(3, 1);
  FormField u = makeUType(geom);
  // Sample along a ray inside the shell at shrinking |x^|, fit the constant.
  double cMin = 1e300, cMax = 0.0;
  for (int j = 4; j <= 14; ++j) {
    const double rHat = std::exp2(-static_cast<double>(j));
    // Choose |x-| so the point is mid-shell: arg = sqrt(N) rHat / eta(|x-|) = 3/8.
    const double etaNeeded = std::sqrt(3.0) * rHat / 0.375;
    if (etaNeeded >= 0.25) continue;  // stay on the eta = identity branch
    std::vector<double> x{etaNeeded, rHat / std::sqrt(2.0), rHat / std::sqrt(2.0)};
    const double du = u.evalDerivative(x).norm();
    const double c = du * std::pow(rHat, 3.0 - 1.0);  // |du| ~ |x^|^{k-N} = r^-2
    cMin = std::min(cMin, c);
    cMax = std::max(cMax, c);
  }
  CHECK(cMax / cMin <= 1.5);
}

TEST_CASE("localization split") {
  PairGeometry geom = makeBasicGeometry(2, 1);
  FormField u = makeUType(geom);
  RadialBump bump{2, 1.05, 0.5 * (1.05 + std::sqrt(2.0))};
  SplitPair split{u, bump};
  FormField in = split.interior();
  FormField out = split.boundary();

  Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    std::vector<double> x{2.6 * (rng.uniform() - 0.5), 2.6 * (rng.uniform() - 0.5)};
    if (std::abs(x[0]) < 1e-3 && std::abs(x[1]) < 1e-3) continue;
    auto sum = in.eval(x) + out.eval(x);
    CHECK(relDiff(sum, u.eval(x)) <= 1e-12);
    auto dsum = in.evalDerivative(x) + out.evalDerivative(x);
    CHECK((dsum - u.evalDerivative(x)).norm() <= 1e-12 * std::max(1.0, dsum.norm()));
  }
  // Bump is 1 near the singular set, 0 near the domain boundary.
  std::vector<double> nearS{0.4, 0.0};
  CHECK(bump.value(nearS) == doctest::Approx(1.0));
  std::vector<double> nearBoundary{1.38, 0.3};
  CHECK(bump.value(nearBoundary) == doctest::Approx(0.0));

  // Split-interior derivative matches differences too (bump is C^2).
  ShellSampler sampler(geom, 77, 1e-5);
  std::vector<double> pt;
  int done = 0;
  double worst = 0.0;
  for (int i = 0; i < 100 && done < 40; ++i) {
    if (!sampler.uShellPoint(pt)) continue;
    worst = std::max(worst, relDiff(in.evalDerivative(pt), fdDerivative(in, pt, 1e-5)));
    ++done;
  }
  CHECK(done >= 40);
  CHECK(worst <= 1e-6);
}

TEST_CASE("singular set evaluation raises") {
  PairGeometry geom = makeBasicGeometry(2, 1);
  FormField u = makeUType(geom);
  std::vector<double> origin{0.0, 0.0};
  CHECK_THROWS(u.eval(origin));
}
