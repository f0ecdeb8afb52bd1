// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here and match the library defaults.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "lavgap/exterior.hpp"
#include "lavgap/sampling.hpp"
#include "lavgap/verify.hpp"
#include "oracle_sampling.hpp"

using namespace lavgap;

namespace {

struct Gate {
  int failed = 0;
  std::chrono::steady_clock::time_point t0;

  void start() { t0 = std::chrono::steady_clock::now(); }
  void line(int idx, const std::string& name, bool pass, const std::string& detail) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%2d/11] %-34s %s  (%.1fs)  %s\n", idx, name.c_str(),
                pass ? "PASS" : "FAIL", secs, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failed;
  }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

ExteriorElement randomElement(Rng& rng, int dim, int degree) {
  ExteriorElement e(dim, degree);
  for (std::uint32_t m = 0; m < (1u << dim); ++m) {
    if (std::popcount(m) != static_cast<unsigned>(degree)) continue;
    e.setCoefficient(MultiIndex(m), 2.0 * rng.uniform() - 1.0);
  }
  return e;
}

RunConfig referenceConfig() {
  RunConfig cfg;
  cfg.family = "double-phase";
  cfg.p = 1.8;
  cfg.q = 2.7;
  cfg.alpha = 0.5;
  cfg.p0 = 2.0;
  cfg.N = 2;
  cfg.k = 1;
  return cfg;
}

// The setup instances exercised by criteria 3 and 4. Pairing and
// disjointness are properties of the pair geometry; the attached model only
// needs to be constructible, so gamma comes in as an explicit override where
// the double-phase admissibility interval would not supply one.
struct NamedInstance {
  std::string name;
  double tolPairing;
  PairInstance inst;
};

std::vector<NamedInstance> pairingInstances() {
  std::vector<NamedInstance> out;
  auto add = [&](const std::string& name, double tol, RunConfig cfg) {
    cfg.faceTolerance = tol == 1e-3 ? 1e-5 : 1e-3;
    out.push_back({name, tol, buildInstance(cfg)});
  };

  RunConfig s1 = referenceConfig();
  add("setup1 N=2 k=1", 1e-3, s1);

  RunConfig s1a = referenceConfig();
  s1a.N = 3;
  s1a.k = 1;
  s1a.p0 = 3.0;
  s1a.q = 4.0;  // q > p0 + alpha/k
  add("setup1 N=3 k=1", 1e-3, s1a);

  RunConfig s1b = referenceConfig();
  s1b.N = 3;
  s1b.k = 2;
  s1b.p0 = 1.5;
  s1b.p = 1.3;
  s1b.q = 1.9;  // > p0 + alpha/k = 1.75
  add("setup1 N=3 k=2", 1e-3, s1b);

  RunConfig s2 = referenceConfig();
  s2.N = 3;
  s2.k = 2;
  s2.p = 2.0;
  s2.q = 6.0;
  s2.p0 = 4.0;
  s2.gamma = 0.5;
  s2.setup = 2;
  add("setup2 N=3 k=2", 1e-2, s2);

  RunConfig s3 = referenceConfig();
  s3.N = 3;
  s3.k = 1;
  s3.p = 2.0;
  s3.q = 2.6;
  s3.p0 = 2.0;
  s3.gamma = -2.0;
  s3.setup = 3;
  add("setup3 N=3 k=1", 1e-2, s3);

  RunConfig s4 = referenceConfig();
  s4.N = 3;
  s4.k = 1;
  s4.family = "variable-exponent";
  s4.pMinus = 1.5;
  s4.pPlus = 4.0;
  s4.p0 = 3.0;
  s4.kappa = 2.5;
  s4.gamma = 1.0;
  s4.setup = 4;
  add("setup4 N=3 k=1", 1e-2, s4);

  RunConfig s5 = referenceConfig();
  s5.N = 3;
  s5.k = 2;
  s5.family = "variable-exponent";
  s5.pMinus = 1.2;
  s5.pPlus = 3.0;
  s5.p0 = 1.5;
  s5.kappa = 3.5;  // > N/(2k^2) = 0.375 and the setup-5 gamma window is open
  s5.gamma = 1.0;
  s5.setup = 5;
  add("setup5 N=3 k=2", 1e-2, s5);

  return out;
}

}  // namespace

int main() {
  Gate gate;

  // 1. Exterior-algebra suite.
  gate.start();
  {
    Rng rng(2026);
    bool hodgeExact = true;
    double worstAdjoint = 0.0, worstDecomp = 0.0;
    for (int dim = 1; dim <= 6; ++dim) {
      for (int k = 0; k <= dim; ++k) {
        auto f = randomElement(rng, dim, k);
        const double sign = (k * (dim - k)) % 2 == 0 ? 1.0 : -1.0;
        if (!(hodge(hodge(f)) - sign * f).isZero(0.0)) hodgeExact = false;
      }
    }
    for (int i = 0; i < 1000; ++i) {
      const int dim = 2 + static_cast<int>(rng.next() % 5);
      const int k = static_cast<int>(rng.next() % (dim + 1));
      const int l = static_cast<int>(rng.next() % (k + 1));
      auto f = randomElement(rng, dim, k);
      auto g = randomElement(rng, dim, l);
      auto a = randomElement(rng, dim, k - l);
      worstAdjoint = std::max(
          worstAdjoint, std::abs(inner(wedge(g, a), f) - inner(a, contract(g, f))));
    }
    for (int i = 0; i < 1000; ++i) {
      const int dim = 2 + static_cast<int>(rng.next() % 5);
      const int k = 1 + static_cast<int>(rng.next() % (dim - 1));
      auto w = randomElement(rng, dim, 1);
      auto v = randomElement(rng, dim, 1);
      auto f = randomElement(rng, dim, k);
      auto lhs = contract(w, wedge(v, f)) + wedge(v, contract(w, f));
      worstDecomp = std::max(worstDecomp, (lhs - inner(w, v) * f).norm());
    }
    const bool pass = hodgeExact && worstAdjoint <= 1e-12 && worstDecomp <= 1e-12;
    gate.line(1, "exterior-algebra identities", pass,
              fmt("hodge exact=%d adjoint=%.2e decomp=%.2e", hodgeExact, worstAdjoint,
                  worstDecomp));
  }

  // 2. Derivative oracle across the setups.
  gate.start();
  {
    struct Geo {
      const char* name;
      int N;
      CantorSpec spec;
    };
    std::vector<Geo> geos = {
        {"N2 point", 2, CantorSpec::point(1)},
        {"N2 gen(setup2-like)", 2, CantorSpec::generalized(0.25, 0.5, 1)},
        {"N2 gen(setup3-like)", 2, CantorSpec::generalized(0.25, -2.0, 1)},
        {"N2 meager", 2, CantorSpec::meager(1.0, 1)},
        {"N3 point m1", 3, CantorSpec::point(1)},
        {"N3 point m2", 3, CantorSpec::point(2)},
        {"N3 gen m2 (setup3)", 3, CantorSpec::generalized(0.25, -2.0, 2)},
        {"N3 gen m2 (setup2)", 3, CantorSpec::generalized(std::exp2(-1.2), 0.5, 2)},
        {"N3 meager m1", 3, CantorSpec::meager(1.0, 1)},
    };
    double worst = 0.0;
    std::string worstName = "-";
    for (const auto& g : geos) {
      PairGeometry geom = makeGeometry(g.N, g.spec, 4);
      geom.adaptiveTree = false;  // oracle against the exact mu_depth sum
      FormField u = makeUType(geom);
      FormField A = makeAType(geom);
      const double wu = testing::derivativeOracleWorst(geom, u, true, 1000, 13);
      const double wa = testing::derivativeOracleWorst(geom, A, false, 1000, 29);
      if (std::max(wu, wa) > worst) {
        worst = std::max(wu, wa);
        worstName = g.name;
      }
    }
    gate.line(2, "derivative oracle (du, dA)", worst <= 1e-6,
              fmt("worst rel diff %.2e at %s over 1000 pts/form", worst, worstName.c_str()));
  }

  // 3 + 4. Boundary pairing and support disjointness per setup instance.
  gate.start();
  std::vector<NamedInstance> instances = pairingInstances();
  {
    bool pass = true;
    std::string detail;
    for (const auto& ni : instances) {
      PairingResult pr = boundaryPairing(ni.inst);
      const int sign =
          ((ni.inst.config.k * (ni.inst.config.N - ni.inst.config.k)) % 2 == 0) ? 1 : -1;
      const double errA = std::abs(pr.aDu.value - 1.0);
      const double errU = std::abs(pr.uDa.value - sign);
      if (errA > ni.tolPairing || errU > ni.tolPairing) {
        pass = false;
        detail += fmt("[%s A^du=%.4f u^dA=%.4f] ", ni.name.c_str(), pr.aDu.value,
                      pr.uDa.value);
      }
    }
    if (pass) detail = fmt("%zu instances within tolerance", instances.size());
    gate.line(3, "boundary pairing identities", pass, detail);
  }

  gate.start();
  {
    long long overlaps = 0;
    const long long samples = 1000000;
    for (const auto& ni : instances) {
      const int N = ni.inst.config.N;
      for (long long i = 0; i < samples; ++i) {
        auto x = jitteredBoxPoint(static_cast<std::uint64_t>(i), N, -1.0, 1.0,
                                  ni.inst.config.seed + 3, 1e-9);
        const bool inDu =
            !ni.inst.u.derivativeSupport || ni.inst.u.derivativeSupport(x);
        const bool inDa =
            !ni.inst.A.derivativeSupport || ni.inst.A.derivativeSupport(x);
        if (!inDu && !inDa) continue;
        const double nu = inDu ? ni.inst.u.evalDerivative(x).norm() : 0.0;
        const double na = inDa ? ni.inst.A.evalDerivative(x).norm() : 0.0;
        if (std::min(nu, na) != 0.0) ++overlaps;
      }
    }
    gate.line(4, "support disjointness 1e6 samples", overlaps == 0,
              fmt("%lld overlaps across %zu pairs", overlaps, instances.size()));
  }

  // 5. Functional table for the N=2 reference instance.
  gate.start();
  {
    RunConfig cfg = referenceConfig();
    PairInstance inst = buildInstance(cfg);
    SeparationReport report;
    report.config = cfg;
    functionalTable(inst, report);
    const double expect[3][3] = {{0, 1, -1}, {1, 1, 0}, {-1, 0, -1}};
    double worst = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        worst = std::max(worst, std::abs(report.functionalTable[r][c] - expect[r][c]));
    gate.line(5, "separating-functional table", worst <= cfg.tolTable,
              fmt("worst entry deviation %.2e (tol %.0e)", worst, cfg.tolTable));
  }

  // 6. Threshold sharpness for the double-phase sweep.
  gate.start();
  {
    double lastDivergent = 0.0, firstConvergent = 10.0;
    bool orderedFlip = true;
    // q must exceed p for the double-phase family; the grid starts one step
    // above p = 2.
    for (double q = 2.05; q <= 3.0 + 1e-9; q += 0.05) {
      RunConfig cfg;
      cfg.family = "double-phase";
      cfg.p = 2.0;
      cfg.q = q;
      cfg.alpha = 0.5;
      cfg.N = 3;
      cfg.k = 1;
      cfg.gamma = -2.0;
      PairInstance inst = buildInstance(cfg);
      ReducedPair red = buildReducedIntegrals(inst.model, inst.plan, inst.geometry.cantor);
      QuadResult i2 = integrateReduced(red.I2);
      if (i2.verdict == ConvergenceVerdict::Divergent) {
        lastDivergent = std::max(lastDivergent, q);
        if (firstConvergent < q) orderedFlip = false;
      } else if (i2.verdict == ConvergenceVerdict::Convergent) {
        firstConvergent = std::min(firstConvergent, q);
      }
    }
    const bool flipSharp = orderedFlip && lastDivergent >= 2.5 - 0.05 - 1e-9 &&
                           firstConvergent <= 2.5 + 0.05 + 1e-9 &&
                           lastDivergent < firstConvergent;

    RunConfig cfg;
    cfg.family = "double-phase";
    cfg.p = 2.0;
    cfg.q = 2.6;
    cfg.alpha = 0.5;
    cfg.N = 3;
    cfg.k = 1;
    cfg.gamma = -2.0;
    PairInstance inst = buildInstance(cfg);
    SeparationReport rep = verifySeparating(inst);
    gate.line(6, "threshold sharpness at q=2.5", flipSharp && rep.overall,
              fmt("flip bracket [%.2f, %.2f]; admissible side verify=%d", lastDivergent,
                  firstConvergent, rep.overall ? 1 : 0));
  }

  // 7. Borderline model flip.
  gate.start();
  {
    RunConfig cfg;
    cfg.family = "borderline";
    cfg.p0 = 2.0;
    cfg.kappa = 0.5;
    cfg.alpha = 2.0;
    cfg.beta = 1.0;
    cfg.N = 3;
    cfg.k = 1;
    PairInstance good = buildInstance(cfg);
    SeparationReport repGood = verifySeparating(good);

    ContinuityResult cont = continuityProbe(good, cfg.continuityBudget);
    const bool contOk = std::isfinite(cont.constant) && cont.constant > 0.0;

    RunConfig bad = cfg;
    bad.alpha = 1.4;  // alpha + beta = 2.4 < p0 + kappa
    bad.gamma = good.plan.gamma;
    PairInstance badInst = buildInstance(bad);
    ReducedPair red =
        buildReducedIntegrals(badInst.model, badInst.plan, badInst.geometry.cantor);
    QuadResult i2 = integrateReduced(red.I2);
    const bool flipped = i2.verdict == ConvergenceVerdict::Divergent;
    gate.line(7, "borderline model (log-scale flip)", repGood.overall && flipped && contOk,
              fmt("good side verify=%d, weight modulus C=%.3g; alpha+beta=2.4 I2 %s",
                  repGood.overall ? 1 : 0, cont.constant, toString(i2.verdict).c_str()));
  }

  // 8. Variable exponent at p0 = N/k with the log-log-modulus probe.
  gate.start();
  {
    RunConfig cfg;
    cfg.family = "variable-exponent";
    cfg.pMinus = 1.5;
    cfg.pPlus = 4.0;
    cfg.p0 = 3.0;  // = N/k
    cfg.kappa = 2.5;
    cfg.N = 3;
    cfg.k = 1;
    PairInstance inst = buildInstance(cfg);
    SeparationReport rep = verifySeparating(inst);
    ContinuityResult cont = continuityProbe(inst, 2 * cfg.continuityBudget);
    const bool stable =
        cont.constant > 0.0 && std::isfinite(cont.constant) &&
        std::abs(cont.constant - cont.coarseConstant) <= 0.10 * cont.constant;
    gate.line(8, "variable exponent (log-log modulus)", rep.overall && stable,
              fmt("verify=%d continuity C=%.3g (coarse %.3g)", rep.overall ? 1 : 0,
                  cont.constant, cont.coarseConstant));
  }

  // 9. Gap witness with Stokes-null evidence on the reference instance.
  gate.start();
  {
    RunConfig cfg = referenceConfig();
    PairInstance inst = buildInstance(cfg);
    GapScanResult gap = gapScan(inst);
    auto residuals = stokesNull(inst, 20);
    double worst = 0.0;
    for (double v : residuals) worst = std::max(worst, v);
    // Regression baseline (first computation, deterministic config):
    // t* ~ 4.35e-3, F(t*) ~ -1.89e-3.
    const bool baseline = gap.found && std::abs(gap.tStar - 4.348e-3) <= 0.3e-3 &&
                          std::abs(gap.fMin + 1.885e-3) <= 0.2e-3;
    gate.line(9, "gap witness + stokes residuals", gap.found && worst <= cfg.tolStokes && baseline,
              fmt("F(%.4g)=%.4g; max stokes residual %.2e", gap.tStar, gap.fMin, worst));
  }

  // 10. Assumption-1 witness on the seeded curve.
  gate.start();
  {
    RunConfig cfg = referenceConfig();
    PairInstance inst = buildInstance(cfg);
    AssumptionResult res = assumptionCheck(inst);
    gate.line(10, "assumption-1 witness", res.found && res.lhs < res.rhs,
              fmt("t=%.4g s=%.4g F(tu)+F*(sb)=%.4g < ts=%.4g", res.t, res.s, res.lhs,
                  res.rhs));
  }

  // 11. Cantor measure bounds.
  gate.start();
  {
    auto fitSlope = [](const CantorProduct& set) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const int n = 41;
      for (int i = 0; i < n; ++i) {
        const double t = std::pow(10.0, -6.0 + 4.0 * i / (n - 1));
        const double lx = std::log(t);
        const double ly = std::log(neighborhoodVolume(set, t).numeric);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
      }
      return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    auto prod = CantorProduct::make(CantorSpec::generalized(0.25, 0.0, 1));
    const double dim = prod->dimension();
    const double slope = fitSlope(*prod);
    auto prod2 = CantorProduct::make(CantorSpec::generalized(0.25, 0.0, 2));
    const double slope2 = fitSlope(*prod2);
    const bool slopeOk = std::abs(slope - (1.0 - dim)) <= 0.05 &&
                         std::abs(slope2 - (2.0 - prod2->dimension())) <= 0.05;

    // Fit C on [1e-4, 1e-2], then verify mu(B_t) <= C t^D over [1e-6, 1e-2].
    double fitC = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double t = std::pow(10.0, -4.0 + 2.0 * i / 20.0);
      fitC = std::max(fitC, supBallMass(*prod, t) / std::pow(t, dim));
    }
    bool boundOk = true;
    double worstRatio = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double t = std::pow(10.0, -6.0 + 4.0 * i / 40.0);
      const double ratio = supBallMass(*prod, t) / std::pow(t, dim);
      worstRatio = std::max(worstRatio, ratio);
      if (ratio > fitC * (1.0 + 1e-9)) boundOk = false;
    }
    gate.line(11, "cantor measure bounds", slopeOk && boundOk,
              fmt("slopes %.4f, %.4f (targets %.1f, %.1f); mass ratio sup %.3f <= fitted C %.3f",
                  slope, slope2, 1.0 - dim, 2.0 - prod2->dimension(), worstRatio, fitC));
  }

  std::printf("%s: %d/11 criteria passed\n", gate.failed == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              11 - gate.failed);
  return gate.failed == 0 ? 0 : 1;
}
