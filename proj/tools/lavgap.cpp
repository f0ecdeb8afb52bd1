// Command-line front end: wires JSON configs to the verification library
// and emits reports (JSON on stdout, progress on stderr).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lavgap/exterior.hpp"
#include "lavgap/sampling.hpp"
#include "lavgap/verify.hpp"

using namespace lavgap;
using nlohmann::json;

namespace {

void emitError(const std::string& kind, const std::string& message) {
  json err;
  err["schema"] = "lavgap-error/1";
  err["kind"] = kind;
  err["message"] = message;
  std::cerr << err.dump(2) << "\n";
}

void writeOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text << "\n";
}

struct ModelFlags {
  std::string family = "double-phase";
  double p = 2.0, q = 2.6, alpha = 0.5;
  double beta = 0.0, kappa = 0.0;
  double pMinus = 1.5, pPlus = 4.0;
  std::optional<double> p0;
  int N = 3, k = 1;
  int setup = 0;
  std::optional<double> gamma;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", family, "double-phase | borderline | variable-exponent");
    cmd->add_option("--N", N, "ambient dimension");
    cmd->add_option("--k", k, "form index k (u has degree k-1)");
    cmd->add_option("--p", p, "double phase: lower exponent");
    cmd->add_option("--q", q, "double phase: upper exponent");
    cmd->add_option("--alpha", alpha, "weight exponent / log power");
    cmd->add_option("--beta", beta, "borderline: phi log power");
    cmd->add_option("--kappa", kappa, "modulus-of-continuity power");
    cmd->add_option("--p-minus", pMinus, "variable exponent: lower bound");
    cmd->add_option("--p-plus", pPlus, "variable exponent: upper bound");
    cmd->add_option("--p0", [this](const std::vector<std::string>& v) {
      p0 = std::stod(v.back());
      return true;
    }, "threshold parameter (default: p for double phase, N/k otherwise)");
    cmd->add_option("--setup", setup, "0 = auto, 1..5 forces a setup");
    cmd->add_option("--gamma", [this](const std::vector<std::string>& v) {
      gamma = std::stod(v.back());
      return true;
    }, "fractal tuning parameter override");
  }

  RunConfig toConfig() const {
    RunConfig cfg;
    cfg.family = family;
    cfg.p = p;
    cfg.q = q;
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.kappa = kappa;
    cfg.pMinus = pMinus;
    cfg.pPlus = pPlus;
    cfg.p0 = p0;
    cfg.N = N;
    cfg.k = k;
    cfg.setup = setup;
    cfg.gamma = gamma;
    return cfg;
  }
};

int runPlan(const ModelFlags& flags, const std::string& outPath) {
  RunConfig cfg = flags.toConfig();
  OrliczModel model = modelFromConfig(cfg);
  SetupPreference pref = cfg.setup >= 1 && cfg.setup <= 5
                             ? static_cast<SetupPreference>(cfg.setup)
                             : SetupPreference::Auto;
  SetupPlan plan = planSetup(cfg.thresholdP0(), cfg.N, cfg.k, pref);
  ModelCheck check = checkModelConditions(model, plan);
  if (check.admissible || cfg.gamma) resolveGamma(plan, check, cfg.gamma);
  writeOutput(outPath, planToJson(plan, check, model.warnings(), &cfg));
  return check.admissible ? 0 : 1;
}

int runVerify(const RunConfig& cfg, const std::string& outPath, const std::string& csvPath) {
  std::cerr << "[lavgap] building instance...\n";
  SeparationReport report = runFullVerification(cfg);
  writeOutput(outPath, reportToJson(report));
  if (!csvPath.empty()) {
    std::ostringstream csv;
    csv << "# lavgap-summary/1\ncondition,pass,value,error\n";
    for (const auto& c : report.conditions)
      csv << '"' << c.name << "\"," << (c.pass ? 1 : 0) << ',' << c.value << ','
          << c.error << "\n";
    csv << "\"boundary pairing A^du\"," << 1 << ',' << report.pairingADu << ','
        << report.pairingADuError << "\n";
    double worstStokes = 0.0;
    for (double v : report.stokesResiduals) worstStokes = std::max(worstStokes, v);
    csv << "\"stokes max residual\"," << (worstStokes <= cfg.tolStokes ? 1 : 0) << ','
        << worstStokes << ",0\n";
    csv << "\"gap witness F(t*)\"," << (report.gap.found ? 1 : 0) << ','
        << report.gap.fMin << ",0\n";
    writeOutput(csvPath, csv.str());
  }
  return report.overall ? 0 : 1;
}

int runTable(const RunConfig& cfg, const std::string& outPath) {
  PairInstance inst = buildInstance(cfg);
  SeparationReport report;
  report.config = cfg;
  report.plan = inst.plan;
  std::cerr << "[lavgap] integrating the nine separating functionals...\n";
  functionalTable(inst, report);
  json j;
  j["schema"] = "lavgap-table/1";
  j["config"] = json::parse(configToJson(cfg));
  j["functionalTable"] = report.functionalTable;
  j["expected"] = {{0.0, 1.0, -1.0}, {1.0, 1.0, 0.0}, {-1.0, 0.0, -1.0}};
  j["errorEstimate"] = report.tableError;
  writeOutput(outPath, j.dump(2));
  double worst = 0.0;
  const double expect[3][3] = {{0, 1, -1}, {1, 1, 0}, {-1, 0, -1}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      worst = std::max(worst, std::abs(report.functionalTable[r][c] - expect[r][c]));
  return worst <= cfg.tolTable ? 0 : 1;
}

int runGap(const RunConfig& cfg, const std::string& outPath) {
  PairInstance inst = buildInstance(cfg);
  std::cerr << "[lavgap] scanning F_{Phi,b}(t u-interior)...\n";
  GapScanResult gap = gapScan(inst);
  json j;
  j["schema"] = "lavgap-gap/1";
  j["config"] = json::parse(configToJson(cfg));
  j["found"] = gap.found;
  j["tStar"] = gap.tStar;
  j["fMin"] = gap.fMin;
  j["tGrid"] = gap.tGrid;
  j["fValues"] = gap.fValues;
  writeOutput(outPath, j.dump(2));
  return gap.found ? 0 : 1;
}

int runSweep(const ModelFlags& flags, const std::string& range, const std::string& outPath) {
  double lo = 0, hi = 0, step = 0;
  if (std::sscanf(range.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
    throw std::invalid_argument("--q-range expects lo:hi:step");
  ModelFlags at = flags;
  // Resolve gamma once, at the widest end of the sweep, and hold it fixed so
  // the verdict flip reflects the q-threshold alone.
  std::optional<double> gamma = flags.gamma;
  if (!gamma) {
    at.q = hi;
    RunConfig cfg = at.toConfig();
    OrliczModel model = modelFromConfig(cfg);
    SetupPlan plan = planSetup(cfg.thresholdP0(), cfg.N, cfg.k,
                               cfg.setup ? static_cast<SetupPreference>(cfg.setup)
                                         : SetupPreference::Auto);
    ModelCheck check = checkModelConditions(model, plan);
    resolveGamma(plan, check, std::nullopt);
    gamma = plan.gamma;
  }
  std::ostringstream csv;
  csv << "# lavgap-sweep/1 gamma=" << *gamma << "\n";
  csv << "q,admissible,gammaLo,gammaHi,I1,I1Verdict,I2,I2Verdict,I2FitExponent\n";
  for (double q = lo; q <= hi + 1e-12; q += step) {
    at.q = q;
    at.gamma = gamma;
    RunConfig cfg = at.toConfig();
    try {
      PairInstance inst = buildInstance(cfg);
      ReducedPair reduced = buildReducedIntegrals(inst.model, inst.plan, inst.geometry.cantor);
      QuadResult i1 = integrateReduced(reduced.I1);
      QuadResult i2 = integrateReduced(reduced.I2);
      csv << q << ',' << (inst.check.admissible ? 1 : 0) << ','
          << (inst.check.gamma.lo ? std::to_string(*inst.check.gamma.lo) : "") << ','
          << (inst.check.gamma.hi ? std::to_string(*inst.check.gamma.hi) : "") << ','
          << i1.value << ',' << toString(i1.verdict) << ',' << i2.value << ','
          << toString(i2.verdict) << ',' << i2.fittedExponent << "\n";
      std::cerr << "[lavgap] q=" << q << " I2 " << toString(i2.verdict) << "\n";
    } catch (const std::invalid_argument& e) {
      csv << q << ",0,,,,invalid,,invalid,\n";
      std::cerr << "[lavgap] q=" << q << " skipped: " << e.what() << "\n";
    }
  }
  writeOutput(outPath, csv.str());
  return 0;
}

int runAlgebraSelftest(int trials, std::uint64_t seed) {
  Rng rng(seed);
  auto randomElement = [&](int dim, int degree) {
    ExteriorElement e(dim, degree);
    for (std::uint32_t m = 0; m < (1u << dim); ++m) {
      if (std::popcount(m) != static_cast<unsigned>(degree)) continue;
      e.setCoefficient(MultiIndex(m), 2.0 * rng.uniform() - 1.0);
    }
    return e;
  };
  int failures = 0;
  auto line = [&](const char* name, bool pass, double worst) {
    std::printf("%-28s %s  (worst %.3g)\n", name, pass ? "PASS" : "FAIL", worst);
    if (!pass) ++failures;
  };

  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const int dim = 1 + static_cast<int>(rng.next() % 6);
    const int k = static_cast<int>(rng.next() % (dim + 1));
    auto f = randomElement(dim, k);
    const double sign = (k * (dim - k)) % 2 == 0 ? 1.0 : -1.0;
    worst = std::max(worst, (hodge(hodge(f)) - sign * f).norm());
  }
  line("double hodge (exact)", worst == 0.0, worst);

  worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const int dim = 2 + static_cast<int>(rng.next() % 5);
    const int k = static_cast<int>(rng.next() % (dim + 1));
    const int l = static_cast<int>(rng.next() % (k + 1));
    auto f = randomElement(dim, k);
    auto g = randomElement(dim, l);
    auto a = randomElement(dim, k - l);
    worst = std::max(worst, std::abs(inner(wedge(g, a), f) - inner(a, contract(g, f))));
  }
  line("wedge/contraction adjoint", worst <= 1e-12, worst);

  worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const int dim = 2 + static_cast<int>(rng.next() % 5);
    const int k = 1 + static_cast<int>(rng.next() % (dim - 1));
    auto w = randomElement(dim, 1);
    auto v = randomElement(dim, 1);
    auto f = randomElement(dim, k);
    auto lhs = contract(w, wedge(v, f)) + wedge(v, contract(w, f));
    worst = std::max(worst, (lhs - inner(w, v) * f).norm());
  }
  line("decomposition identity", worst <= 1e-12, worst);

  worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const int dim = 2 + static_cast<int>(rng.next() % 5);
    const int k = static_cast<int>(rng.next() % (dim + 1));
    const int l = static_cast<int>(rng.next() % (dim + 1 - k));
    auto f = randomElement(dim, k);
    auto g = randomElement(dim, l);
    const double sign = (k * l) % 2 == 0 ? 1.0 : -1.0;
    worst = std::max(worst, (wedge(f, g) - sign * wedge(g, f)).norm());
  }
  line("wedge antisymmetry", worst <= 1e-12, worst);

  worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const int dim = 1 + static_cast<int>(rng.next() % 6);
    const int k = static_cast<int>(rng.next() % (dim + 1));
    auto f = randomElement(dim, k);
    worst = std::max(worst, std::abs(hodge(f).norm() - f.norm()));
  }
  line("hodge isometry", worst <= 1e-12, worst);

  return failures == 0 ? 0 : 1;
}

int runCantor(const CantorSpec& spec, int depth, double fitLo, double fitHi,
              const std::string& csvPath, const std::string& outPath) {
  auto prod = CantorProduct::make(spec);
  const CantorSet& axis = prod->axis();

  json j;
  j["schema"] = "lavgap-cantor/1";
  j["dimension"] = prod->dimension();
  j["reindexOffset"] = axis.reindexOffset();
  j["maxDepth"] = axis.maxDepth();
  json lengths = json::array();
  for (int d = 0; d <= std::min(axis.maxDepth(), 16); ++d) lengths.push_back(axis.length(d));
  j["lengths"] = lengths;

  // Log-log slope of the neighbourhood volume and the fitted ball-mass
  // constant over the requested window.
  const int samples = 33;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double massC = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t =
        fitLo * std::pow(fitHi / fitLo, static_cast<double>(i) / (samples - 1));
    const double vol = neighborhoodVolume(*prod, t).numeric;
    const double lx = std::log(t);
    const double ly = std::log(vol);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    const double mu = supBallMass(*prod, t);
    const double ratio = mu / std::pow(t, prod->dimension());
    massC = std::max(massC, ratio);
  }
  const double n = samples;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  j["neighborhoodSlope"] = slope;
  j["expectedSlope"] = spec.power - prod->dimension();
  j["ballMassConstant"] = massC;

  if (!csvPath.empty()) {
    std::ostringstream csv;
    csv << "# lavgap-generations/1\ndepth,a,b\n";
    for (int d = 0; d <= std::min(depth, axis.maxDepth()); ++d) {
      for (const Interval& iv : axis.generation(d).intervals)
        csv << d << ',' << iv.a << ',' << iv.b << "\n";
    }
    writeOutput(csvPath, csv.str());
  }
  writeOutput(outPath, j.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separating pairs of differential forms over Cantor contact sets: "
               "construction and numerical certification"};
  app.require_subcommand(1);

  // plan
  auto* plan = app.add_subcommand("plan", "emit the setup plan and admissibility check");
  ModelFlags planFlags;
  planFlags.attach(plan);
  std::string planOut = "-";
  plan->add_option("-o,--output", planOut, "output path (- for stdout)");

  // verify / table / gap share a config file
  std::string configPath, outPath = "-", csvPath;
  auto addConfigOpts = [&](CLI::App* cmd) {
    cmd->add_option("--config", configPath, "run configuration JSON")->required();
    cmd->add_option("-o,--output", outPath, "output path (- for stdout)");
  };
  auto* verify = app.add_subcommand("verify", "full separating-pair certification");
  addConfigOpts(verify);
  verify->add_option("--csv", csvPath, "also write a summary CSV");
  auto* table = app.add_subcommand("table", "the nine separating-functional integrals");
  addConfigOpts(table);
  auto* gap = app.add_subcommand("gap", "scan F_{Phi,b}(t u-interior) for the gap witness");
  addConfigOpts(gap);
  auto* sample = app.add_subcommand("sample", "point-sample CSV (x, |u|, |du|, |A|, |dA|, rho)");
  addConfigOpts(sample);
  long long sampleCount = 20000;
  sample->add_option("--count", sampleCount, "sample count");
  auto* panels = app.add_subcommand("panels", "per-panel quadrature diagnostics CSV");
  addConfigOpts(panels);
  std::string panelField = "du";
  panels->add_option("--field", panelField, "du | dA: integrand |d(field)|");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "parameter sweep -> verdict CSV");
  ModelFlags sweepFlags;
  sweepFlags.attach(sweep);
  std::string qRange = "2.0:3.0:0.05";
  std::string sweepOut = "-";
  sweep->add_option("--q-range", qRange, "lo:hi:step for the double-phase q sweep");
  sweep->add_option("-o,--output", sweepOut, "output path");

  // algebra-selftest
  auto* selftest = app.add_subcommand("algebra-selftest", "exterior-algebra property suite");
  int trials = 1000;
  std::uint64_t seed = 2026;
  selftest->add_option("--trials", trials, "random cases per property");
  selftest->add_option("--seed", seed, "random seed");

  // cantor
  auto* cantor = app.add_subcommand("cantor", "Cantor set and measure diagnostics");
  double lambda = 0.25, cgamma = 0.0;
  bool meager = false;
  int power = 1, cdepth = 8;
  double fitLo = 1e-6, fitHi = 1e-2;
  std::string cantorCsv;
  std::string cantorOut = "-";
  cantor->add_option("--lambda", lambda, "generalized family ratio, in (0, 1/2)");
  cantor->add_option("--gamma", cgamma, "tuning exponent");
  cantor->add_flag("--meager", meager, "meager family l_j = exp(-2^{j/gamma})");
  cantor->add_option("--power", power, "Cartesian power");
  cantor->add_option("--depth", cdepth, "generation depth for the CSV export");
  cantor->add_option("--fit-lo", fitLo, "lower end of the t-window for slope fits");
  cantor->add_option("--fit-hi", fitHi, "upper end of the t-window for slope fits");
  cantor->add_option("--csv", cantorCsv, "write generation intervals (depth, a, b)");
  cantor->add_option("-o,--output", cantorOut, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) return runPlan(planFlags, planOut);
    if (*verify) return runVerify(configFromJsonFile(configPath), outPath, csvPath);
    if (*table) return runTable(configFromJsonFile(configPath), outPath);
    if (*gap) return runGap(configFromJsonFile(configPath), outPath);
    if (*sample) {
      PairInstance inst = buildInstance(configFromJsonFile(configPath));
      writeOutput(outPath, sampleCsv(inst, sampleCount));
      return 0;
    }
    if (*panels) {
      PairInstance inst = buildInstance(configFromJsonFile(configPath));
      const FormField& field = panelField == "dA" ? inst.A : inst.u;
      auto f = [&](std::span<const double> x) {
        if (field.derivativeSupport && !field.derivativeSupport(x)) return 0.0;
        return field.evalDerivative(x).norm();
      };
      writeOutput(outPath, panelDiagnosticsCsv(f, energyMesh(inst, 1.0)));
      return 0;
    }
    if (*sweep) return runSweep(sweepFlags, qRange, sweepOut);
    if (*selftest) return runAlgebraSelftest(trials, seed);
    if (*cantor) {
      CantorSpec spec = meager ? CantorSpec::meager(cgamma, power)
                               : CantorSpec::generalized(lambda, cgamma, power);
      return runCantor(spec, cdepth, fitLo, fitHi, cantorCsv, cantorOut);
    }
  } catch (const std::invalid_argument& e) {
    emitError("invalid-config", e.what());
    return 2;
  } catch (const std::exception& e) {
    emitError("runtime", e.what());
    return 2;
  }
  return 2;
}
