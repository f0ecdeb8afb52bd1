#ifndef LAVGAP_VERIFY_HPP
#define LAVGAP_VERIFY_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lavgap/cantor.hpp"
#include "lavgap/forms.hpp"
#include "lavgap/orlicz.hpp"
#include "lavgap/quadrature.hpp"
#include "lavgap/setup.hpp"

namespace lavgap {

/// Resolved run parameters; every report echoes the full struct.
struct RunConfig {
  // Model.
  std::string family = "double-phase";
  double p = 2.0, q = 2.6, alpha = 0.5;      // double phase
  double beta = 0.0, kappa = 0.0;            // borderline / variable exponent
  double pMinus = 1.5, pPlus = 4.0;          // variable exponent
  std::optional<double> p0;                  // threshold; family default otherwise

  int N = 2;
  int k = 1;
  int setup = 0;  // 0 = auto
  std::optional<double> gamma;

  // Numerics.
  int cantorDepth = 8;       // convolution atom depth
  int cantorMaxDepth = 0;    // 0 = family default
  int meshCantorDepth = 6;   // x-bar mesh grading depth
  int radialLevels = 40;     // x-hat dyadic mesh levels
  int gaussOrder = 2;
  int gaussOrderHi = 3;
  double openTol = 0.05;     // tree opening ratio (error ~ ratio^2)
  double faceTolerance = 1e-4;
  int faceMaxPanels = 60000;
  double tolPairing = 1e-3;
  double tolTable = 1e-2;
  double tolStokes = 1e-3;
  std::uint64_t seed = 2026;
  int threads = 0;
  long long disjointSamples = 1000000;
  int stokesForms = 20;
  long long continuityBudget = 100000;
  int gapGridSize = 48;
  double gapTMin = 1e-3, gapTMax = 1.0;
  int assumptionGridSize = 60;
  double nodeJitter = 1e-9;

  double thresholdP0() const;  // family default when p0 unset
};

OrliczModel modelFromConfig(const RunConfig& cfg);

/// A fully wired (u, A, rho~) instance on its geometry, with the
/// localization split.
struct PairInstance {
  RunConfig config;
  OrliczModel model;
  SetupPlan plan;
  ModelCheck check;
  PairGeometry geometry;
  FormField u, A;
  ScalarField rhoTilde;
  RadialBump bump;
  FormField uInterior, uBoundary, AInterior, ABoundary;
  double domainRadius = 0.0;  // sqrt(N)
};

PairInstance buildInstance(const RunConfig& cfg);

/// Work-tool reduced integrals I1/I2 for the instance's model and setup:
/// symbolic power-log class plus honest numeric evaluators driven by the
/// measured Cantor quantities.
struct ReducedPair {
  PowerLogIntegrand I1;
  PowerLogIntegrand I2;
};
ReducedPair buildReducedIntegrals(const OrliczModel& model, const SetupPlan& plan,
                                  std::shared_ptr<const CantorProduct> cantor);

/// Largest depth-resolved pre-Cantor measure of a radius-t ball, maximized
/// over candidate centers on the set.
double supBallMass(const CantorProduct& set, double t);

struct ConditionResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double error = 0.0;
  std::string detail;
};

struct GapScanResult {
  bool found = false;
  double tStar = 0.0;
  double fMin = 0.0;
  std::vector<double> tGrid;
  std::vector<double> fValues;
};

struct AssumptionResult {
  bool found = false;
  double s = 0.0, t = 0.0;
  double lhs = 0.0, rhs = 0.0;
};

struct ContinuityResult {
  double constant = 0.0;
  double coarseConstant = 0.0;  // at half the budget, for stability checks
  std::string modulus;
};

struct SeparationReport {
  std::string schema = "lavgap-report/1";
  RunConfig config;
  SetupPlan plan;
  ModelCheck modelCheck;
  std::vector<std::string> modelWarnings;

  std::vector<ConditionResult> conditions;  // (i)..(v)
  double pairingADu = 0.0, pairingADuError = 0.0;
  double pairingUDA = 0.0, pairingUDAError = 0.0;

  std::array<std::array<double, 3>, 3> functionalTable{};  // rows S, S^d, S^o
  double tableError = 0.0;

  std::vector<double> stokesResiduals;
  GapScanResult gap;
  AssumptionResult assumption;
  ContinuityResult continuity;

  double energyPhi = 0.0, energyPhiStar = 0.0;
  double reducedI1 = 0.0, reducedI2 = 0.0;
  std::string i1Verdict, i2Verdict;
  double i1FitExponent = 0.0, i1FitLog = 0.0;
  double i2FitExponent = 0.0, i2FitLog = 0.0;

  std::vector<std::string> notes;
  bool overall = false;
};

/// Conditions (i)-(v) of the separating-pair definition, evaluated
/// numerically; fills the condition block of the report.
SeparationReport verifySeparating(const PairInstance& inst);

/// The cubic-chain boundary integrals (int A ^ du, int u ^ dA) over
/// d[-1,1]^N, restricted to the face blocks where each integrand lives.
struct PairingResult {
  QuadResult aDu;  // target 1
  QuadResult uDa;  // target (-1)^{k(N-k)}
};
PairingResult boundaryPairing(const PairInstance& inst);

/// The nine S-functional integrals (rows S, S-boundary, S-interior applied
/// to u, u-boundary, u-interior).
void functionalTable(const PairInstance& inst, SeparationReport& report);

/// |int dA-interior ^ dw| for seeded smooth compactly supported test forms.
std::vector<double> stokesNull(const PairInstance& inst, int formCount);

/// F_{Phi,b}(t u-interior) over the t-grid; the gap witness is the grid
/// minimizer when a negative value exists.
GapScanResult gapScan(const PairInstance& inst);

/// Searches F(tu) + F*(s dA) < t s on the seeded curve s = t^{p/q'}.
AssumptionResult assumptionCheck(const PairInstance& inst);

/// sup |f(x)-f(y)| / omega(|x-y|) over sampled pairs with log-uniform
/// distances.
ContinuityResult continuityProbe(const PairInstance& inst, long long budget);

/// Full pipeline: conditions, table, stokes, gap, assumption, continuity.
SeparationReport runFullVerification(const RunConfig& cfg);

/// JSON serialization (schema lavgap-report/1); deterministic for a fixed
/// config + seed.
std::string reportToJson(const SeparationReport& report);
std::string planToJson(const SetupPlan& plan, const ModelCheck& check,
                       const std::vector<std::string>& warnings,
                       const RunConfig* configEcho = nullptr);
RunConfig configFromJsonFile(const std::string& path);
RunConfig configFromJsonText(const std::string& text);
std::string configToJson(const RunConfig& cfg);

/// Plot-ready CSV of point samples (x, |u|, |du|, |A|, |dA|, rho).
std::string sampleCsv(const PairInstance& inst, long long samples);

/// The graded tensor mesh used for the energy-type integrals (Cantor-graded
/// x-bar axes, dyadic x-hat axes, bump-scale breakpoints when the box covers
/// the localization annulus). Exposed for panel diagnostics.
BoxQuadConfig energyMesh(const PairInstance& inst, double halfWidth);

}  // namespace lavgap

#endif
