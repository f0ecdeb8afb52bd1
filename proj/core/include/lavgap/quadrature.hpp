#ifndef LAVGAP_QUADRATURE_HPP
#define LAVGAP_QUADRATURE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lavgap {

class CantorSet;
class FormField;

/// Gauss-Legendre nodes/weights on [-1, 1]; cached per order.
const std::vector<std::pair<double, double>>& gaussRule(int order);

/// Number of worker threads: LAVGAP_THREADS when set, else hardware count.
int workerThreads();

/// Deterministic sum: fixed-size chunks are reduced pairwise in index
/// order, then combined pairwise; the result does not depend on the number
/// of worker threads.
double deterministicSum(std::size_t count, const std::function<double(std::size_t)>& term,
                        int threads = 0);

/// Fixed work-chunk size used by the deterministic reductions.
std::size_t reductionChunkSize();

/// Runs `run(begin, end)` over fixed-size index chunks, possibly in
/// parallel; chunk boundaries do not depend on the thread count.
void parallelForChunks(std::size_t count,
                       const std::function<void(std::size_t, std::size_t)>& run,
                       int threads = 0);

/// Destructive in-place pairwise tree reduction.
double pairwiseSum(std::vector<double>& values);

enum class ConvergenceVerdict { Convergent, Divergent, Inconclusive, NotApplicable };

std::string toString(ConvergenceVerdict v);

struct QuadResult {
  double value = 0.0;
  double errorEstimate = 0.0;
  std::uint64_t nodes = 0;
  ConvergenceVerdict verdict = ConvergenceVerdict::NotApplicable;
  double fittedExponent = 0.0;     // e of t^{e-1}
  double fittedLogExponent = 0.0;  // r of (ln 1/t)^r
};

/// Integrand asymptotic to t^{e-1} (ln 1/t)^r near 0 with a pointwise
/// evaluator on (0, tMax]. Classification: convergent iff e > 0 or
/// (e = 0 and r < -1). The optional modelEval is the closed-form
/// counterpart of eval (same transform, analytic set factors); when
/// present the numeric fit is validated against the model's fit instead
/// of the bare (e, r) pair, which absorbs slow-log window drift.
struct PowerLogIntegrand {
  double e = 0.0;
  double r = 0.0;
  std::function<double(double)> eval;
  std::function<double(double)> modelEval;
  double tMax = 1.0;
  /// Dyadic levels per lacunarity period of the underlying set
  /// (round(ln(1/lambda)/ln 2) for generalized Cantor factors); increments
  /// are aggregated over one period before fitting so the bounded
  /// multiplicative oscillation of |C_t| cancels.
  int fitStride = 1;

  bool symbolicConvergent() const;
};

struct ReducedQuadConfig {
  double tMin = 1e-12;
  int dyadicLevels = 48;
  int gaussOrder = 8;
  /// Consistency bands between the measured fit and the model fit. The
  /// power band is tight (exponent bookkeeping is the classification-
  /// critical part); the log band absorbs the finite-generation corrections
  /// of the measured Cantor quantities (the index j and ln(1/l_j) differ by
  /// O(ln j / j) over the window) while still catching log-power mistakes
  /// of order one.
  double exponentTolerance = 0.05;
  double logTolerance = 0.75;
};

/// 1D improper integral over (tMin, tMax] with a log-substituted Gauss
/// panel per dyadic range. Verdict protocol: the dyadic-increment fit of
/// the evaluator must be consistent with the symbolic class (via the
/// model counterpart when provided); if consistent the exact symbolic
/// rule decides, otherwise the verdict is Inconclusive.
QuadResult integrateReduced(const PowerLogIntegrand& f,
                            const ReducedQuadConfig& cfg = {});

/// Sorted panel edges of one axis.
struct Partition1D {
  std::vector<double> edges;

  static Partition1D uniform(double lo, double hi, int panels);
  /// Symmetric dyadic grading toward 0 on [-a, a]: edges at +-a 2^{-j}.
  static Partition1D dyadicTowardZero(double a, int levels);
  /// Panels aligned with Cantor generation endpoints up to `depth`, covering
  /// [lo, hi] (outer region in `outerPanels` uniform panels each side).
  static Partition1D cantorGraded(const CantorSet& set, int depth, double lo,
                                  double hi, int outerPanels = 4);

  int panelCount() const { return static_cast<int>(edges.size()) - 1; }
};

struct BoxQuadConfig {
  std::vector<Partition1D> axes;
  int gaussOrder = 2;
  int gaussOrderHi = 4;     // error estimate companion rule
  double nodeJitter = 0.0;  // relative to panel width
  std::uint64_t seed = 1;
  int threads = 0;
};

using PointFunction = std::function<double(std::span<const double>)>;

/// Tensor-panel quadrature over the box given by the per-axis partitions.
/// Error estimate from the order pair; deterministic node order and
/// reduction.
QuadResult integrateBox(const PointFunction& f, const BoxQuadConfig& cfg);

/// Smooth integrands over the ball |x| < radius: nested per-axis Gauss with
/// the sine substitution per level (node layers concentrate at the curved
/// boundary); error from an order pair.
QuadResult integrateBallSmooth(const PointFunction& f, int dim, double radius,
                               int gaussOrder = 24);

/// Quadrature nodes of the box mesh, exposed so several functionals can be
/// evaluated over one deterministic node table.
struct NodeTable {
  int dim = 0;
  std::vector<double> coords;   // dim * count, node-major
  std::vector<double> weights;  // count
  std::size_t count() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

NodeTable buildNodeTable(const BoxQuadConfig& cfg);

/// Streaming node visitor: deterministic node indices, chunked in parallel
/// by panel; avoids materializing large tables.
void forEachBoxNode(const BoxQuadConfig& cfg,
                    const std::function<void(std::size_t, std::span<const double>, double)>& fn,
                    int threads = 0);
std::size_t boxNodeCount(const BoxQuadConfig& cfg);

/// Splits every panel of every axis in two (refinement doubling).
BoxQuadConfig refineConfig(const BoxQuadConfig& cfg);

/// Per-panel diagnostics (bounds, order-pair values, error) as CSV.
std::string panelDiagnosticsCsv(const PointFunction& f, const BoxQuadConfig& cfg);

/// Merges adjacent panel pairs (coarsening; two-level error estimates).
BoxQuadConfig coarsenConfig(const BoxQuadConfig& cfg);

struct FaceQuadConfig {
  double tolerance = 1e-5;   // absolute, per face
  int initialPanels = 8;     // per axis
  int maxPanels = 40000;     // refinement budget per face
  int gaussOrder = 3;
  int gaussOrderHi = 5;
  /// Initial-grid edges given per ambient axis (size N); face (j, +-)
  /// uses every axis except j. Empty: uniform initialPanels.
  std::vector<Partition1D> faceAxes;
  /// Faces to integrate as (axis, sign) with axis in [0, N); empty = all.
  /// Callers may restrict to the faces where the integrand provably lives.
  std::vector<std::pair<int, int>> faces;
};

/// Oriented face-sum integral of an (N-1)-form over the boundary of
/// [-a, a]^N with the cubic-chain sign convention
/// dQ = sum_j (-1)^{j-1} (I_j^+ - I_j^-). The form evaluator supplies the
/// full exterior element; the face pullback keeps the monomial missing
/// dx^j. Throws when adaptive refinement detects a divergent face panel.
QuadResult integrateFaces(const FormField& omega, double a,
                          const FaceQuadConfig& cfg = {});

/// Scalar facet integral helper (same machinery, one face): integrates
/// f over the rectangle spanned by `partitions` adaptively.
QuadResult integrateRectangleAdaptive(const PointFunction& f,
                                      std::span<const double> lo,
                                      std::span<const double> hi,
                                      const FaceQuadConfig& cfg);

/// Vector-valued adaptive rectangle integration: one panel queue driven by
/// the summed component errors, K values out. Used where several related
/// integrals share expensive field evaluations.
struct MultiQuadResult {
  std::vector<double> values;
  double errorEstimate = 0.0;
  std::uint64_t panels = 0;
};
MultiQuadResult integrateRectangleAdaptiveMulti(
    const std::function<void(std::span<const double>, double*)>& f, int K,
    std::span<const double> lo, std::span<const double> hi,
    const FaceQuadConfig& cfg);

}  // namespace lavgap

#endif
