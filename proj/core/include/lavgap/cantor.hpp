#ifndef LAVGAP_CANTOR_HPP
#define LAVGAP_CANTOR_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lavgap {

/// Parameters of a one-dimensional Cantor set and its Cartesian powers.
/// generalized: l_j = lambda^j * j^gamma (l_0 = 1), lambda in (0,1/2).
/// meager:      l_j = exp(-2^{j/gamma}), gamma > 0.
/// The raw sequence is reindexed (l~_j = l_{j+j0}/l_{j0}) so that l~_0 = 1,
/// l~_{j-1} > 2 l~_j, and the removed gaps shrink monotonically.
struct CantorSpec {
  enum class Family { Generalized, Meager };

  Family family = Family::Generalized;
  double lambda = 0.25;  // generalized only
  double gamma = 0.0;
  int power = 1;        // Cartesian power (number of axes)
  int maxDepth = 0;     // 0 = family default (24 generalized, 8 meager)

  static CantorSpec generalized(double lambda, double gamma, int power = 1,
                                int maxDepth = 0);
  static CantorSpec meager(double gamma, int power = 1, int maxDepth = 0);

  /// Point set {0}: the degenerate "Cantor set" of the one saddle point
  /// construction. Implemented as the zero-width limit object.
  static CantorSpec point(int power = 1);

  bool isPoint = false;
  int effectiveMaxDepth() const;
};

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const { return b - a; }
  double mid() const { return 0.5 * (a + b); }
};

struct IntervalGeneration {
  int depth = 0;
  std::vector<Interval> intervals;  // sorted, pairwise disjoint
};

struct DistanceResult {
  double value = 0.0;       // distance (exact up to errorBound)
  double errorBound = 0.0;  // <= l_depth at descent cutoff, 0 when exact
  double derivative = 0.0;  // d/dx distance, +-1 a.e. (0 on the set)
  double creaseDistance = 0.0;  // distance to the nearest non-smooth locus
};

/// One-dimensional Cantor set on [-1/2, 1/2] with reindexed lengths,
/// interval generations, exact distance queries and pre-Cantor measures.
/// Immutable after construction; queries are pure.
class CantorSet {
public:
  explicit CantorSet(const CantorSpec& spec);

  const CantorSpec& spec() const { return spec_; }
  int maxDepth() const { return maxDepth_; }
  int reindexOffset() const { return j0_; }

  /// Reindexed length l~_j, j in [0, maxDepth+1].
  double length(int j) const;

  /// Hausdorff-dimension parameter of the 1D factor:
  /// ln 2 / ln(1/lambda) for generalized sets, 0 for meager and point sets.
  double dimension() const;

  IntervalGeneration generation(int depth) const;

  /// Exact Euclidean distance to the set by recursive descent; the error
  /// bound is nonzero only when the descent is cut off at maxDepth inside
  /// an interval of length l_maxDepth.
  DistanceResult distance(double x) const;

  /// Midpoint atoms of the depth-m pre-Cantor measure, weight 2^{-m} each.
  std::vector<double> atoms(int depth) const;

  /// Lebesgue measure of the t-neighbourhood {dist(x, C) < t}, computed by
  /// inflating a generation fine enough that the result is exact to
  /// relative 1e-6 (or to the maxDepth cutoff, whichever is coarser).
  double neighborhoodLength(double t) const;

  bool isPoint() const { return spec_.isPoint; }

private:
  CantorSpec spec_;
  int j0_ = 0;
  int maxDepth_ = 0;
  std::vector<double> lengths_;  // reindexed, indices 0..maxDepth+1
};

/// Cartesian power of a CantorSet with its product pre-Cantor measure.
/// Distances use the per-axis exact distance (exact for products of a
/// closed set). The measure is addressed through the dyadic product-cell
/// tree so far-field queries need not enumerate atoms.
class CantorProduct {
public:
  CantorProduct(std::shared_ptr<const CantorSet> axis, int power);

  static std::shared_ptr<const CantorProduct> make(const CantorSpec& spec);

  int power() const { return power_; }
  const CantorSet& axis() const { return *axis_; }

  /// Formal dimension D of the power set: power * dim_1D for generalized,
  /// 0 for meager / point.
  double dimension() const;

  DistanceResult distance(std::span<const double> x) const;

  /// Distance plus its a.e. gradient (per-axis signed derivatives composed
  /// through the Euclidean product formula).
  struct ProductDistance {
    double value = 0.0;
    double errorBound = 0.0;
    double creaseDistance = 0.0;
    std::vector<double> gradient;
  };
  ProductDistance distanceWithGradient(std::span<const double> x) const;

  /// Mass of the depth-`depth` product measure inside the Euclidean ball.
  double ballMass(std::span<const double> center, double radius, int depth) const;

  /// A cell of the product tree: the Cartesian product of per-axis
  /// generation intervals at a common depth, carrying mass 2^{-depth*power}.
  struct Cell {
    int depth = 0;
    double mass = 0.0;
    double halfWidth = 0.0;            // per-axis half length l_depth / 2
    std::vector<double> center;        // midpoints per axis
  };

  /// Hierarchical traversal of the product measure. `accept(cell)` returning
  /// true consumes the cell as a single point mass at its center; otherwise
  /// the cell splits until `depth == atomDepth`, at which point it is always
  /// consumed. `consume` receives every consumed cell. Deterministic order.
  void traverse(int atomDepth, const std::function<bool(const Cell&)>& accept,
                const std::function<void(const Cell&)>& consume) const;

  /// Largest per-axis interval count at `depth` (2^depth), for diagnostics.
  std::uint64_t atomCount(int depth) const;

private:
  std::shared_ptr<const CantorSet> axis_;
  int power_ = 1;
};

/// Measure of the Euclidean t-neighbourhood of the power set together with
/// the max-norm product bracket used for power >= 2 (Euclidean value lies
/// between product(t/sqrt(m)) and product(t)).
struct NeighborhoodVolume {
  double numeric = 0.0;        // exact for power 1; max-norm product else
  double lowerBound = 0.0;     // Euclidean lower bound
  double analyticBound = 0.0;  // fitted C * t^{power-D} * (ln 1/t)^{gamma D}
};

NeighborhoodVolume neighborhoodVolume(const CantorProduct& set, double t,
                                      double fittedConstant = 0.0);

}  // namespace lavgap

#endif
