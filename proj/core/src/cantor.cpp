#include "lavgap/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace lavgap {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Raw log-lengths; meager lengths underflow quickly, so everything before
// reindexing happens in log space.
double rawLogLength(const CantorSpec& spec, int j) {
  if (spec.family == CantorSpec::Family::Generalized) {
    if (j == 0) return 0.0;  // l_0 = 1 by convention
    return j * std::log(spec.lambda) + spec.gamma * std::log(static_cast<double>(j));
  }
  return -std::exp2(static_cast<double>(j) / spec.gamma);
}

double safeExp(double logValue) {
  if (logValue < -745.0) return 0.0;
  return std::exp(logValue);
}

}  // namespace

CantorSpec CantorSpec::generalized(double lambda, double gamma, int power, int maxDepth) {
  CantorSpec s;
  s.family = Family::Generalized;
  s.lambda = lambda;
  s.gamma = gamma;
  s.power = power;
  s.maxDepth = maxDepth;
  return s;
}

CantorSpec CantorSpec::meager(double gamma, int power, int maxDepth) {
  CantorSpec s;
  s.family = Family::Meager;
  s.gamma = gamma;
  s.power = power;
  s.maxDepth = maxDepth;
  return s;
}

CantorSpec CantorSpec::point(int power) {
  CantorSpec s;
  s.isPoint = true;
  s.power = power;
  s.maxDepth = 1;
  return s;
}

int CantorSpec::effectiveMaxDepth() const {
  if (maxDepth > 0) return maxDepth;
  if (isPoint) return 1;
  return family == Family::Generalized ? 24 : 8;
}

CantorSet::CantorSet(const CantorSpec& spec) : spec_(spec) {
  if (spec.power < 1) throw std::invalid_argument("CantorSpec: power must be >= 1");
  if (spec.isPoint) {
    maxDepth_ = 1;
    lengths_.assign(3, 0.0);
    return;
  }
  if (spec.family == CantorSpec::Family::Generalized) {
    if (!(spec.lambda > 0.0 && spec.lambda < 0.5))
      throw std::invalid_argument("CantorSpec: lambda must lie in (0, 1/2)");
  } else {
    if (!(spec.gamma > 0.0))
      throw std::invalid_argument("CantorSpec: meager family needs gamma > 0");
  }

  maxDepth_ = spec.effectiveMaxDepth();

  // Reindex: find the smallest j0 such that the shifted, renormalized
  // sequence satisfies l_{j-1} > 2 l_j and the removed-gap monotonicity
  // over the whole retained window.
  const int window = maxDepth_ + 1;
  int firstViolation = -1;
  for (int j0 = 0; j0 <= 4096; ++j0) {
    const double base = rawLogLength(spec_, j0);
    std::vector<double> logs(window + 1);
    for (int j = 0; j <= window; ++j) logs[j] = rawLogLength(spec_, j + j0) - base;

    bool ok = true;
    for (int j = 1; j <= window && ok; ++j) {
      if (!(logs[j - 1] - logs[j] > kLn2)) {
        ok = false;
        if (j0 == 0 && firstViolation < 0) firstViolation = j;
      }
    }
    if (ok) {
      std::vector<double> vals(window + 1);
      for (int j = 0; j <= window; ++j) vals[j] = safeExp(logs[j]);
      for (int j = 1; j < window && ok; ++j) {
        if (!(vals[j - 1] - 2 * vals[j] > vals[j] - 2 * vals[j + 1])) ok = false;
      }
      if (ok) {
        j0_ = j0;
        lengths_ = std::move(vals);
        // Meager tails can still underflow to exact zero inside the window;
        // shrink the usable depth to representable lengths.
        int usable = maxDepth_;
        while (usable > 1 && lengths_[usable] == 0.0) --usable;
        maxDepth_ = usable;
        return;
      }
    }
  }
  throw std::invalid_argument(
      "CantorSpec: no admissible reindexing; first length-ratio violation at j=" +
      std::to_string(firstViolation < 0 ? 1 : firstViolation));
}

double CantorSet::length(int j) const {
  if (j < 0 || j >= static_cast<int>(lengths_.size()))
    throw std::out_of_range("CantorSet::length: generation index out of range");
  return lengths_[j];
}

double CantorSet::dimension() const {
  if (spec_.isPoint || spec_.family == CantorSpec::Family::Meager) return 0.0;
  return kLn2 / std::log(1.0 / spec_.lambda);
}

IntervalGeneration CantorSet::generation(int depth) const {
  if (depth < 0 || depth > maxDepth_)
    throw std::out_of_range("CantorSet::generation: depth exceeds maxDepth");
  IntervalGeneration g;
  g.depth = depth;
  if (spec_.isPoint) {
    g.intervals.push_back({0.0, 0.0});
    return g;
  }
  g.intervals.push_back({-0.5, 0.5});
  for (int d = 0; d < depth; ++d) {
    const double child = lengths_[d + 1];
    std::vector<Interval> next;
    next.reserve(g.intervals.size() * 2);
    for (const Interval& iv : g.intervals) {
      next.push_back({iv.a, iv.a + child});
      next.push_back({iv.b - child, iv.b});
    }
    g.intervals = std::move(next);
  }
  return g;
}

namespace {

struct Descent {
  double value;
  double deriv;
  double crease;
  bool atCutoff;
};

Descent combineBranches(const Descent& chosen, double otherValue) {
  Descent out = chosen;
  const double kink = 0.5 * std::abs(otherValue - chosen.value);
  out.crease = std::min(out.crease, kink);
  return out;
}

Descent descend(const std::vector<double>& lengths, int maxDepth, double a,
                double b, int depth, double x) {
  if (x <= a) return {a - x, -1.0, a - x, false};
  if (x >= b) return {x - b, 1.0, x - b, false};
  if (depth == maxDepth) {
    const double left = x - a;
    const double right = b - x;
    const double v = std::min(left, right);
    return {v, left < right ? 1.0 : -1.0, v, true};
  }
  const double child = lengths[depth + 1];
  const double gl = a + child;
  const double gr = b - child;
  if (x < gl) {
    Descent inner = descend(lengths, maxDepth, a, gl, depth + 1, x);
    const double other = gr - x;
    if (other < inner.value)
      return combineBranches({other, -1.0, other, false}, inner.value);
    return combineBranches(inner, other);
  }
  if (x > gr) {
    Descent inner = descend(lengths, maxDepth, gr, b, depth + 1, x);
    const double other = x - gl;
    if (other < inner.value)
      return combineBranches({other, 1.0, other, false}, inner.value);
    return combineBranches(inner, other);
  }
  // In the removed gap: nearest points are the gap edges, both in the set.
  const double left = x - gl;
  const double right = gr - x;
  Descent out{std::min(left, right), left < right ? 1.0 : -1.0,
              std::min(left, right), false};
  out.crease = std::min(out.crease, 0.5 * std::abs(right - left));
  return out;
}

}  // namespace

DistanceResult CantorSet::distance(double x) const {
  if (!std::isfinite(x)) throw std::invalid_argument("CantorSet::distance: non-finite input");
  if (spec_.isPoint) {
    const double v = std::abs(x);
    return {v, 0.0, x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0), v};
  }
  Descent d = descend(lengths_, maxDepth_, -0.5, 0.5, 0, x);
  DistanceResult out;
  out.value = d.value;
  out.derivative = d.value == 0.0 ? 0.0 : d.deriv;
  out.creaseDistance = d.crease;
  // True distance lies in [0, value] when the descent bottomed out inside a
  // finest-generation interval.
  out.errorBound = d.atCutoff ? d.value : 0.0;
  return out;
}

std::vector<double> CantorSet::atoms(int depth) const {
  if (spec_.isPoint) return {0.0};
  IntervalGeneration g = generation(depth);
  std::vector<double> out;
  out.reserve(g.intervals.size());
  for (const Interval& iv : g.intervals) out.push_back(iv.mid());
  return out;
}

double CantorSet::neighborhoodLength(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("neighborhoodLength: t must be positive");
  if (spec_.isPoint) return 2.0 * t;
  // Inflating generation d by t is exact once l_d <= 2t.
  int d = 0;
  while (d < maxDepth_ && lengths_[d] > 2.0 * t) ++d;
  IntervalGeneration g = generation(d);
  double total = 0.0;
  double curA = g.intervals.front().a - t;
  double curB = g.intervals.front().b + t;
  for (std::size_t i = 1; i < g.intervals.size(); ++i) {
    const double a = g.intervals[i].a - t;
    const double b = g.intervals[i].b + t;
    if (a <= curB) {
      curB = std::max(curB, b);
    } else {
      total += curB - curA;
      curA = a;
      curB = b;
    }
  }
  total += curB - curA;
  return total;
}

CantorProduct::CantorProduct(std::shared_ptr<const CantorSet> axis, int power)
    : axis_(std::move(axis)), power_(power) {
  if (power_ < 1) throw std::invalid_argument("CantorProduct: power must be >= 1");
}

std::shared_ptr<const CantorProduct> CantorProduct::make(const CantorSpec& spec) {
  auto axis = std::make_shared<const CantorSet>(spec);
  return std::make_shared<const CantorProduct>(axis, spec.power);
}

double CantorProduct::dimension() const { return power_ * axis_->dimension(); }

DistanceResult CantorProduct::distance(std::span<const double> x) const {
  ProductDistance pd = distanceWithGradient(x);
  DistanceResult out;
  out.value = pd.value;
  out.errorBound = pd.errorBound;
  out.creaseDistance = pd.creaseDistance;
  out.derivative = 0.0;  // directional; see distanceWithGradient
  return out;
}

CantorProduct::ProductDistance CantorProduct::distanceWithGradient(
    std::span<const double> x) const {
  if (static_cast<int>(x.size()) != power_)
    throw std::invalid_argument("CantorProduct::distance: wrong point dimension");
  double sq = 0.0;
  double errSq = 0.0;
  double crease = std::numeric_limits<double>::infinity();
  ProductDistance out;
  out.gradient.assign(power_, 0.0);
  std::vector<double> signedDist(power_);
  for (int i = 0; i < power_; ++i) {
    DistanceResult axis = axis_->distance(x[i]);
    signedDist[i] = axis.value * axis.derivative;
    sq += axis.value * axis.value;
    errSq += axis.errorBound * axis.errorBound;
    crease = std::min(crease, axis.creaseDistance);
  }
  out.value = std::sqrt(sq);
  out.errorBound = std::sqrt(errSq);
  out.creaseDistance = crease;
  if (out.value > 0.0) {
    for (int i = 0; i < power_; ++i) out.gradient[i] = signedDist[i] / out.value;
    out.creaseDistance = std::min(out.creaseDistance, out.value);
  }
  return out;
}

std::uint64_t CantorProduct::atomCount(int depth) const {
  return std::uint64_t{1} << static_cast<unsigned>(depth * power_);
}

void CantorProduct::traverse(int atomDepth,
                             const std::function<bool(const Cell&)>& accept,
                             const std::function<void(const Cell&)>& consume) const {
  if (atomDepth < 0 || (!axis_->isPoint() && atomDepth > axis_->maxDepth()))
    throw std::out_of_range("CantorProduct::traverse: atomDepth out of range");

  struct Frame {
    int depth;
    std::vector<double> lows;  // per-axis interval left ends
  };

  if (axis_->isPoint()) {
    Cell c;
    c.depth = 0;
    c.mass = 1.0;
    c.halfWidth = 0.0;
    c.center.assign(power_, 0.0);
    consume(c);
    return;
  }

  std::vector<Frame> stack;
  stack.push_back({0, std::vector<double>(power_, -0.5)});
  Cell cell;
  cell.center.resize(power_);

  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const double len = axis_->length(f.depth);
    cell.depth = f.depth;
    cell.mass = std::pow(0.5, f.depth * power_);
    cell.halfWidth = 0.5 * len;
    for (int i = 0; i < power_; ++i) cell.center[i] = f.lows[i] + cell.halfWidth;

    if (f.depth == atomDepth || accept(cell)) {
      consume(cell);
      continue;
    }
    const double childLen = axis_->length(f.depth + 1);
    // 2^power children, lexicographic over axes, right-to-left bit order:
    // deterministic traversal order.
    const int branches = 1 << power_;
    for (int b = branches - 1; b >= 0; --b) {
      Frame child;
      child.depth = f.depth + 1;
      child.lows = f.lows;
      for (int i = 0; i < power_; ++i) {
        if (b & (1 << i)) child.lows[i] = f.lows[i] + len - childLen;
      }
      stack.push_back(std::move(child));
    }
  }
}

double CantorProduct::ballMass(std::span<const double> center, double radius,
                               int depth) const {
  if (static_cast<int>(center.size()) != power_)
    throw std::invalid_argument("CantorProduct::ballMass: wrong center dimension");
  if (radius <= 0.0) return 0.0;
  double mass = 0.0;
  const double r2 = radius * radius;
  auto bounds = [&](const Cell& c) {
    double nearSq = 0.0;
    double farSq = 0.0;
    for (int i = 0; i < power_; ++i) {
      const double d = std::abs(center[i] - c.center[i]);
      const double nearD = std::max(0.0, d - c.halfWidth);
      const double farD = d + c.halfWidth;
      nearSq += nearD * nearD;
      farSq += farD * farD;
    }
    return std::pair<double, double>(nearSq, farSq);
  };
  traverse(
      depth,
      [&](const Cell& c) {
        auto [nearSq, farSq] = bounds(c);
        return nearSq >= r2 || farSq < r2;  // fully outside or fully inside
      },
      [&](const Cell& c) {
        auto [nearSq, farSq] = bounds(c);
        if (farSq < r2) {
          mass += c.mass;
        } else if (nearSq < r2) {
          // Straddling cell at atom depth: membership by atom position.
          double distSq = 0.0;
          for (int i = 0; i < power_; ++i) {
            const double d = center[i] - c.center[i];
            distSq += d * d;
          }
          if (distSq < r2) mass += c.mass;
        }
      });
  return mass;
}

NeighborhoodVolume neighborhoodVolume(const CantorProduct& set, double t,
                                      double fittedConstant) {
  NeighborhoodVolume out;
  const int m = set.power();
  const double perAxis = set.axis().neighborhoodLength(t);
  if (m == 1) {
    out.numeric = perAxis;
    out.lowerBound = perAxis;
  } else {
    out.numeric = std::pow(perAxis, m);  // max-norm product (upper bound)
    out.lowerBound = std::pow(set.axis().neighborhoodLength(t / std::sqrt(double(m))), m);
  }
  const double dim = set.dimension();
  const double logT = std::log(1.0 / t);
  double factor;
  if (set.axis().isPoint()) {
    factor = std::pow(t, m);
  } else if (set.axis().spec().family == CantorSpec::Family::Generalized) {
    factor = std::pow(t, m - dim) * std::pow(logT, set.axis().spec().gamma * dim);
  } else {
    factor = std::pow(t, m) * std::pow(logT, set.axis().spec().gamma * m);
  }
  out.analyticBound = (fittedConstant > 0 ? fittedConstant : 1.0) * factor;
  return out;
}

}  // namespace lavgap
