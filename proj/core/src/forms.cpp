#include "lavgap/forms.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lavgap {

namespace {

double quinticSmoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double quinticSmoothstepPrime(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double u = s * (1.0 - s);
  return 30.0 * u * u;
}

double blockNorm(std::span<const double> x, int from, int to) {
  double sq = 0.0;
  for (int i = from; i < to; ++i) sq += x[i] * x[i];
  return std::sqrt(sq);
}

/// Cutoff argument num/den with the conventions 0/0 -> throws are handled
/// by callers; den = 0 with num > 0 means the plateau value 1 region.
double cutArg(double num, double den) {
  if (den == 0.0) return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return num / den;
}

/// acc[mask] accumulation of factor * (*dGamma_l)(z) on the coordinate
/// block [offset, offset+l) (0-based).
void addKernelIntoAcc(double* acc, int offset, int l, std::span<const double> z,
                      double factor) {
  if (l == 1) {
    const double s = z[0] > 0 ? 0.5 : (z[0] < 0 ? -0.5 : 0.0);
    acc[0] += factor * s;
    return;
  }
  double r = 0.0;
  for (int i = 0; i < l; ++i) r += z[i] * z[i];
  r = std::sqrt(r);
  if (r == 0.0) throw std::domain_error("starDGamma kernel evaluated at its pole");
  const double base = factor / (surfaceArea(l) * std::pow(r, l));
  const std::uint32_t full = ((1u << l) - 1u) << offset;
  for (int i = 0; i < l; ++i) {
    const std::uint32_t mask = full ^ (1u << (offset + i));
    acc[mask] += ((i % 2 == 0) ? base : -base) * z[i];
  }
}

/// acc += factor * (G ^ K_l(z)) for a 1-form G given by dense components.
void addOneFormWedgeKernel(double* acc, int dim, std::span<const double> g,
                           int offset, int l, std::span<const double> z,
                           double factor) {
  if (l == 1) {
    const double s = z[0] > 0 ? 0.5 : (z[0] < 0 ? -0.5 : 0.0);
    if (s == 0.0) return;
    for (int i = 0; i < dim; ++i) {
      if (g[i] != 0.0) acc[1u << i] += factor * s * g[i];
    }
    return;
  }
  double r = 0.0;
  for (int i = 0; i < l; ++i) r += z[i] * z[i];
  r = std::sqrt(r);
  if (r == 0.0) throw std::domain_error("starDGamma kernel evaluated at its pole");
  const double base = factor / (surfaceArea(l) * std::pow(r, l));
  const std::uint32_t full = ((1u << l) - 1u) << offset;
  for (int t = 0; t < l; ++t) {
    const std::uint32_t maskK = full ^ (1u << (offset + t));
    const double ck = ((t % 2 == 0) ? base : -base) * z[t];
    if (ck == 0.0) continue;
    for (int i = 0; i < dim; ++i) {
      const std::uint32_t bit = 1u << i;
      if ((maskK & bit) || g[i] == 0.0) continue;
      const int below = std::popcount(maskK & (bit - 1u));
      const double sgn = (below % 2 == 0) ? 1.0 : -1.0;
      acc[maskK | bit] += sgn * g[i] * ck;
    }
  }
}

ExteriorElement harvest(const double* acc, int dim, int degree) {
  std::vector<std::pair<std::uint32_t, double>> terms;
  const std::uint32_t total = 1u << dim;
  for (std::uint32_t m = 0; m < total; ++m) {
    if (acc[m] != 0.0) terms.emplace_back(m, acc[m]);
  }
  return ExteriorElement::fromTerms(dim, degree, std::move(terms));
}

}  // namespace

double thetaCutoff(double t) { return quinticSmoothstep(4.0 * (t - 0.25)); }

double thetaCutoffPrime(double t) { return 4.0 * quinticSmoothstepPrime(4.0 * (t - 0.25)); }

double etaCutoff(double t) {
  if (t <= 0.25) return t;
  if (t >= 0.75) return 0.5;
  const double d = 0.75 - t;
  return 0.5 - d * d;
}

double etaCutoffPrime(double t) {
  if (t <= 0.25) return 1.0;
  if (t >= 0.75) return 0.0;
  return 2.0 * (0.75 - t);
}

double surfaceArea(int l) {
  if (l < 1) throw std::invalid_argument("surfaceArea: l must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * l) / std::tgamma(0.5 * l);
}

double gammaValue(int l, double r) {
  if (!(r > 0.0)) throw std::domain_error("gammaValue: needs r > 0");
  if (l == 1) return 0.5 * r;
  if (l == 2) return -std::log(1.0 / r) / (2.0 * std::numbers::pi);
  return -std::pow(r, 2.0 - l) / ((l - 2.0) * surfaceArea(l));
}

ExteriorElement starDGamma(int dim, int offset, int l, std::span<const double> z) {
  if (static_cast<int>(z.size()) != l) throw std::invalid_argument("starDGamma: block size mismatch");
  double acc[1u << 6] = {};
  if (dim > 6) throw std::invalid_argument("starDGamma: dim > 6 unsupported");
  addKernelIntoAcc(acc, offset, l, z, 1.0);
  return harvest(acc, dim, l - 1);
}

double SingularSetDesc::distance(std::span<const double> x) const {
  if (!cantor) return std::numeric_limits<double>::infinity();
  double sq = 0.0;
  const double d = cantor->distance(x.subspan(0, barDim)).value;
  sq = d * d;
  for (int i = barDim; i < dim; ++i) sq += x[i] * x[i];
  return std::sqrt(sq);
}

int PairGeometry::depthFor(double rHat) const {
  const CantorSet& axis = cantor->axis();
  if (axis.isPoint() || !adaptiveTree) return atomDepth;
  int d = atomDepth;
  while (d < axis.maxDepth() && axis.length(d) > convEps * rHat) ++d;
  return d;
}

PairGeometry makeGeometry(int N, const CantorSpec& spec, int atomDepth) {
  PairGeometry g;
  g.N = N;
  g.barDim = spec.power;
  if (g.barDim < 1 || g.barDim > N - 1)
    throw std::invalid_argument("makeGeometry: Cantor power must lie in [1, N-1]");
  g.cantor = CantorProduct::make(spec);
  g.distConst = spec.isPoint ? 1.0 : 4.0;
  g.atomDepth = spec.isPoint ? 0 : std::min(atomDepth, g.cantor->axis().maxDepth());
  return g;
}

PairGeometry makeBasicGeometry(int N, int barDim) {
  return makeGeometry(N, CantorSpec::point(barDim));
}

FormField makeUType(const PairGeometry& geom) {
  const int N = geom.N;
  const int m = geom.barDim;
  const int n = geom.hatDim();
  const double rootN = std::sqrt(static_cast<double>(N));
  const double C = geom.distConst;
  auto cantor = geom.cantor;

  FormField f;
  f.dim = N;
  f.degree = n - 1;
  f.name = "u(" + std::to_string(m) + "," + std::to_string(n) + ")";
  f.singular = SingularSetDesc{N, m, cantor};

  f.eval = [=](std::span<const double> x) -> ExteriorElement {
    const double rHat = blockNorm(x, m, N);
    const double d = cantor->distance(x.subspan(0, m)).value;
    if (rHat == 0.0) {
      if (d == 0.0) throw std::domain_error("u evaluated on the singular set");
      return ExteriorElement(N, n - 1);
    }
    const double arg = cutArg(rootN * C * rHat, etaCutoff(d));
    const double tv = thetaCutoff(arg);
    if (tv == 0.0) return ExteriorElement(N, n - 1);
    return tv * starDGamma(N, m, n, x.subspan(m, n));
  };

  f.evalDerivative = [=](std::span<const double> x) -> ExteriorElement {
    const double rHat = blockNorm(x, m, N);
    auto pd = cantor->distanceWithGradient(x.subspan(0, m));
    if (rHat == 0.0 && pd.value == 0.0)
      throw std::domain_error("du evaluated on the singular set");
    const double den = etaCutoff(pd.value);
    const double arg = cutArg(rootN * C * rHat, den);
    const double tp = thetaCutoffPrime(arg);
    if (tp == 0.0) return ExteriorElement(N, n);
    // d(arg): hat block rN*C*x_i/(rHat*den); bar block -rN*C*rHat*eta'(d)*grad_i/den^2
    std::vector<double> g(N, 0.0);
    const double etaP = etaCutoffPrime(pd.value);
    for (int i = 0; i < m; ++i)
      g[i] = -rootN * C * rHat * etaP * pd.gradient[i] / (den * den);
    for (int i = m; i < N; ++i) g[i] = rootN * C * x[i] / (rHat * den);
    double acc[1u << 6] = {};
    addOneFormWedgeKernel(acc, N, g, m, n, x.subspan(m, n), tp);
    return harvest(acc, N, n);
  };

  f.derivativeSupport = [=](std::span<const double> x) -> bool {
    const double rHat = blockNorm(x, m, N);
    const double d = cantor->distance(x.subspan(0, m)).value;
    const double den = etaCutoff(d);
    const double arg = cutArg(rootN * C * rHat, den);
    return arg > 0.25 && arg < 0.5;
  };
  return f;
}

FormField makeAType(const PairGeometry& geom) {
  const int N = geom.N;
  const int m = geom.barDim;
  const int n = geom.hatDim();
  const double rootN = std::sqrt(static_cast<double>(N));
  auto cantor = geom.cantor;
  const PairGeometry g = geom;
  const double openTol = geom.openTol;
  const bool adaptive = geom.adaptiveTree;
  const double diagScale = std::sqrt(static_cast<double>(m));

  FormField f;
  f.dim = N;
  f.degree = m - 1;
  f.name = "A(" + std::to_string(m) + "," + std::to_string(n) + ")";
  f.singular = SingularSetDesc{N, m, cantor};

  f.eval = [=](std::span<const double> x) -> ExteriorElement {
    const auto xbar = x.subspan(0, m);
    const double rHat = blockNorm(x, m, N);
    const double etaR = etaCutoff(rHat);
    const double zeroBand = etaR / (4.0 * rootN);  // also the transition width
    double acc[1u << 6] = {};
    std::vector<double> z(m);
    cantor->traverse(
        g.depthFor(rHat),
        [&](const CantorProduct::Cell& c) {
          if (!adaptive) return false;
          double distSq = 0.0;
          for (int i = 0; i < m; ++i) {
            const double d = xbar[i] - c.center[i];
            distSq += d * d;
          }
          const double dist = std::sqrt(distSq);
          const double halfDiag = c.halfWidth * diagScale;
          if (dist + halfDiag <= zeroBand) return true;  // theta == 0 cell
          if (halfDiag > openTol * std::max(0.0, dist - halfDiag)) return false;
          // Inside the theta transition the curvature scale is the window
          // width, not the distance.
          const bool pastWindow = dist - halfDiag > 2.0 * zeroBand;
          return pastWindow || halfDiag <= openTol * zeroBand;
        },
        [&](const CantorProduct::Cell& c) {
          double rBar = 0.0;
          for (int i = 0; i < m; ++i) {
            z[i] = xbar[i] - c.center[i];
            rBar += z[i] * z[i];
          }
          rBar = std::sqrt(rBar);
          if (rBar == 0.0) {
            if (etaR == 0.0) throw std::domain_error("A evaluated on the singular set");
            return;  // theta(0) = 0
          }
          const double tv = thetaCutoff(cutArg(rootN * rBar, etaR));
          if (tv == 0.0) return;
          addKernelIntoAcc(acc, 0, m, z, c.mass * tv);
        });
    return harvest(acc, N, m - 1);
  };

  f.evalDerivative = [=](std::span<const double> x) -> ExteriorElement {
    const auto xbar = x.subspan(0, m);
    const double rHat = blockNorm(x, m, N);
    if (rHat == 0.0) {
      if (cantor->distance(xbar).value == 0.0)
        throw std::domain_error("dA evaluated on the singular set");
      return ExteriorElement(N, m);
    }
    const double etaR = etaCutoff(rHat);
    const double etaP = etaCutoffPrime(rHat);
    const double inner = etaR / (4.0 * rootN);
    const double outer = etaR / (2.0 * rootN);
    // The theta'-summand curves more steeply than the plain kernel; open
    // cells three times more conservatively than for values.
    const double openDeriv = openTol / 3.0;
    double acc[1u << 6] = {};
    std::vector<double> z(m);
    std::vector<double> grad(N, 0.0);
    cantor->traverse(
        g.depthFor(rHat),
        [&](const CantorProduct::Cell& c) {
          double distSq = 0.0;
          for (int i = 0; i < m; ++i) {
            const double d = xbar[i] - c.center[i];
            distSq += d * d;
          }
          const double dist = std::sqrt(distSq);
          const double halfDiag = c.halfWidth * diagScale;
          // Support annulus prune: theta' vanishes outside (1/4, 1/2).
          if (dist - halfDiag > outer || dist + halfDiag < inner) return true;
          if (!adaptive) return false;
          return halfDiag <= openDeriv * std::min(std::max(0.0, dist - halfDiag), inner);
        },
        [&](const CantorProduct::Cell& c) {
          double rBar = 0.0;
          for (int i = 0; i < m; ++i) {
            z[i] = xbar[i] - c.center[i];
            rBar += z[i] * z[i];
          }
          rBar = std::sqrt(rBar);
          if (rBar == 0.0) return;  // plateau at 0
          const double arg = cutArg(rootN * rBar, etaR);
          const double tp = thetaCutoffPrime(arg);
          if (tp == 0.0) return;
          for (int i = 0; i < m; ++i) grad[i] = rootN * z[i] / (rBar * etaR);
          for (int i = m; i < N; ++i)
            grad[i] = -rootN * rBar * etaP * x[i] / (rHat * etaR * etaR);
          addOneFormWedgeKernel(acc, N, grad, 0, m, z, c.mass * tp);
        });
    return harvest(acc, N, m);
  };

  f.derivativeSupport = [=](std::span<const double> x) -> bool {
    const double rHat = blockNorm(x, m, N);
    if (rHat == 0.0) return false;
    const double d = cantor->distance(x.subspan(0, m)).value;
    const double atomSlack =
        cantor->axis().isPoint()
            ? 0.0
            : 0.5 * diagScale * cantor->axis().length(g.depthFor(rHat));
    return d <= etaCutoff(rHat) / (2.0 * rootN) + atomSlack;
  };
  return f;
}

ScalarField makeRhoField(const PairGeometry& geom) {
  const int N = geom.N;
  const int m = geom.barDim;
  const double C = geom.distConst;
  auto cantor = geom.cantor;
  return [=](std::span<const double> x) -> double {
    const double rHat = blockNorm(x, m, N);
    const double d = cantor->distance(x.subspan(0, m)).value;
    return thetaCutoff(cutArg(C * rHat, 3.0 * etaCutoff(d)));
  };
}

double RadialBump::value(std::span<const double> x) const {
  const double r = blockNorm(x, 0, dim);
  if (r <= rInner) return 1.0;
  if (r >= rOuter) return 0.0;
  return 1.0 - quinticSmoothstep((r - rInner) / (rOuter - rInner));
}

ExteriorElement RadialBump::gradient(std::span<const double> x) const {
  const double r = blockNorm(x, 0, dim);
  ExteriorElement out(dim, 1);
  if (r <= rInner || r >= rOuter || r == 0.0) return out;
  const double sp = -quinticSmoothstepPrime((r - rInner) / (rOuter - rInner)) /
                    (rOuter - rInner);
  std::vector<std::pair<std::uint32_t, double>> terms;
  for (int i = 0; i < dim; ++i) terms.emplace_back(1u << i, sp * x[i] / r);
  return ExteriorElement::fromTerms(dim, 1, std::move(terms));
}

FormField SplitPair::interior() const {
  FormField f;
  f.dim = base.dim;
  f.degree = base.degree;
  f.name = base.name + "^o";
  f.singular = base.singular;
  const FormField b = base;
  const RadialBump hat = bump;
  f.eval = [b, hat](std::span<const double> x) -> ExteriorElement {
    const double v = hat.value(x);
    if (v == 0.0) return ExteriorElement(b.dim, b.degree);
    return v * b.eval(x);
  };
  f.evalDerivative = [b, hat](std::span<const double> x) -> ExteriorElement {
    const double v = hat.value(x);
    ExteriorElement grad = hat.gradient(x);
    if (v == 0.0 && grad.isZero()) return ExteriorElement(b.dim, b.degree + 1);
    ExteriorElement out = wedge(grad, b.eval(x));
    if (v != 0.0) out += v * b.evalDerivative(x);
    return out;
  };
  f.derivativeSupport = [b, hat](std::span<const double> x) -> bool {
    double sq = 0.0;
    for (double c : x) sq += c * c;
    return sq < hat.rOuter * hat.rOuter;
  };
  return f;
}

FormField SplitPair::boundary() const {
  FormField f;
  f.dim = base.dim;
  f.degree = base.degree;
  f.name = base.name + "^d";
  f.singular = base.singular;
  const FormField b = base;
  const RadialBump hat = bump;
  f.eval = [b, hat](std::span<const double> x) -> ExteriorElement {
    const double v = 1.0 - hat.value(x);
    if (v == 0.0) return ExteriorElement(b.dim, b.degree);
    return v * b.eval(x);
  };
  f.evalDerivative = [b, hat](std::span<const double> x) -> ExteriorElement {
    const double v = 1.0 - hat.value(x);
    ExteriorElement grad = hat.gradient(x);
    if (v == 0.0 && grad.isZero()) return ExteriorElement(b.dim, b.degree + 1);
    ExteriorElement out = ExteriorElement(b.dim, b.degree + 1);
    if (!grad.isZero()) out -= wedge(grad, b.eval(x));
    if (v != 0.0) out += v * b.evalDerivative(x);
    return out;
  };
  return f;
}

ExteriorElement fdDerivative(const FormField& field, std::span<const double> x,
                             double h) {
  if (field.singular.cantor && field.singular.distance(x) <= 2.0 * h)
    throw std::domain_error("fdDerivative: point too close to the singular set");
  const int N = field.dim;
  const int k = field.degree;
  std::vector<ExteriorElement> plus(N), minus(N);
  std::vector<double> p(x.begin(), x.end());
  for (int i = 0; i < N; ++i) {
    p[i] = x[i] + h;
    plus[i] = field.eval(p);
    p[i] = x[i] - h;
    minus[i] = field.eval(p);
    p[i] = x[i];
  }
  // (df)_J = sum_l (-1)^{l-1} d/dx_{j_l} f_{J \ j_l}
  ExteriorElement out(N, k + 1);
  const std::uint32_t total = 1u << N;
  for (std::uint32_t J = 0; J < total; ++J) {
    if (std::popcount(J) != k + 1) continue;
    double v = 0.0;
    int pos = 0;
    for (std::uint32_t rest = J; rest; rest &= rest - 1, ++pos) {
      const int i = std::countr_zero(rest);
      const std::uint32_t sub = J ^ (1u << i);
      const double pd =
          (plus[i].coefficient(sub) - minus[i].coefficient(sub)) / (2.0 * h);
      v += (pos % 2 == 0) ? pd : -pd;
    }
    if (v != 0.0) out.setCoefficient(MultiIndex(J), v);
  }
  return out;
}

FormField scaleField(const FormField& f, double c) {
  FormField out = f;
  const auto e = f.eval;
  const auto d = f.evalDerivative;
  out.eval = [e, c](std::span<const double> x) { return c * e(x); };
  out.evalDerivative = [d, c](std::span<const double> x) { return c * d(x); };
  return out;
}

FormField derivativeField(const FormField& f) {
  FormField out;
  out.dim = f.dim;
  out.degree = f.degree + 1;
  out.name = "d(" + f.name + ")";
  out.singular = f.singular;
  out.eval = f.evalDerivative;
  const int dim = f.dim;
  const int deg = f.degree + 2;
  out.evalDerivative = [dim, deg](std::span<const double>) {
    return ExteriorElement(dim, deg);  // d(df) = 0
  };
  out.derivativeSupport = [](std::span<const double>) { return false; };
  return out;
}

FormField wedgeFields(const FormField& f, const FormField& g) {
  FormField out;
  out.dim = f.dim;
  out.degree = f.degree + g.degree;
  out.name = f.name + "^" + g.name;
  out.singular = f.singular.cantor ? f.singular : g.singular;
  const FormField a = f;
  const FormField b = g;
  out.eval = [a, b](std::span<const double> x) { return wedge(a.eval(x), b.eval(x)); };
  const int sign = (f.degree % 2 == 0) ? 1 : -1;
  out.evalDerivative = [a, b, sign](std::span<const double> x) {
    ExteriorElement out1 = wedge(a.evalDerivative(x), b.eval(x));
    ExteriorElement out2 = wedge(a.eval(x), b.evalDerivative(x));
    return sign > 0 ? out1 + out2 : out1 - out2;
  };
  return out;
}

}  // namespace lavgap
