#ifndef LAVGAP_FORMS_HPP
#define LAVGAP_FORMS_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "lavgap/cantor.hpp"
#include "lavgap/exterior.hpp"
#include "lavgap/orlicz.hpp"

namespace lavgap {

/// Smooth increasing cutoff: 0 below 1/4, 1 above 1/2 (quintic smoothstep
/// on the transition; |theta'| <= 7.5, absorbed into estimate constants).
double thetaCutoff(double t);
double thetaCutoffPrime(double t);

/// Concave C^1 ramp: identity below 1/4, 1/2 - (3/4 - t)^2 in between,
/// constant 1/2 above 3/4.
double etaCutoff(double t);
double etaCutoffPrime(double t);

/// Surface area of the unit sphere in R^l.
double surfaceArea(int l);

/// Fundamental solution of the Laplacian in R^l at |x| = r (pole at 0).
double gammaValue(int l, double r);

/// The (l-1)-form *dGamma_l evaluated on the coordinate block
/// [offset+1, offset+l] (1-based global indices); coefficients
/// (-1)^{i-1} z_i |z|^{-l} / sigma_l on the complement monomials.
/// For l = 1 this is the 0-form sign(z)/2.
ExteriorElement starDGamma(int dim, int offset, int l, std::span<const double> z);

/// Descriptor of the singular contact set S = C^m x {0}^{N-m}.
struct SingularSetDesc {
  int dim = 0;
  int barDim = 0;
  std::shared_ptr<const CantorProduct> cantor;  // null: no singular set

  double distance(std::span<const double> x) const;
};

/// A differential form with analytic derivative. Evaluators are pure and
/// safe for concurrent use.
struct FormField {
  int dim = 0;
  int degree = 0;
  std::function<ExteriorElement(std::span<const double>)> eval;
  std::function<ExteriorElement(std::span<const double>)> evalDerivative;
  /// Cheap conservative predicate: false guarantees the derivative vanishes.
  std::function<bool(std::span<const double>)> derivativeSupport;
  SingularSetDesc singular;
  std::string name;
};

/// Geometry shared by one u/A/rho family: ambient dimension, x-bar block
/// size m (the Cantor axes), the product measure, the distance constant C
/// and the convolution truncation policy.
struct PairGeometry {
  int N = 2;
  int barDim = 1;
  std::shared_ptr<const CantorProduct> cantor;
  double distConst = 4.0;  // 1 for the degenerate point set
  int atomDepth = 8;       // reference truncation depth
  double openTol = 2.5e-3;  // far-field cell-opening ratio
  double convEps = 1e-2;    // per-query deepening: l_depth <= convEps |x^|
  bool adaptiveTree = true; // false: always the fixed atomDepth sum

  int hatDim() const { return N - barDim; }

  /// Truncation depth for a query at |x^| = rHat: at least atomDepth, deep
  /// enough that l_depth <= convEps rHat, capped at the representable
  /// maximum. Keeps the discretized measure below the quadrature resolution
  /// so the convolved field never shows point-mass spikes.
  int depthFor(double rHat) const;
};

PairGeometry makeGeometry(int N, const CantorSpec& spec, int atomDepth = 8);

/// u-type field (kernel in the x-hat block, distance cutoff toward the
/// Cantor set): theta(sqrt(N) C |x^|/eta(d(x-,C))) * *dGamma_{N-m}(x^),
/// degree N - m - 1.
FormField makeUType(const PairGeometry& geom);

/// A-type field (measure convolution of the basic kernel in the x-bar
/// block): int theta(sqrt(N)|x- - y|/eta(|x^|)) *dGamma_m(x- - y) dmu(y),
/// degree m - 1.
FormField makeAType(const PairGeometry& geom);

/// Separator rho = theta(C |x^| / (3 eta(d(x-, C)))); 1 on supp dA, 0 on
/// supp du.
ScalarField makeRhoField(const PairGeometry& geom);

/// Basic (one saddle point) pair: point Cantor set, C = 1.
PairGeometry makeBasicGeometry(int N, int barDim);

/// Radial quintic bump: 1 for |x| <= rInner, 0 for |x| >= rOuter.
struct RadialBump {
  int dim = 0;
  double rInner = 1.05;
  double rOuter = 1.4;

  double value(std::span<const double> x) const;
  /// Gradient as a 1-form (exterior derivative of the bump).
  ExteriorElement gradient(std::span<const double> x) const;
};

/// Localization split u = u-interior + u-boundary with a cutoff that is 1
/// near the singular set and 0 near the domain boundary.
struct SplitPair {
  FormField base;
  RadialBump bump;

  FormField interior() const;  // eta^ u,   d = d(eta^) ^ u + eta^ du
  FormField boundary() const;  // (1-eta^)u, d = -d(eta^) ^ u + (1-eta^) du
};

/// Central-difference exterior derivative, used only as a test oracle.
/// Requires the point to keep distance > 2h from the declared singular set.
ExteriorElement fdDerivative(const FormField& field, std::span<const double> x,
                             double h);

/// Field combinators.
FormField scaleField(const FormField& f, double c);
FormField derivativeField(const FormField& f);  // df with d(df) = 0
FormField wedgeFields(const FormField& f, const FormField& g);

}  // namespace lavgap

#endif
