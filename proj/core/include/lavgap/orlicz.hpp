#ifndef LAVGAP_ORLICZ_HPP
#define LAVGAP_ORLICZ_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lavgap {

/// Scalar spatial field (e.g. the separator rho~), evaluated on points of
/// the ambient space.
using ScalarField = std::function<double(std::span<const double>)>;

struct ConjugateResult {
  double value = 0.0;
  bool converged = true;
};

/// sigma(t) = kappa * ln ln(1/t) / ln(1/t), clamped at tClamp so it stays
/// positive and bounded; sigma -> 0 as t -> 0.
struct ExponentProfile {
  double kappa = 1.0;
  double tClamp = 1e-2;

  double sigma(double t) const;
};

/// Monotone C^2 warp pinning values to [(3p- + p0)/4, (3p+ + p0)/4]:
/// identity on [(p- + p0)/2, (p+ + p0)/2], constant outside [p-, p+],
/// smoothstep-derivative blends between.
struct ClampWarp {
  double pMinus = 1.0;
  double pPlus = 2.0;
  double p0 = 1.5;

  double operator()(double t) const;
};

/// One of the three integrand families. Pointwise evaluation is
/// factored through (rho, |x_hat|) so quadrature caches can drive it; the
/// field-level entry points compose with the attached separator field.
class OrliczModel {
public:
  enum class Family { DoublePhase, Borderline, VariableExponent };

  static OrliczModel doublePhase(double p, double q, double alpha);
  static OrliczModel borderline(double p0, double alpha, double beta, double kappa);
  static OrliczModel variableExponent(double pMinus, double pPlus, double p0,
                                      double kappa);

  Family family() const { return family_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double kappa() const { return kappa_; }
  double p0() const { return p0_; }
  double pMinus() const { return pMinus_; }
  double pPlus() const { return pPlus_; }
  double tClamp() const { return tClamp_; }

  /// Weight a (double phase / borderline) or exponent p(x) (variable
  /// exponent) as a function of the separator value and |x_hat|.
  double coefficientAt(double rho, double xhatNorm) const;

  /// Phi(x, t) with the spatial dependence collapsed to (rho, |x_hat|).
  double phiAt(double rho, double xhatNorm, double t) const;

  /// Pointwise conjugate sup_{tau >= 0} (s tau - Phi(x, tau)), bracketing +
  /// bisection on the stationarity condition; closed forms for pure powers.
  ConjugateResult phiConjugateAt(double rho, double xhatNorm, double s) const;

  /// Derivative d/dt Phi(x, t) (the map is nondecreasing in t on each
  /// family's effective domain; used by the conjugate solver).
  double phiDerivativeAt(double rho, double xhatNorm, double t) const;

  /// Field-level wrappers; require a separator field and the x-bar block
  /// size via attachSeparator.
  void attachSeparator(ScalarField rhoTilde, int barDim);
  bool hasSeparator() const { return static_cast<bool>(rhoTilde_); }
  double rho(std::span<const double> x) const;
  double xhatNorm(std::span<const double> x) const;
  double phi(std::span<const double> x, double t) const;
  ConjugateResult phiConjugate(std::span<const double> x, double s) const;
  double coefficient(std::span<const double> x) const;

  const ExponentProfile& profile() const { return profile_; }
  const ClampWarp& warp() const { return warp_; }

  /// Parameter sanity messages (non-fatal), e.g. borderline alpha+beta
  /// below the gap-theorem threshold alpha+beta > p0+kappa.
  std::vector<std::string> warnings() const;

  std::string familyName() const;

private:
  Family family_ = Family::DoublePhase;
  double p_ = 2.0, q_ = 3.0, alpha_ = 0.0;
  double p0_ = 2.0, beta_ = 0.0, kappa_ = 0.0;
  double pMinus_ = 1.5, pPlus_ = 3.0;
  double tClamp_ = 1e-2;
  ExponentProfile profile_;
  ClampWarp warp_;
  ScalarField rhoTilde_;
  int barDim_ = 0;
};

/// Conjugate of the pure power t^p: (p-1) p^{-p'} s^{p'}.
double powerConjugate(double p, double s);

}  // namespace lavgap

#endif
