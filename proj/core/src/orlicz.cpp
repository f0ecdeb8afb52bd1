#include "lavgap/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lavgap {

namespace {

// Quintic smoothstep and its integral.
double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double smoothstepIntegral(double s) {
  // int_0^s smoothstep = s^6 - 3 s^5 + 2.5 s^4 for s in [0,1]
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return s - 0.5;
  const double s4 = s * s * s * s;
  return s4 * (2.5 + s * (-3.0 + s));
}

}  // namespace

double ExponentProfile::sigma(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("ExponentProfile::sigma: t must be positive");
  const double tc = std::min(t, tClamp);
  const double L = std::log(1.0 / tc);
  return kappa * std::log(L) / L;
}

double ClampWarp::operator()(double t) const {
  const double mLo = 0.5 * (pMinus + p0);
  const double mHi = 0.5 * (pPlus + p0);
  const double vLo = 0.25 * (3.0 * pMinus + p0);
  const double vHi = 0.25 * (3.0 * pPlus + p0);
  if (t <= pMinus) return vLo;
  if (t >= pPlus) return vHi;
  if (t < mLo) {
    const double h = mLo - pMinus;
    return vLo + h * smoothstepIntegral((t - pMinus) / h);
  }
  if (t <= mHi) return t;
  const double h = pPlus - mHi;
  return mHi + h * (0.5 - smoothstepIntegral((pPlus - t) / h));
}

OrliczModel OrliczModel::doublePhase(double p, double q, double alpha) {
  if (!(1.0 < p && p < q)) throw std::invalid_argument("doublePhase: need 1 < p < q");
  if (!(alpha >= 0.0)) throw std::invalid_argument("doublePhase: need alpha >= 0");
  OrliczModel m;
  m.family_ = Family::DoublePhase;
  m.p_ = p;
  m.q_ = q;
  m.alpha_ = alpha;
  m.p0_ = p;
  return m;
}

OrliczModel OrliczModel::borderline(double p0, double alpha, double beta, double kappa) {
  if (!(p0 > 1.0)) throw std::invalid_argument("borderline: need p0 > 1");
  if (!(kappa >= 0.0)) throw std::invalid_argument("borderline: need kappa >= 0");
  OrliczModel m;
  m.family_ = Family::Borderline;
  m.p0_ = p0;
  m.alpha_ = alpha;
  m.beta_ = beta;
  m.kappa_ = kappa;
  return m;
}

OrliczModel OrliczModel::variableExponent(double pMinus, double pPlus, double p0,
                                          double kappa) {
  if (!(1.0 < pMinus && pMinus < p0 && p0 < pPlus))
    throw std::invalid_argument("variableExponent: need 1 < p- < p0 < p+");
  if (!(kappa > 0.0)) throw std::invalid_argument("variableExponent: need kappa > 0");
  OrliczModel m;
  m.family_ = Family::VariableExponent;
  m.pMinus_ = pMinus;
  m.pPlus_ = pPlus;
  m.p0_ = p0;
  m.kappa_ = kappa;
  m.profile_ = ExponentProfile{kappa, m.tClamp_};
  m.warp_ = ClampWarp{pMinus, pPlus, p0};
  return m;
}

double OrliczModel::coefficientAt(double rho, double xhatNorm) const {
  switch (family_) {
    case Family::DoublePhase:
      return rho * std::pow(xhatNorm, alpha_);
    case Family::Borderline: {
      const double tc = std::min(std::max(xhatNorm, 1e-300), tClamp_);
      return rho * std::pow(std::log(1.0 / tc), -kappa_);
    }
    case Family::VariableExponent: {
      const double s = profile_.sigma(std::max(xhatNorm, 1e-300));
      return warp_(p0_ + s * (2.0 * rho - 1.0));
    }
  }
  return 0.0;
}

double OrliczModel::phiAt(double rho, double xhatNorm, double t) const {
  if (t < 0.0) throw std::invalid_argument("phi: t must be nonnegative");
  if (t == 0.0) return 0.0;
  switch (family_) {
    case Family::DoublePhase:
      return std::pow(t, p_) + coefficientAt(rho, xhatNorm) * std::pow(t, q_);
    case Family::Borderline: {
      const double lg = std::log(std::exp(1.0) + t);
      return std::pow(t, p0_) * std::pow(lg, -beta_) +
             coefficientAt(rho, xhatNorm) * std::pow(t, p0_) * std::pow(lg, alpha_);
    }
    case Family::VariableExponent:
      return std::pow(t, coefficientAt(rho, xhatNorm));
  }
  return 0.0;
}

double OrliczModel::phiDerivativeAt(double rho, double xhatNorm, double t) const {
  switch (family_) {
    case Family::DoublePhase: {
      const double a = coefficientAt(rho, xhatNorm);
      return p_ * std::pow(t, p_ - 1.0) + a * q_ * std::pow(t, q_ - 1.0);
    }
    case Family::Borderline: {
      const double a = coefficientAt(rho, xhatNorm);
      const double e = std::exp(1.0);
      const double lg = std::log(e + t);
      const double tp = std::pow(t, p0_ - 1.0);
      const double dPhi1 =
          tp * std::pow(lg, -beta_ - 1.0) * (p0_ * lg - beta_ * t / (e + t));
      const double dPhi2 =
          tp * std::pow(lg, alpha_ - 1.0) * (p0_ * lg + alpha_ * t / (e + t));
      return dPhi1 + a * dPhi2;
    }
    case Family::VariableExponent: {
      const double px = coefficientAt(rho, xhatNorm);
      return px * std::pow(t, px - 1.0);
    }
  }
  return 0.0;
}

double powerConjugate(double p, double s) {
  if (s <= 0.0) return 0.0;
  const double pc = p / (p - 1.0);
  return (p - 1.0) * std::pow(p, -pc) * std::pow(s, pc);
}

ConjugateResult OrliczModel::phiConjugateAt(double rho, double xhatNorm, double s) const {
  if (s < 0.0) throw std::invalid_argument("phiConjugate: s must be nonnegative");
  if (s == 0.0) return {0.0, true};

  // Closed forms for pure powers.
  if (family_ == Family::VariableExponent)
    return {powerConjugate(coefficientAt(rho, xhatNorm), s), true};
  if (family_ == Family::DoublePhase && coefficientAt(rho, xhatNorm) == 0.0)
    return {powerConjugate(p_, s), true};

  // Bracket the stationarity condition Phi'(tau) = s.
  double hi = 1.0;
  int it = 0;
  while (phiDerivativeAt(rho, xhatNorm, hi) < s) {
    hi *= 2.0;
    if (++it > 200) return {s * hi - phiAt(rho, xhatNorm, hi), false};
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (phiDerivativeAt(rho, xhatNorm, mid) < s)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-10 * std::max(1.0, hi)) break;
  }
  const double tau = 0.5 * (lo + hi);
  // Safeguard against mild nonconvexity near zero (borderline family).
  const double atTau = s * tau - phiAt(rho, xhatNorm, tau);
  return {std::max(atTau, 0.0), true};
}

void OrliczModel::attachSeparator(ScalarField rhoTilde, int barDim) {
  rhoTilde_ = std::move(rhoTilde);
  barDim_ = barDim;
}

double OrliczModel::rho(std::span<const double> x) const {
  if (!rhoTilde_) throw std::logic_error("OrliczModel: separator field not attached");
  return rhoTilde_(x);
}

double OrliczModel::xhatNorm(std::span<const double> x) const {
  double sq = 0.0;
  for (std::size_t i = barDim_; i < x.size(); ++i) sq += x[i] * x[i];
  return std::sqrt(sq);
}

double OrliczModel::phi(std::span<const double> x, double t) const {
  return phiAt(rho(x), xhatNorm(x), t);
}

ConjugateResult OrliczModel::phiConjugate(std::span<const double> x, double s) const {
  return phiConjugateAt(rho(x), xhatNorm(x), s);
}

double OrliczModel::coefficient(std::span<const double> x) const {
  return coefficientAt(rho(x), xhatNorm(x));
}

std::vector<std::string> OrliczModel::warnings() const {
  std::vector<std::string> out;
  if (family_ == Family::Borderline && !(alpha_ + beta_ > p0_ + kappa_)) {
    out.push_back("borderline: alpha+beta <= p0+kappa violates the gap-theorem hypothesis");
  }
  if (family_ == Family::DoublePhase && alpha_ > 1.0) {
    out.push_back("doublePhase: alpha > 1 leaves the Hoelder range of the weight");
  }
  return out;
}

std::string OrliczModel::familyName() const {
  switch (family_) {
    case Family::DoublePhase: return "double-phase";
    case Family::Borderline: return "borderline";
    case Family::VariableExponent: return "variable-exponent";
  }
  return "?";
}

}  // namespace lavgap
