#include "lavgap/setup.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lavgap {

namespace {
constexpr double kEqTol = 1e-12;

bool approxEq(double a, double b) { return std::abs(a - b) <= kEqTol * std::max({1.0, std::abs(a), std::abs(b)}); }
}  // namespace

GammaInterval GammaInterval::intersect(const GammaInterval& other) const {
  GammaInterval out;
  if (lo && other.lo)
    out.lo = std::max(*lo, *other.lo);
  else
    out.lo = lo ? lo : other.lo;
  if (hi && other.hi)
    out.hi = std::min(*hi, *other.hi);
  else
    out.hi = hi ? hi : other.hi;
  return out;
}

std::string GammaInterval::toString() const {
  std::ostringstream os;
  os << '(';
  if (lo)
    os << *lo;
  else
    os << "-inf";
  os << ", ";
  if (hi)
    os << *hi;
  else
    os << "inf";
  os << ')';
  return os.str();
}

double GammaInterval::pick() const {
  if (lo && hi) return 0.5 * (*lo + *hi);
  if (lo) return *lo + 1.0;
  if (hi) return *hi - 1.0;
  return 0.0;
}

CantorSpec SetupPlan::cantorSpec(int maxDepthOverride) const {
  CantorSpec s;
  if (pointSet) {
    s = CantorSpec::point(cantorAxes);
  } else if (meager) {
    s = CantorSpec::meager(gamma, cantorAxes);
  } else {
    s = CantorSpec::generalized(lambda, gamma, cantorAxes);
  }
  if (maxDepthOverride > 0) s.maxDepth = maxDepthOverride;
  return s;
}

SetupPlan planSetup(double p0, int N, int k, SetupPreference pref) {
  if (!(p0 > 1.0)) throw std::invalid_argument("planSetup: need p0 > 1");
  if (!(1 <= k && k <= N - 1)) throw std::invalid_argument("planSetup: need 1 <= k <= N-1");

  const double critical = static_cast<double>(N) / k;
  const bool atCritical = approxEq(p0, critical);

  int id = 0;
  if (pref == SetupPreference::Auto) {
    if (atCritical)
      id = 1;
    else if (p0 > critical)
      id = 2;
    else
      id = 3;
  } else {
    id = static_cast<int>(pref);
    if ((id == 1 || id == 4 || id == 5) && !atCritical)
      throw std::invalid_argument("planSetup: setups 1/4/5 require p0 = N/k");
    if (id == 2 && !(p0 > critical))
      throw std::invalid_argument("planSetup: setup 2 requires p0 > N/k");
    if (id == 3 && !(p0 < critical))
      throw std::invalid_argument("planSetup: setup 3 requires p0 < N/k");
  }

  SetupPlan plan;
  plan.setupId = id;
  plan.N = N;
  plan.k = k;
  plan.p0 = p0;
  plan.pairSign = (k * (N - k)) % 2 == 0 ? 1 : -1;

  switch (id) {
    case 1:
      plan.pointSet = true;
      plan.cantorAxes = N - k;
      plan.frD = 0.0;
      break;
    case 2:
      plan.frD = (p0 * k - N) / (p0 - 1.0);
      plan.lambda = std::exp2(-static_cast<double>(k) / plan.frD);
      plan.cantorAxes = k;
      plan.swappedRoles = true;
      plan.rhoComplement = true;
      break;
    case 3:
      plan.frD = N - p0 * k;
      plan.lambda = std::exp2(-static_cast<double>(N - k) / plan.frD);
      plan.cantorAxes = N - k;
      break;
    case 4:
      plan.meager = true;
      plan.cantorAxes = k;
      plan.swappedRoles = true;
      plan.rhoComplement = true;
      break;
    case 5:
      plan.meager = true;
      plan.cantorAxes = N - k;
      break;
    default:
      throw std::logic_error("planSetup: bad setup id");
  }
  if (!plan.swappedRoles) plan.pairSign = 1;

  plan.notes =
      "degree indexing follows the construction lemmas (u of degree k-1); the "
      "headline double-phase exponent condition q > p + alpha*max(1/(k+1), "
      "(p-1)/(N-k-1)) is stated for the shifted degree and is not re-checked here";
  return plan;
}

namespace {

struct ConditionLog {
  std::vector<std::string> violated;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& name) {
    if (!ok) violated.push_back(name);
  }
};

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

ModelCheck checkDoublePhase(const OrliczModel& m, const SetupPlan& plan) {
  ModelCheck out;
  ConditionLog log;
  const double p = m.p();
  const double q = m.q();
  const double alpha = m.alpha();
  const double p0 = plan.p0;
  const int N = plan.N;
  const int k = plan.k;
  GammaInterval gi;

  switch (plan.setupId) {
    case 1: {
      log.require(p < p0 - kEqTol, "p < N/k");
      log.require(q > p0 + alpha / k + kEqTol, "q > N/k + alpha/k");
      break;
    }
    case 2: {
      // p <= p0 <= q - alpha (p0-1)/(N-k): the q-condition is a lower bound.
      const double qMin = p0 + alpha * (p0 - 1.0) / (N - k);
      log.require(p <= p0 + kEqTol, "p <= p0");
      log.require(q >= qMin - kEqTol, "q >= p0 + alpha(p0-1)/(N-k)");
      if (approxEq(p, p0)) gi.lo = 1.0 / (p0 * k - N);
      if (approxEq(q, qMin)) {
        GammaInterval g2;
        g2.hi = (1.0 - p0) / (p0 * k - N);
        gi = gi.intersect(g2);
        log.notes.push_back("q at the supercritical boundary: gamma < " + num(*g2.hi));
      }
      break;
    }
    case 3: {
      const double qMin = p0 + alpha / k;
      log.require(p <= p0 + kEqTol, "p <= p0");
      log.require(q >= qMin - kEqTol, "q >= p0 + alpha/k");
      if (approxEq(p, p0)) gi.hi = 1.0 / (p0 * k - N);  // negative bound
      if (approxEq(q, qMin)) {
        GammaInterval g2;
        g2.lo = (q - 1.0) / (N - p0 * k);
        gi = gi.intersect(g2);
        log.notes.push_back("q at the subcritical boundary: gamma > " + num(*g2.lo));
      }
      break;
    }
    case 4: {
      const double qMin = p0 + alpha / k;
      log.require(p <= p0 + kEqTol, "p <= p0");
      log.require(q >= qMin - kEqTol, "q >= p0 + alpha/k");
      gi.lo = 0.0;  // meager family
      if (approxEq(p, p0)) {
        GammaInterval g2;
        g2.lo = 1.0 / (N - k);
        gi = gi.intersect(g2);
      }
      if (approxEq(q, qMin)) {
        GammaInterval g2;
        g2.hi = -1.0 / k;
        gi = gi.intersect(g2);
        log.notes.push_back("q at the boundary forces gamma < -1/k: incompatible with meager gamma > 0");
      }
      break;
    }
    case 5: {
      const double qMin = p0 + alpha / k;
      log.require(p <= p0 + kEqTol, "p <= p0");
      log.require(q >= qMin - kEqTol, "q >= p0 + alpha/k");
      gi.lo = 0.0;
      if (approxEq(p, p0)) {
        GammaInterval g2;
        g2.hi = 1.0 / (k - N);
        gi = gi.intersect(g2);
        log.notes.push_back("p = p0 forces gamma < 1/(k-N): incompatible with meager gamma > 0");
      }
      if (approxEq(q, qMin)) {
        GammaInterval g2;
        g2.lo = (q - 1.0) / (N - k);
        gi = gi.intersect(g2);
      }
      break;
    }
  }

  out.gamma = gi;
  out.violated = log.violated;
  out.notes = log.notes;
  out.admissible = log.violated.empty() && !gi.empty();
  return out;
}

ModelCheck checkBorderline(const OrliczModel& m, const SetupPlan& plan) {
  ModelCheck out;
  ConditionLog log;
  const double p0 = plan.p0;
  const double alpha = m.alpha();
  const double beta = m.beta();
  const double kappa = m.kappa();
  const int N = plan.N;
  const int k = plan.k;
  GammaInterval gi;

  if (!(alpha + beta > p0 + kappa))
    log.notes.push_back("alpha+beta <= p0+kappa: outside the gap-theorem hypothesis");

  switch (plan.setupId) {
    case 1: {
      log.require(beta > 1.0 + kEqTol, "beta > 1");
      log.require(alpha + 1.0 > kappa + p0 + kEqTol, "alpha + 1 > kappa + p0");
      break;
    }
    case 2: {
      // (1-beta)/(p0-1) < gamma*D < (alpha-kappa-p0+1)/(p0-1)
      gi.lo = (1.0 - beta) / (p0 - 1.0) / plan.frD;
      gi.hi = (alpha - kappa - p0 + 1.0) / (p0 - 1.0) / plan.frD;
      break;
    }
    case 3: {
      // p0+kappa-alpha-1 < gamma*D < beta-1
      gi.lo = (p0 + kappa - alpha - 1.0) / plan.frD;
      gi.hi = (beta - 1.0) / plan.frD;
      break;
    }
    case 4: {
      gi.lo = (1.0 - beta) / (p0 - 1.0) / k;
      gi.hi = (alpha - kappa - p0 + 1.0) / (p0 - 1.0) / k;
      GammaInterval pos;
      pos.lo = 0.0;
      gi = gi.intersect(pos);
      log.require(alpha > p0 - 1.0 + kappa + kEqTol, "alpha > p0 - 1 + kappa");
      break;
    }
    case 5: {
      gi.lo = (p0 + kappa - alpha - 1.0) / (N - k);
      gi.hi = (beta - 1.0) / (N - k);
      GammaInterval pos;
      pos.lo = 0.0;
      gi = gi.intersect(pos);
      log.require(beta > 1.0 + kEqTol, "beta > 1");
      break;
    }
  }

  out.gamma = gi;
  out.violated = log.violated;
  out.notes = log.notes;
  out.admissible = log.violated.empty() && !gi.empty();
  return out;
}

ModelCheck checkVariableExponent(const OrliczModel& m, const SetupPlan& plan) {
  ModelCheck out;
  ConditionLog log;
  const double p0 = plan.p0;
  const double kappa = m.kappa();
  const int N = plan.N;
  const int k = plan.k;
  GammaInterval gi;

  log.require(m.pMinus() < p0 && p0 < m.pPlus(), "p- < p0 < p+");

  switch (plan.setupId) {
    case 1: {
      const double bound = std::max(static_cast<double>(k), static_cast<double>(N - k)) /
                           (static_cast<double>(k) * k);
      log.require(kappa > bound + kEqTol, "kappa > max(k, N-k)/k^2");
      break;
    }
    case 2: {
      log.require(kappa > p0 * (p0 - 1.0) / (2.0 * (N - k)) + kEqTol,
                  "kappa > p0(p0-1)/(2(N-k))");
      const double scale = p0 * k - N;  // positive
      gi.lo = (1.0 - kappa * (N - k) / (p0 - 1.0)) / scale;
      gi.hi = (kappa * (N - k) / (p0 - 1.0) - (p0 - 1.0)) / scale;
      break;
    }
    case 3: {
      log.require(kappa > p0 / (2.0 * k) + kEqTol, "kappa > p0/(2k)");
      const double scale = N - p0 * k;  // positive
      gi.lo = (p0 - 1.0 - kappa * k) / scale;
      gi.hi = (kappa * k - 1.0) / scale;
      break;
    }
    case 4: {
      log.require(kappa > N / (2.0 * k * k) + kEqTol, "kappa > N/(2k^2)");
      gi.lo = (k - kappa * k * k) / ((N - k) * static_cast<double>(k));
      gi.hi = (k - N + kappa * k * k) / ((N - k) * static_cast<double>(k));
      GammaInterval pos;
      pos.lo = 0.0;
      gi = gi.intersect(pos);
      break;
    }
    case 5: {
      log.require(kappa > N / (2.0 * k * k) + kEqTol, "kappa > N/(2k^2)");
      gi.lo = (-kappa * k + (N - k) / static_cast<double>(k)) / k;
      gi.hi = (kappa * k - 1.0) / k;
      GammaInterval pos;
      pos.lo = 0.0;
      gi = gi.intersect(pos);
      break;
    }
  }

  out.gamma = gi;
  out.violated = log.violated;
  out.notes = log.notes;
  out.admissible = log.violated.empty() && !gi.empty();
  return out;
}

}  // namespace

ModelCheck checkModelConditions(const OrliczModel& model, const SetupPlan& plan) {
  switch (model.family()) {
    case OrliczModel::Family::DoublePhase:
      return checkDoublePhase(model, plan);
    case OrliczModel::Family::Borderline:
      return checkBorderline(model, plan);
    case OrliczModel::Family::VariableExponent:
      return checkVariableExponent(model, plan);
  }
  throw std::logic_error("checkModelConditions: unknown family");
}

void resolveGamma(SetupPlan& plan, const ModelCheck& check, std::optional<double> override) {
  if (plan.pointSet) {
    plan.gamma = 0.0;
    if (override && *override != 0.0)
      throw std::invalid_argument("resolveGamma: setup 1 has no gamma parameter");
    plan.admissibleGamma = check.gamma;
    return;
  }
  plan.admissibleGamma = check.gamma;
  if (override) {
    if (plan.meager && !(*override > 0.0))
      throw std::invalid_argument("resolveGamma: meager setups require gamma > 0");
    plan.gamma = *override;
    return;
  }
  GammaInterval gi = check.gamma;
  if (plan.meager) {
    GammaInterval pos;
    pos.lo = 0.0;
    gi = gi.intersect(pos);
  }
  if (gi.empty()) throw std::invalid_argument("resolveGamma: empty admissible interval and no override");
  plan.gamma = gi.pick();
}

}  // namespace lavgap
