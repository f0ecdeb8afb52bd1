#ifndef LAVGAP_SETUP_HPP
#define LAVGAP_SETUP_HPP

#include <optional>
#include <string>
#include <vector>

#include "lavgap/cantor.hpp"
#include "lavgap/orlicz.hpp"

namespace lavgap {

/// Open interval with optional one-sided bounds (all bounds strict).
struct GammaInterval {
  std::optional<double> lo;
  std::optional<double> hi;

  bool empty() const {
    return lo && hi && !(*lo < *hi);
  }
  bool contains(double g) const {
    if (lo && !(g > *lo)) return false;
    if (hi && !(g < *hi)) return false;
    return true;
  }
  GammaInterval intersect(const GammaInterval& other) const;
  std::string toString() const;

  /// Midpoint for bounded intervals, bound -+ 1 for half-infinite, 0 for
  /// the whole line.
  double pick() const;
};

/// Regime classification and role assignment for one of the five setups.
struct SetupPlan {
  int setupId = 1;
  int N = 2;
  int k = 1;
  double p0 = 2.0;

  double frD = 0.0;     // formal dimension D of the Cantor power
  double lambda = 0.0;  // 0 for meager / point families
  bool meager = false;
  bool pointSet = false;
  int cantorAxes = 1;  // m: the x-bar block size

  double gamma = 0.0;             // chosen value
  GammaInterval admissibleGamma;  // filled by checkModelConditions

  // Role assignment: setups 2/4 use u = P2, A = sign * P1 with
  // sign = (-1)^{k(N-k)} and the complemented separator.
  bool swappedRoles = false;
  int pairSign = 1;
  bool rhoComplement = false;

  std::string notes;

  CantorSpec cantorSpec(int maxDepthOverride = 0) const;
};

enum class SetupPreference { Auto = 0, Force1 = 1, Force2 = 2, Force3 = 3, Force4 = 4, Force5 = 5 };

/// Maps (p0, N, k) to a SetupPlan. Auto picks setup 2 / 1 / 3 as p0 is
/// greater than, equal to, or less than N/k; setups 4 and 5 must be forced
/// and require p0 = N/k.
SetupPlan planSetup(double p0, int N, int k, SetupPreference pref = SetupPreference::Auto);

struct ModelCheck {
  bool admissible = false;
  GammaInterval gamma;
  std::vector<std::string> violated;
  std::vector<std::string> notes;
};

/// Evaluates the per-family admissibility conditions of the matching
/// construction lemma (double phase / borderline / variable exponent) for
/// the plan's setup, returning the admissible gamma interval and every
/// violated constraint by name. An empty interval is a verdict, not an
/// error.
ModelCheck checkModelConditions(const OrliczModel& model, const SetupPlan& plan);

/// Chooses gamma: the override when provided, otherwise the interval's
/// midpoint rule. Throws if an override lies outside a nonempty interval's
/// closure requirements (meager setups also require gamma > 0).
void resolveGamma(SetupPlan& plan, const ModelCheck& check,
                  std::optional<double> override);

}  // namespace lavgap

#endif
