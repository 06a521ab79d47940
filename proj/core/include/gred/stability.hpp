#pragma once

// Mechanical checks of the preconditions of the global-stability theorems for
// the generalized RED map. A verdict either names the theorem whose every
// precondition was verified, or reports "not certified" (which says nothing
// about instability).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gred/model.hpp"

namespace gred {

/// Margin applied to strict inequalities in theorem conditions.
inline constexpr double kStrictGuard = 1e-9;

/// Grid size used for sampled checks over the core.
inline constexpr int kCoreGridPoints = 10000;

enum class ShapeKind { StrictlyIncreasing, StrictlyDecreasing, UnimodalMin, Unclassified };

struct ShapeEvidence {
  double slope_left = 0.0;   ///< f'(theta_l+)
  double slope_right = 0.0;  ///< f'(theta_r-), possibly -inf
  bool convex = false;       ///< 3J - 2h > 0 throughout the core
  bool sampled = false;      ///< derivative was sampled on the core grid
  int sign_changes = 0;      ///< sign changes of f' seen on the grid
  double min_slope = 0.0;    ///< smallest f' seen (limits included)
  double max_slope = 0.0;
};

struct ShapeClass {
  ShapeKind kind = ShapeKind::Unclassified;
  std::optional<double> x_c;  ///< location of the minimum for UnimodalMin
  ShapeEvidence evidence;
};

/// Shape of f restricted to the core. A local maximum or more than one
/// critical point yields Unclassified.
ShapeClass classify_shape(const NormalizedModel& m);

struct CoreInvariance {
  bool invariant = false;
  double image_inf = 0.0;  ///< infimum of f over the core (attained or limit)
  double image_sup = 0.0;
};

/// Whether f maps (theta_l, theta_r) into itself, using the extremes over
/// {theta_l+, theta_r-, x_c} for monotone and unimodal cores and a dense
/// grid otherwise.
CoreInvariance core_invariance(const NormalizedModel& m, const ShapeClass& shape);
CoreInvariance core_invariance(const NormalizedModel& m);
bool core_invariant(const NormalizedModel& m);

/// theta_l + theta_r != 1 (|difference| <= 1e-12 counts as equal).
bool endpoints_not_2cycle(const NormalizedModel& m);

/// Closed-form sufficient condition for convexity from z(theta_r).
bool convexity_sufficient(const NormalizedModel& m);

/// 3J - 2h > 0 on a kCoreGridPoints grid of the core.
bool convexity_pointwise(const NormalizedModel& m);

/// w above this value iff f(theta_l) > f(theta_r-).
double monotonicity_w_threshold(const NormalizedModel& m);

/// w bound for a strictly decreasing core:
/// min{(theta_r-theta_l)/(1-theta_l), (theta_r-theta_l)/(theta_r-(A1-A2)^+)}.
double decreasing_core_w_bound(const NormalizedModel& m);

/// w bound for a minimum right of x*:
/// min{(theta_r-theta_l)/(1-theta_l), (x*-theta_l)/(x*-(A1-A2)^+)}.
double unimodal_right_w_bound(const NormalizedModel& m, double x_star);

/// The convex relaxation of unimodal_right_w_bound() with m = (1 - f'(x*))/w.
double convex_unimodal_right_w_bound(const NormalizedModel& m, double x_star);

/// m = (1 - f'(x*)) / w
double contraction_ratio(const NormalizedModel& m, double x_star);

enum class Certificate {
  None,
  MonotoneIncreasing,
  MonotoneDecreasing,
  ConvexDecreasing,
  UnimodalMinLeft,
  UnimodalMinRight,
  ConvexUnimodalRight,
};

std::string to_string(Certificate c);
std::string to_string(ShapeKind k);

struct Condition {
  std::string group;   ///< "common" or the certificate being attempted
  std::string name;
  std::string anchor;  ///< the inequality as checked
  bool holds = false;
  std::vector<std::pair<std::string, double>> values;
};

struct StabilityVerdict {
  Certificate certified_by = Certificate::None;
  std::optional<double> x_star;
  ShapeClass shape;
  std::vector<Condition> checklist;

  bool certified() const noexcept { return certified_by != Certificate::None; }
};

/// Evaluates existence, core invariance, the endpoint 2-cycle exclusion and
/// the shape, then each applicable theorem in order; certifies with the first
/// whose checklist passes.
StabilityVerdict verdict(const NormalizedModel& m);

/// Multi-line human-readable report.
std::string format_report(const NormalizedModel& m, const StabilityVerdict& v);

/// Machine-readable record (JSON text).
std::string verdict_json(const NormalizedModel& m, const StabilityVerdict& v);

}  // namespace gred
