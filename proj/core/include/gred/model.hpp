#pragma once

// The generalized RED map on the normalized average queue length x in [0,1]:
//
//   f(x) = (1-w) x + w                                  0 <= x <= theta_l
//   f(x) = (1-w) x + w (A1 / sqrt(I(z(x))) - A2)        theta_l < x < theta_r
//   f(x) = (1-w) x                                      theta_r <= x <= 1
//
// where I is the regularized incomplete beta function of the drop-law shape
// and z(x) = (x - x_min) / (x_max - x_min). The open interval
// (theta_l, theta_r) is the dynamical core.

#include <optional>

#include "gred/classic_red.hpp"
#include "gred/special.hpp"

namespace gred {

/// Control knobs of the generalized drop law, in normalized units.
struct ControlParams {
  double p_max = 0.5;
  double x_min = 0.2;
  double x_max = 0.6;
  double w = 0.15;
  BetaShape shape{1.0, 1.0};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class Side { Left, Right };

/// Dimensionless model with its derived thresholds. Immutable.
class NormalizedModel {
 public:
  /// Direct construction from A1 and A2.
  ///
  /// Throws std::invalid_argument for invalid controls or A1, A2 <= 0, and
  /// ConstraintError when A1 >= A2 + 1.
  static NormalizedModel from_constants(double a1, double a2, const ControlParams& controls);

  double a1() const noexcept { return a1_; }
  double a2() const noexcept { return a2_; }
  double w() const noexcept { return controls_.w; }
  const ControlParams& controls() const noexcept { return controls_; }
  const BetaShape& shape() const noexcept { return controls_.shape; }
  double theta_l() const noexcept { return theta_l_; }
  double theta_r() const noexcept { return theta_r_; }
  /// True iff A1 <= A2; otherwise f jumps down by w (A1 - A2) at theta_r.
  bool continuous_at_theta_r() const noexcept { return a1_ <= a2_; }
  /// (A1 - A2)^+
  double excess() const noexcept { return a1_ > a2_ ? a1_ - a2_ : 0.0; }

  /// The same model with another averaging weight (thresholds do not depend on w).
  NormalizedModel with_w(double w) const;

  /// Affine position of x within [x_min, x_max]. Throws std::domain_error outside.
  double z_of(double x) const;

  /// Drop probability p_max I(z(x)), 0 below x_min, p_max above x_max.
  double drop_prob(double x) const;

  /// f(x) for x in [0,1]; theta_l belongs to the first branch, theta_r to the third.
  double operator()(double x) const;

  /// f'(x), taking the branch that operator() uses at x.
  double derivative(double x) const;

  /// One-sided derivative. At theta_l (Right) and theta_r (Left) this is the
  /// limit of the core formula; it is -infinity at theta_r when A1 > A2 and
  /// beta < 1.
  double derivative(double x, Side side) const;

  /// f'' on the open core. Throws std::domain_error outside (theta_l, theta_r).
  double second_derivative(double x) const;

  /// lim f(x) as x -> theta_r from the left: (1-w) theta_r + w (A1-A2)^+.
  double value_left_of_theta_r() const noexcept;

  /// Core branch formula, valid on [theta_l, theta_r] (limits at the ends).
  double core_value(double x) const;
  double core_derivative(double x) const;

 private:
  NormalizedModel(double a1, double a2, const ControlParams& controls, double theta_l,
                  double theta_r);

  double a1_;
  double a2_;
  ControlParams controls_;
  double theta_l_;
  double theta_r_;
};

/// A1 = N K / (sqrt(p_max) B), A2 = C d / (M B), then from_constants().
NormalizedModel normalize(const SystemParams& sys, const ControlParams& controls);

/// Same as NormalizedModel::from_constants().
NormalizedModel make_model(double a1, double a2, const ControlParams& controls);

struct FixedPoint {
  double x_star;
  double residual;  ///< |f(x*) - x*|
};

/// The unique fixed point in the core, which exists iff A1 < A2 + x_max.
///
/// Solves A1 / sqrt(I(z(x))) = x + A2 by bisection; the left side is strictly
/// decreasing and the right side strictly increasing on the core. The result
/// does not depend on w.
std::optional<FixedPoint> fixed_point(const NormalizedModel& m);

}  // namespace gred
