#include "gred/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gred/error.hpp"

namespace gred {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

void ControlParams::validate() const {
  require(p_max > 0.0 && p_max <= 1.0, "control.p_max must lie in (0,1]");
  require(x_min >= 0.0 && x_min < x_max, "control.x_min must satisfy 0 <= x_min < x_max");
  require(x_max <= 1.0, "control.x_max must not exceed 1");
  require(w > 0.0 && w < 1.0, "control.w must lie in (0,1)");
}

NormalizedModel::NormalizedModel(double a1, double a2, const ControlParams& controls,
                                 double theta_l, double theta_r)
    : a1_(a1), a2_(a2), controls_(controls), theta_l_(theta_l), theta_r_(theta_r) {}

NormalizedModel NormalizedModel::from_constants(double a1, double a2,
                                                const ControlParams& controls) {
  controls.validate();
  require(a1 > 0.0 && std::isfinite(a1), "A1 must be positive");
  require(a2 > 0.0 && std::isfinite(a2), "A2 must be positive");
  if (!(a1 < a2 + 1.0)) {
    throw ConstraintError("A1 < A2 + 1 violated (A1 = " + std::to_string(a1) +
                          ", A2 = " + std::to_string(a2) + ")");
  }

  const double width = controls.x_max - controls.x_min;
  const double z1 = (a1 / (a2 + 1.0)) * (a1 / (a2 + 1.0));
  const double z2 = (a1 / a2) * (a1 / a2);
  const double theta_l = width * inc_beta_reg_inv(controls.shape, z1) + controls.x_min;
  const double theta_r = z2 <= 1.0
                             ? width * inc_beta_reg_inv(controls.shape, z2) + controls.x_min
                             : controls.x_max;
  // theta_l can coincide with x_min when I^{-1}(z1) underflows (alpha << 1);
  // the ordering theta_l < theta_r must survive rounding.
  if (!(theta_l < theta_r)) {
    throw ConstraintError("degenerate core: theta_l = " + std::to_string(theta_l) +
                          " is not below theta_r = " + std::to_string(theta_r));
  }
  return NormalizedModel(a1, a2, controls, theta_l, theta_r);
}

NormalizedModel NormalizedModel::with_w(double w) const {
  require(w > 0.0 && w < 1.0, "control.w must lie in (0,1)");
  NormalizedModel copy = *this;
  copy.controls_.w = w;
  return copy;
}

double NormalizedModel::z_of(double x) const {
  const double lo = controls_.x_min;
  const double hi = controls_.x_max;
  if (!(x >= lo && x <= hi)) {
    throw std::domain_error("z_of: x = " + std::to_string(x) + " outside [x_min, x_max]");
  }
  if (x == hi) return 1.0;
  return (x - lo) / (hi - lo);
}

double NormalizedModel::drop_prob(double x) const {
  if (x < controls_.x_min) return 0.0;
  if (x > controls_.x_max) return controls_.p_max;
  return controls_.p_max * inc_beta_reg(controls_.shape, z_of(x));
}

double NormalizedModel::core_value(double x) const {
  const double w = controls_.w;
  const double z = z_of(x);
  if (z == 0.0) return 1.0;  // A1 / sqrt(I) diverges; clamped like every branch
  const double drive = a1_ * std::exp(-0.5 * log_inc_beta_reg(controls_.shape, z)) - a2_;
  return std::clamp((1.0 - w) * x + w * drive, 0.0, 1.0);
}

double NormalizedModel::operator()(double x) const {
  const double w = controls_.w;
  if (x <= theta_l_) return (1.0 - w) * x + w;
  if (x >= theta_r_) return (1.0 - w) * x;
  return core_value(x);
}

double NormalizedModel::value_left_of_theta_r() const noexcept {
  return (1.0 - controls_.w) * theta_r_ + controls_.w * excess();
}

double NormalizedModel::core_derivative(double x) const {
  const double w = controls_.w;
  const double width = controls_.x_max - controls_.x_min;
  const double z = z_of(x);
  const BetaShape& shape = controls_.shape;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  if (z == 0.0) return -kInf;
  double ratio = 0.0;  // I'(z) / I(z)^{3/2}
  if (z == 1.0) {
    if (shape.beta() < 1.0) return -kInf;
    ratio = inc_beta_density(shape, 1.0);
  } else {
    const double log_density = (shape.alpha() - 1.0) * std::log(z) +
                               (shape.beta() - 1.0) * std::log1p(-z) - shape.log_beta();
    ratio = std::exp(log_density - 1.5 * log_inc_beta_reg(shape, z));
  }
  return 1.0 - w * (1.0 + a1_ / (2.0 * width) * ratio);
}

double NormalizedModel::derivative(double x) const {
  if (x <= theta_l_ || x >= theta_r_) return 1.0 - controls_.w;
  return core_derivative(x);
}

double NormalizedModel::derivative(double x, Side side) const {
  if (x == theta_l_) return side == Side::Left ? 1.0 - controls_.w : core_derivative(x);
  if (x == theta_r_) return side == Side::Right ? 1.0 - controls_.w : core_derivative(x);
  return derivative(x);
}

double NormalizedModel::second_derivative(double x) const {
  if (!(x > theta_l_ && x < theta_r_)) {
    throw std::domain_error("second_derivative: x = " + std::to_string(x) +
                            " outside the open core");
  }
  const double width = controls_.x_max - controls_.x_min;
  const double z = z_of(x);
  const BetaShape& shape = controls_.shape;
  const double log_i = log_inc_beta_reg(shape, z);
  const double log_density = (shape.alpha() - 1.0) * std::log(z) +
                             (shape.beta() - 1.0) * std::log1p(-z) - shape.log_beta();
  const double ratio = std::exp(log_density - 1.5 * log_i);
  const double j = std::exp(log_density - log_i);
  const double h = inc_beta_h(shape, z);
  return controls_.w * a1_ / (4.0 * width * width) * ratio * (3.0 * j - 2.0 * h);
}

NormalizedModel normalize(const SystemParams& sys, const ControlParams& controls) {
  sys.validate();
  controls.validate();
  const double a1 = sys.connections * sys.k_const / (std::sqrt(controls.p_max) * sys.buffer);
  const double a2 = sys.capacity * sys.round_trip / (sys.packet_size * sys.buffer);
  return NormalizedModel::from_constants(a1, a2, controls);
}

NormalizedModel make_model(double a1, double a2, const ControlParams& controls) {
  return NormalizedModel::from_constants(a1, a2, controls);
}

std::optional<FixedPoint> fixed_point(const NormalizedModel& m) {
  if (!(m.a1() < m.a2() + m.controls().x_max)) return std::nullopt;

  // g(x) = A1 / sqrt(I(z(x))) - x - A2 is strictly decreasing on the core,
  // positive at theta_l and negative at theta_r.
  auto g = [&m](double x) {
    const double z = m.z_of(x);
    if (z == 0.0) return std::numeric_limits<double>::infinity();
    return m.a1() * std::exp(-0.5 * log_inc_beta_reg(m.shape(), z)) - x - m.a2();
  };
  constexpr double kEdge = 1e-12;
  constexpr double kWidth = 1e-12;
  double lo = m.theta_l() + kEdge;
  double hi = m.theta_r() - kEdge;
  if (!(lo < hi)) {
    lo = m.theta_l();
    hi = m.theta_r();
  }
  while (hi - lo > kWidth) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x_star = 0.5 * (lo + hi);
  return FixedPoint{x_star, std::abs(m(x_star) - x_star)};
}

}  // namespace gred
