#include "gred/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gred {
namespace {

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // lgamma() writes the global signgam
#else
  return std::lgamma(x);
#endif
}

void require_unit_interval(double z, const char* what) {
  if (!(z >= 0.0 && z <= 1.0)) {
    throw std::domain_error(std::string(what) + ": argument " + std::to_string(z) +
                            " outside [0,1]");
  }
}

void require_open_unit_interval(double z, const char* what) {
  if (!(z > 0.0 && z < 1.0)) {
    throw std::domain_error(std::string(what) + ": argument " + std::to_string(z) +
                            " outside (0,1)");
  }
}

// a ln z + b ln(1-z) - ln B(a,b)
double log_front(double a, double b, double log_beta, double z) {
  return a * std::log(z) + b * std::log1p(-z) - log_beta;
}

bool below_switch(double a, double b, double z) { return z < (a + 1.0) / (a + b + 2.0); }

// Adaptive Simpson on [lo, hi].
template <class F>
double simpson_step(const F& f, double lo, double hi, double f_lo, double f_mid, double f_hi,
                    double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid);
  const double rm = 0.5 * (mid + hi);
  const double f_lm = f(lm);
  const double f_rm = f(rm);
  const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
  const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, lo, mid, f_lo, f_lm, f_mid, left, 0.5 * tol, depth - 1) +
         simpson_step(f, mid, hi, f_mid, f_rm, f_hi, right, 0.5 * tol, depth - 1);
}

// Lower-tail inverse, solved for t = ln z by safeguarded Newton on
// ln I(e^t) - ln y.
double lower_inverse(const BetaShape& shape, double y) {
  const double a = shape.alpha();
  const double b = shape.beta();
  const double log_y = std::log(y);

  double t_lo = std::log(std::numeric_limits<double>::min());
  double t_hi = 0.0;
  if (log_inc_beta_reg(shape, std::exp(t_lo)) >= log_y) return 0.0;  // underflows

  // Start from the leading term I ~ z^a / (a B).
  double t = (log_y + std::log(a) + shape.log_beta()) / a;
  if (!(t > t_lo && t < t_hi)) t = 0.5 * (t_lo + t_hi);

  double best_t = t;
  double best_g = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 400; ++iter) {
    const double z = std::exp(t);
    const double log_i = log_inc_beta_reg(shape, z);
    const double g = log_i - log_y;
    if (std::abs(g) < best_g) {
      best_g = std::abs(g);
      best_t = t;
    }
    if (g == 0.0) break;
    if (g < 0.0) {
      t_lo = t;
    } else {
      t_hi = t;
    }
    if (t_hi - t_lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_hi))) {
      break;
    }
    if (std::abs(g) < 1e-15) break;

    // d/dt ln I(e^t) = z J(z)
    const double log_density = (a - 1.0) * t + (b - 1.0) * std::log1p(-z) - shape.log_beta();
    const double slope = std::exp(t + log_density - log_i);
    double next = t - g / slope;
    if (!(next > t_lo && next < t_hi) || !std::isfinite(next)) next = 0.5 * (t_lo + t_hi);
    if (next == t) break;
    t = next;
  }
  return std::exp(best_t);
}

}  // namespace

BetaShape::BetaShape(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0 && beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw std::domain_error("beta shape requires alpha > 0 and beta > 0 (got alpha=" +
                            std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
  }
  log_beta_ = log_gamma(alpha) + log_gamma(beta) - log_gamma(alpha + beta);
}

namespace detail {

bool beta_continued_fraction(double a, double b, double z, double& out) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * z / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * z / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) {
      out = h;
      return true;
    }
  }
  out = h;
  return false;
}

double inc_beta_reg_quadrature(const BetaShape& shape, double z) {
  // With t = u^{1/a}: B(z; a, b) = (1/a) * int_0^{z^a} (1 - u^{1/a})^{b-1} du,
  // which removes the t^{a-1} endpoint singularity.
  const double a = shape.alpha();
  const double b = shape.beta();
  if (z <= 0.0) return 0.0;
  const double upper = std::pow(z, a);
  auto integrand = [a, b](double u) { return std::pow(1.0 - std::pow(u, 1.0 / a), b - 1.0); };
  const double f_lo = integrand(0.0);
  const double f_mid = integrand(0.5 * upper);
  const double f_hi = integrand(upper);
  const double whole = upper / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
  const double integral =
      simpson_step(integrand, 0.0, upper, f_lo, f_mid, f_hi, whole, 1e-15 * upper, 48);
  return integral * std::exp(-shape.log_beta()) / a;
}

}  // namespace detail

double inc_beta_reg(const BetaShape& shape, double z) {
  require_unit_interval(z, "inc_beta_reg");
  if (z == 0.0) return 0.0;
  if (z == 1.0) return 1.0;

  const double a = shape.alpha();
  const double b = shape.beta();
  if (a == 1.0 && b == 1.0) return z;
  if (b == 1.0) return std::exp(a * std::log(z));
  if (a == 1.0) return -std::expm1(b * std::log1p(-z));

  double cf = 0.0;
  if (below_switch(a, b, z)) {
    if (!detail::beta_continued_fraction(a, b, z, cf)) {
      return detail::inc_beta_reg_quadrature(shape, z);
    }
    return std::exp(log_front(a, b, shape.log_beta(), z)) * cf / a;
  }
  const double w = 1.0 - z;
  if (!detail::beta_continued_fraction(b, a, w, cf)) {
    return 1.0 - detail::inc_beta_reg_quadrature(BetaShape(b, a), w);
  }
  return 1.0 - std::exp(log_front(b, a, shape.log_beta(), w)) * cf / b;
}

double log_inc_beta_reg(const BetaShape& shape, double z) {
  if (!(z > 0.0 && z <= 1.0)) {
    throw std::domain_error("log_inc_beta_reg: argument " + std::to_string(z) +
                            " outside (0,1]");
  }
  if (z == 1.0) return 0.0;

  const double a = shape.alpha();
  const double b = shape.beta();
  if (b == 1.0) return a * std::log(z);
  if (a == 1.0) return std::log(-std::expm1(b * std::log1p(-z)));

  double cf = 0.0;
  if (below_switch(a, b, z)) {
    if (!detail::beta_continued_fraction(a, b, z, cf)) {
      return std::log(detail::inc_beta_reg_quadrature(shape, z));
    }
    return log_front(a, b, shape.log_beta(), z) + std::log(cf) - std::log(a);
  }
  return std::log(inc_beta_reg(shape, z));
}

double inc_beta_reg_inv(const BetaShape& shape, double y) {
  require_unit_interval(y, "inc_beta_reg_inv");
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 1.0;
  if (shape.is_uniform()) return y;

  // Solve on the side where z (or 1 - z) is at most 1/2 so that the answer
  // keeps full relative precision near the endpoint.
  if (y <= inc_beta_reg(shape, 0.5)) return lower_inverse(shape, y);
  const BetaShape mirrored(shape.beta(), shape.alpha());
  return 1.0 - lower_inverse(mirrored, 1.0 - y);
}

double inc_beta_density(const BetaShape& shape, double z) {
  require_unit_interval(z, "inc_beta_density");
  const double a = shape.alpha();
  const double b = shape.beta();
  if (z == 0.0 || z == 1.0) {
    const double exponent = (z == 0.0) ? a - 1.0 : b - 1.0;
    if (exponent < 0.0) {
      throw std::domain_error("inc_beta_density: density diverges at z=" + std::to_string(z));
    }
    if (exponent > 0.0) return 0.0;
    // The other factor is 1 at this endpoint unless its own exponent is negative
    // (only possible at the opposite end, which is not this z).
    return std::exp(-shape.log_beta());
  }
  if (a == 1.0 && b == 1.0) return 1.0;
  return std::exp((a - 1.0) * std::log(z) + (b - 1.0) * std::log1p(-z) - shape.log_beta());
}

double inc_beta_j(const BetaShape& shape, double z) {
  require_open_unit_interval(z, "inc_beta_j");
  const double a = shape.alpha();
  const double b = shape.beta();
  const double log_density =
      (a - 1.0) * std::log(z) + (b - 1.0) * std::log1p(-z) - shape.log_beta();
  return std::exp(log_density - log_inc_beta_reg(shape, z));
}

double inc_beta_h(const BetaShape& shape, double z) {
  require_open_unit_interval(z, "inc_beta_h");
  return (shape.alpha() - 1.0) / z - (shape.beta() - 1.0) / (1.0 - z);
}

}  // namespace gred
