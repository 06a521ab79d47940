#pragma once

// Regularized incomplete beta function I_{a,b}(z), its inverse and density,
// plus the two auxiliary ratios used by the convexity criteria of the
// generalized drop law.
//
// All functions are pure and may be called concurrently.

namespace gred {

/// Shape (alpha, beta) of a beta distribution function. Both must be > 0.
class BetaShape {
 public:
  /// Throws std::domain_error unless alpha > 0 and beta > 0 (and finite).
  BetaShape(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  /// ln B(alpha, beta), the complete beta integral.
  double log_beta() const noexcept { return log_beta_; }

  bool is_uniform() const noexcept { return alpha_ == 1.0 && beta_ == 1.0; }

  friend bool operator==(const BetaShape& a, const BetaShape& b) noexcept {
    return a.alpha_ == b.alpha_ && a.beta_ == b.beta_;
  }

 private:
  double alpha_;
  double beta_;
  double log_beta_;
};

/// I_{a,b}(z) for z in [0,1]. Throws std::domain_error outside [0,1].
double inc_beta_reg(const BetaShape& shape, double z);

/// ln I_{a,b}(z) for z in (0,1]; stays finite where I itself underflows.
double log_inc_beta_reg(const BetaShape& shape, double z);

/// z with I_{a,b}(z) = y, for y in [0,1]. Throws std::domain_error outside.
///
/// When the solution lies closer to 0 or 1 than double precision can
/// represent, the nearest representable z is returned.
double inc_beta_reg_inv(const BetaShape& shape, double y);

/// Beta density z^{a-1} (1-z)^{b-1} / B(a,b), the derivative of inc_beta_reg.
/// Accepts the endpoints when the corresponding exponent is >= 0; throws
/// std::domain_error where the density diverges or z is outside [0,1].
double inc_beta_density(const BetaShape& shape, double z);

/// J(z) = density(z) / I(z), for z in (0,1).
double inc_beta_j(const BetaShape& shape, double z);

/// h(z) = (a-1)/z - (b-1)/(1-z), the logarithmic derivative of the density.
double inc_beta_h(const BetaShape& shape, double z);

namespace detail {

// Continued fraction for the incomplete beta (modified Lentz). Returns false
// if it failed to converge.
bool beta_continued_fraction(double a, double b, double z, double& out);

// I_{a,b}(z) for z below the symmetry switch, by adaptive quadrature of the
// substituted integrand. Used when the continued fraction does not converge.
double inc_beta_reg_quadrature(const BetaShape& shape, double z);

}  // namespace detail

}  // namespace gred
