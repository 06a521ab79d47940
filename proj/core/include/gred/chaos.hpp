#pragma once

// Orbits, Lyapunov exponents and Li-Yorke chaos certificates for the
// generalized RED map.

#include <array>
#include <cstddef>
#include <vector>

#include "gred/model.hpp"

namespace gred {

struct OrbitConfig {
  double x0 = 0.5;
  std::size_t transient = 500;
  std::size_t samples = 50;

  /// Throws std::invalid_argument unless x0 in [0,1] and samples >= 1.
  void validate() const;
};

/// Sample count used for Lyapunov estimates by default (longer than the
/// diagram sample to reduce variance).
inline constexpr std::size_t kLyapunovSamples = 5000;

/// States x_{transient+1} .. x_{transient+samples} of x_{n+1} = f(x_n).
std::vector<double> iterate(const NormalizedModel& m, const OrbitConfig& cfg);

/// Mean of ln|f'(x_n)| over the post-transient states, skipping states within
/// 1e-9 of theta_l or theta_r. Returns -infinity if f'(x_n) = 0 is met.
double lyapunov(const NormalizedModel& m, const OrbitConfig& cfg);

/// Same estimator over a state sequence that was already computed.
double lyapunov_along(const NormalizedModel& m, const std::vector<double>& states);

enum class LiYorkeCase { NotApplicable, CaseI, CaseII };

struct LiYorkeCertificate {
  LiYorkeCase case_kind = LiYorkeCase::NotApplicable;
  double x0 = 0.0;
  std::array<double, 3> orbit{};   ///< f(x0), f^2(x0), f^3(x0)
  bool continuity_ok = false;      ///< A1 <= A2
  bool w_ok = false;               ///< w < 1 - theta_r
  bool exact_chain_holds = false;  ///< f^3(x0) >= x0 > f(x0) > f^2(x0)
  /// theta_r sqrt(I(z(theta_r))) <= A1/3; a first-order-in-w sufficient
  /// condition for Case I, reported only.
  bool case1_small_w_flag = false;
  /// theta_r <= (1-w)/(3-w+w^2), the exact Case II condition.
  bool case2_flag = false;

  bool applicable() const noexcept { return case_kind != LiYorkeCase::NotApplicable; }
  /// Chaos in the sense of Li-Yorke is asserted only through the exact chain.
  bool certifies_chaos() const noexcept { return applicable() && exact_chain_holds; }
};

/// Checks the period-3-type chain from x0 = theta_r / (1 - w). Requires a
/// continuous map (A1 <= A2) and w < 1 - theta_r; otherwise not applicable.
LiYorkeCertificate li_yorke_certificate(const NormalizedModel& m);

}  // namespace gred
