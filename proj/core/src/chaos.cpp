#include "gred/chaos.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gred {
namespace {

constexpr double kKinkSkip = 1e-9;

}  // namespace

void OrbitConfig::validate() const {
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw std::invalid_argument("orbit.x0 must lie in [0,1]");
  if (samples < 1) throw std::invalid_argument("orbit.samples must be at least 1");
}

std::vector<double> iterate(const NormalizedModel& m, const OrbitConfig& cfg) {
  cfg.validate();
  double x = cfg.x0;
  for (std::size_t i = 0; i < cfg.transient; ++i) x = m(x);
  std::vector<double> states;
  states.reserve(cfg.samples);
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    x = m(x);
    states.push_back(x);
  }
  return states;
}

double lyapunov_along(const NormalizedModel& m, const std::vector<double>& states) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (double x : states) {
    if (std::abs(x - m.theta_l()) < kKinkSkip || std::abs(x - m.theta_r()) < kKinkSkip) continue;
    const double slope = std::abs(m.derivative(x));
    if (slope == 0.0) return -std::numeric_limits<double>::infinity();
    sum += std::log(slope);
    ++counted;
  }
  if (counted == 0) return std::numeric_limits<double>::quiet_NaN();
  return sum / static_cast<double>(counted);
}

double lyapunov(const NormalizedModel& m, const OrbitConfig& cfg) {
  return lyapunov_along(m, iterate(m, cfg));
}

LiYorkeCertificate li_yorke_certificate(const NormalizedModel& m) {
  LiYorkeCertificate cert;
  const double w = m.w();
  const double tl = m.theta_l();
  const double tr = m.theta_r();
  cert.continuity_ok = m.continuous_at_theta_r();
  cert.w_ok = w < 1.0 - tr;
  if (!cert.continuity_ok || !cert.w_ok) return cert;

  cert.x0 = tr / (1.0 - w);
  cert.orbit[0] = m(cert.x0);
  cert.orbit[1] = m(cert.orbit[0]);
  cert.orbit[2] = m(cert.orbit[1]);

  // f^2(x0) = (1-w) theta_r lies above theta_l in Case I.
  cert.case_kind = w < (tr - tl) / tr ? LiYorkeCase::CaseI : LiYorkeCase::CaseII;
  cert.exact_chain_holds = cert.orbit[2] >= cert.x0 && cert.x0 > cert.orbit[0] &&
                           cert.orbit[0] > cert.orbit[1];
  const double i_r = inc_beta_reg(m.shape(), m.z_of(tr));
  cert.case1_small_w_flag = tr * std::sqrt(i_r) <= m.a1() / 3.0;
  cert.case2_flag = tr <= (1.0 - w) / (3.0 - w + w * w);
  return cert;
}

}  // namespace gred
