#include "gred/classic_red.hpp"

#include <stdexcept>
#include <string>

#include "gred/error.hpp"

namespace gred {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

bool is_integral(double v) { return std::floor(v) == v; }

double square(double v) { return v * v; }

}  // namespace

void SystemParams::validate() const {
  require(connections > 0.0 && is_integral(connections), "system.N must be a positive integer");
  require(capacity > 0.0 && std::isfinite(capacity), "system.C must be positive");
  require(round_trip > 0.0 && std::isfinite(round_trip), "system.d must be positive");
  require(packet_size > 0.0 && std::isfinite(packet_size), "system.M must be positive");
  require(buffer > 0.0 && is_integral(buffer), "system.B must be a positive integer");
  require(k_const > 0.0 && std::isfinite(k_const), "system.K must be positive");
}

void ClassicControls::validate(const SystemParams& sys) const {
  require(q_min >= 0.0 && q_min < q_max, "control.q_min must satisfy 0 <= q_min < q_max");
  require(q_max <= sys.buffer, "control.q_max must not exceed the buffer size");
  require(p_max > 0.0 && p_max <= 1.0, "control.p_max must lie in (0,1]");
  require(w > 0.0 && w < 1.0, "control.w must lie in (0,1)");
}

double drop_prob_classic(double q_ave, const ClassicControls& c) {
  if (q_ave < c.q_min) return 0.0;
  if (q_ave > c.q_max) return 1.0;
  return c.p_max * (q_ave - c.q_min) / (c.q_max - c.q_min);
}

double ewma_update(double q_old_ave, double q_cur, double w) {
  return (1.0 - w) * q_old_ave + w * q_cur;
}

double throughput(double p, const SystemParams& sys) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::domain_error("throughput: drop probability " + std::to_string(p) +
                            " outside (0,1]");
  }
  return sys.packet_size * sys.k_const / (std::sqrt(p) * sys.round_trip);
}

double steady_state_drop_prob(const SystemParams& sys) {
  return square(sys.connections * sys.packet_size * sys.k_const /
                (sys.capacity * sys.round_trip));
}

double full_buffer_drop_prob(const SystemParams& sys) {
  return square(sys.connections * sys.packet_size * sys.k_const /
                (sys.buffer * sys.packet_size + sys.capacity * sys.round_trip));
}

double empty_queue_threshold(const SystemParams& sys, const ClassicControls& c) {
  const double p_r = steady_state_drop_prob(sys);
  if (p_r <= c.p_max) return (c.q_max - c.q_min) / c.p_max * p_r + c.q_min;
  return c.q_max;
}

double full_buffer_threshold(const SystemParams& sys, const ClassicControls& c) {
  return (c.q_max - c.q_min) / c.p_max * full_buffer_drop_prob(sys) + c.q_min;
}

double queue_response(double p, const SystemParams& sys) {
  if (!(p > 0.0)) {
    throw std::domain_error("queue_response: drop probability must be positive");
  }
  if (p <= full_buffer_drop_prob(sys)) return sys.buffer;
  if (p >= steady_state_drop_prob(sys)) return 0.0;
  return sys.connections * sys.k_const / std::sqrt(p) -
         sys.capacity * sys.round_trip / sys.packet_size;
}

bool satisfies_drop_constraint(const SystemParams& sys, const ClassicControls& c) {
  return full_buffer_drop_prob(sys) < c.p_max;
}

double average_queue_step(double q_ave, const SystemParams& sys, const ClassicControls& c) {
  if (!satisfies_drop_constraint(sys, c)) {
    throw ConstraintError("drop constraint violated: p_l = " +
                          std::to_string(full_buffer_drop_prob(sys)) +
                          " >= p_max = " + std::to_string(c.p_max));
  }
  const double q_l = full_buffer_threshold(sys, c);
  const double q_r = empty_queue_threshold(sys, c);
  if (q_ave <= q_l) return (1.0 - c.w) * q_ave + c.w * sys.buffer;
  if (q_ave >= q_r) return (1.0 - c.w) * q_ave;
  const double p = (q_ave - c.q_min) / (c.q_max - c.q_min) * c.p_max;
  return (1.0 - c.w) * q_ave +
         c.w * (sys.connections * sys.k_const / std::sqrt(p) -
                sys.capacity * sys.round_trip / sys.packet_size);
}

}  // namespace gred
