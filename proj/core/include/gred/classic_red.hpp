#pragma once

// The original RED drop law and the average-queue map in physical units.
//
// Units: capacity in kB/s, round trip in s, packet size in kB, buffer and
// queue lengths in packets. Queue lengths are real-valued throughout.

#include <cmath>

namespace gred {

/// Physical network parameters of the single-bottleneck setting.
struct SystemParams {
  double connections = 1850.0;   ///< N, number of TCP connections (integral)
  double capacity = 321000.0;    ///< C, link capacity [kB/s]
  double round_trip = 0.012;     ///< d, round-trip time without queuing [s]
  double packet_size = 1.0;      ///< M [kB]
  double buffer = 2000.0;        ///< B [packets] (integral)
  double k_const = std::sqrt(1.5);  ///< K in the square-root throughput law

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// The university-network reference setting used throughout the analyses.
  static SystemParams reference() { return {}; }
};

/// Operator-tunable knobs of classic RED.
struct ClassicControls {
  double q_min = 400.0;
  double q_max = 1200.0;
  double p_max = 0.5;
  double w = 0.15;

  /// Checks 0 <= q_min < q_max <= B, 0 < p_max <= 1, 0 < w < 1.
  void validate(const SystemParams& sys) const;
};

/// Piecewise-linear drop probability of classic RED.
double drop_prob_classic(double q_ave, const ClassicControls& c);

/// (1 - w) q_old + w q_cur
double ewma_update(double q_old_ave, double q_cur, double w);

/// Leading term M K / (sqrt(p) d) of the TCP throughput [kB/s].
/// Throws std::domain_error unless 0 < p <= 1.
double throughput(double p, const SystemParams& sys);

/// p_r = (N M K / (C d))^2: smallest drop probability that empties the queue.
double steady_state_drop_prob(const SystemParams& sys);

/// p_l = (N M K / (B M + C d))^2: largest drop probability that fills the buffer.
double full_buffer_drop_prob(const SystemParams& sys);

/// q_r^ave, saturating at q_max when p_r > p_max.
double empty_queue_threshold(const SystemParams& sys, const ClassicControls& c);

/// q_l^ave.
double full_buffer_threshold(const SystemParams& sys, const ClassicControls& c);

/// Queue length G(p) reached under drop probability p. Throws at p <= 0.
double queue_response(double p, const SystemParams& sys);

/// p_l < p_max, necessary for q_l^ave < q_r^ave.
bool satisfies_drop_constraint(const SystemParams& sys, const ClassicControls& c);

/// One step of the average-queue map on [0, B].
/// Throws ConstraintError when satisfies_drop_constraint() fails.
double average_queue_step(double q_ave, const SystemParams& sys, const ClassicControls& c);

}  // namespace gred
