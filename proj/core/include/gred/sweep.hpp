#pragma once

// Bifurcation diagrams over a scalar parameter, the bifurcation point w_bif of
// the averaging weight, and (alpha, beta) robustness grids. Work items are
// independent and run on a worker pool; results always come back in grid
// order, so output does not depend on the degree of parallelism.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gred/chaos.hpp"
#include "gred/model.hpp"

namespace gred {

/// Everything needed to rebuild a model at any grid point.
struct ModelSpec {
  SystemParams system;
  ControlParams control;
  /// When set, replace the value derived from `system` (and p_max).
  std::optional<double> a1_override;
  std::optional<double> a2_override;

  double a1() const;
  double a2() const;
  NormalizedModel build() const;
};

enum class SweepParam { XMin, XMax, W, PMax, Alpha, Beta, A1, A2, N, D };

std::string_view to_string(SweepParam p);
std::optional<SweepParam> parse_sweep_param(std::string_view name);

/// Copy of `spec` with one parameter replaced. Throws std::domain_error for
/// an invalid shape value.
ModelSpec with_param(ModelSpec spec, SweepParam p, double value);

/// Inclusive, evenly spaced axis lo, ..., hi.
struct SweepAxis {
  SweepParam parameter = SweepParam::XMin;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 2;

  void validate() const;
  double value(std::size_t i) const;
};

struct BifRow {
  double value = 0.0;
  bool skipped = false;
  std::string skip_reason;
  double theta_l = std::numeric_limits<double>::quiet_NaN();
  double theta_r = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> x_star;
  double lyapunov = std::numeric_limits<double>::quiet_NaN();
  double diameter = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> orbit;

  double orbit_min() const;
  double orbit_max() const;
};

struct BifOptions {
  std::size_t transient = 500;
  std::size_t samples = 50;
  std::size_t lyapunov_samples = kLyapunovSamples;
  /// Fixed initial state; default is the core midpoint of each grid point.
  std::optional<double> x0;
  /// Start each point from the previous point's final state (sequential).
  bool continuation = false;
  /// 0 selects default_worker_count().
  std::size_t workers = 0;
};

/// One row per axis value, in axis order. Grid points where the model cannot
/// be built are returned as skipped rows.
std::vector<BifRow> bifurcation_sweep(const ModelSpec& base, const SweepAxis& axis,
                                      const BifOptions& options = {});

/// Computes a single row; used by the sweep and handy for spot checks.
BifRow bifurcation_row(const ModelSpec& spec, double value, const BifOptions& options,
                       std::optional<double> x0_override = std::nullopt);

/// First non-skipped row (scanning forward, or backward when `descending`)
/// whose orbit diameter exceeds `delta`; its axis value.
std::optional<double> first_instability(const std::vector<BifRow>& rows, double delta,
                                        bool descending = false);

/// Settings of the w_bif search.
struct WScan {
  double w_lo = 0.01;
  double w_hi = 0.99;
  std::size_t points = 50;  ///< coarse scan points
  double tol = 1e-4;        ///< bisection tolerance on w
  double delta = 1e-4;      ///< orbit-diameter threshold of the stability predicate
  std::size_t transient = 500;
  std::size_t samples = 50;

  void validate() const;
};

/// Stability predicate: the orbit from the core midpoint has diameter < delta
/// after the transient.
bool stable_at(const NormalizedModel& m, double w, const WScan& scan);

enum class WBifStatus { Found, StableThroughout, UnstableAtLow, Invalid };
std::string_view to_string(WBifStatus s);

struct WBifResult {
  WBifStatus status = WBifStatus::Invalid;
  std::optional<double> w_bif;  ///< smallest failing w after refinement
  std::optional<double> w_stable;  ///< largest w known to pass, within tol of w_bif
  std::string reason;

  std::string status_text() const;
};

WBifResult find_w_bif(const NormalizedModel& m, const WScan& scan);
WBifResult find_w_bif(const ModelSpec& spec, const WScan& scan);

struct GridAxis {
  double lo = 0.002;
  double hi = 1.5;
  std::size_t points = 40;

  double value(std::size_t i) const;
};

struct GridCell {
  double alpha = 0.0;
  double beta = 0.0;
  WBifResult result;
};

/// Row-major (alpha outer, beta inner) grid of w_bif values.
std::vector<GridCell> alpha_beta_grid(const ModelSpec& base, const GridAxis& alpha,
                                      const GridAxis& beta, const WScan& scan,
                                      std::size_t workers = 0);

/// Index of the w_bif band of width 0.15 ([0,0.15) -> 0, [0.15,0.30) -> 1, ...).
int w_bif_band(double w_bif);

/// Worker count from GRED_WORKERS, else the hardware concurrency.
std::size_t default_worker_count();

/// Runs body(i) for i in [0, n) on `workers` threads (0 = default).
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace gred
