#include "gred/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <thread>

namespace gred {

double ModelSpec::a1() const {
  if (a1_override) return *a1_override;
  return system.connections * system.k_const / (std::sqrt(control.p_max) * system.buffer);
}

double ModelSpec::a2() const {
  if (a2_override) return *a2_override;
  return system.capacity * system.round_trip / (system.packet_size * system.buffer);
}

NormalizedModel ModelSpec::build() const {
  if (!a1_override || !a2_override) system.validate();
  return NormalizedModel::from_constants(a1(), a2(), control);
}

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::XMin: return "x_min";
    case SweepParam::XMax: return "x_max";
    case SweepParam::W: return "w";
    case SweepParam::PMax: return "p_max";
    case SweepParam::Alpha: return "alpha";
    case SweepParam::Beta: return "beta";
    case SweepParam::A1: return "A1";
    case SweepParam::A2: return "A2";
    case SweepParam::N: return "N";
    case SweepParam::D: return "d";
  }
  return "?";
}

std::optional<SweepParam> parse_sweep_param(std::string_view name) {
  for (SweepParam p : {SweepParam::XMin, SweepParam::XMax, SweepParam::W, SweepParam::PMax,
                       SweepParam::Alpha, SweepParam::Beta, SweepParam::A1, SweepParam::A2,
                       SweepParam::N, SweepParam::D}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

ModelSpec with_param(ModelSpec spec, SweepParam p, double value) {
  switch (p) {
    case SweepParam::XMin: spec.control.x_min = value; break;
    case SweepParam::XMax: spec.control.x_max = value; break;
    case SweepParam::W: spec.control.w = value; break;
    case SweepParam::PMax: spec.control.p_max = value; break;
    case SweepParam::Alpha: spec.control.shape = BetaShape(value, spec.control.shape.beta()); break;
    case SweepParam::Beta: spec.control.shape = BetaShape(spec.control.shape.alpha(), value); break;
    case SweepParam::A1: spec.a1_override = value; break;
    case SweepParam::A2: spec.a2_override = value; break;
    case SweepParam::N: spec.system.connections = value; break;
    case SweepParam::D: spec.system.round_trip = value; break;
  }
  return spec;
}

void SweepAxis::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("sweep axis requires lo < hi");
  if (points < 2) throw std::invalid_argument("sweep axis requires at least 2 points");
}

double SweepAxis::value(std::size_t i) const {
  if (i + 1 == points) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

double BifRow::orbit_min() const {
  return orbit.empty() ? std::numeric_limits<double>::quiet_NaN()
                       : *std::min_element(orbit.begin(), orbit.end());
}

double BifRow::orbit_max() const {
  return orbit.empty() ? std::numeric_limits<double>::quiet_NaN()
                       : *std::max_element(orbit.begin(), orbit.end());
}

BifRow bifurcation_row(const ModelSpec& spec, double value, const BifOptions& options,
                       std::optional<double> x0_override) {
  BifRow row;
  row.value = value;
  try {
    const NormalizedModel m = spec.build();
    row.theta_l = m.theta_l();
    row.theta_r = m.theta_r();
    if (auto fp = fixed_point(m)) row.x_star = fp->x_star;

    double x = x0_override.value_or(options.x0.value_or(0.5 * (m.theta_l() + m.theta_r())));
    for (std::size_t i = 0; i < options.transient; ++i) x = m(x);
    const std::size_t tracked = std::max(options.samples, options.lyapunov_samples);
    std::vector<double> states;
    states.reserve(tracked);
    for (std::size_t i = 0; i < tracked; ++i) {
      x = m(x);
      states.push_back(x);
    }
    row.orbit.assign(states.begin(), states.begin() + static_cast<std::ptrdiff_t>(options.samples));
    row.diameter = row.orbit_max() - row.orbit_min();
    row.lyapunov = lyapunov_along(m, states);
  } catch (const std::exception& e) {
    row.skipped = true;
    row.skip_reason = e.what();
    row.orbit.clear();
  }
  return row;
}

std::vector<BifRow> bifurcation_sweep(const ModelSpec& base, const SweepAxis& axis,
                                      const BifOptions& options) {
  axis.validate();
  if (options.samples < 1) throw std::invalid_argument("orbit.samples must be at least 1");
  std::vector<BifRow> rows(axis.points);
  auto make_row = [&](std::size_t i, std::optional<double> x0) {
    const double value = axis.value(i);
    try {
      return bifurcation_row(with_param(base, axis.parameter, value), value, options, x0);
    } catch (const std::exception& e) {
      BifRow row;
      row.value = value;
      row.skipped = true;
      row.skip_reason = e.what();
      return row;
    }
  };

  if (options.continuation) {
    std::optional<double> carry;
    for (std::size_t i = 0; i < axis.points; ++i) {
      rows[i] = make_row(i, carry);
      if (!rows[i].skipped) carry = rows[i].orbit.back();
    }
    return rows;
  }
  parallel_for(axis.points, options.workers,
               [&](std::size_t i) { rows[i] = make_row(i, std::nullopt); });
  return rows;
}

std::optional<double> first_instability(const std::vector<BifRow>& rows, double delta,
                                        bool descending) {
  auto unstable = [delta](const BifRow& r) { return !r.skipped && r.diameter > delta; };
  if (descending) {
    auto it = std::find_if(rows.rbegin(), rows.rend(), unstable);
    if (it != rows.rend()) return it->value;
  } else {
    auto it = std::find_if(rows.begin(), rows.end(), unstable);
    if (it != rows.end()) return it->value;
  }
  return std::nullopt;
}

void WScan::validate() const {
  if (!(w_lo > 0.0 && w_lo < w_hi && w_hi < 1.0)) {
    throw std::invalid_argument("scan requires 0 < w_lo < w_hi < 1");
  }
  if (points < 2) throw std::invalid_argument("scan.points must be at least 2");
  if (!(tol > 0.0)) throw std::invalid_argument("scan.tol must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("scan.delta must be positive");
  if (samples < 1) throw std::invalid_argument("scan.samples must be at least 1");
}

bool stable_at(const NormalizedModel& m, double w, const WScan& scan) {
  const NormalizedModel mw = m.with_w(w);
  double x = 0.5 * (mw.theta_l() + mw.theta_r());
  for (std::size_t i = 0; i < scan.transient; ++i) x = mw(x);
  double lo = x;
  double hi = x;
  for (std::size_t i = 1; i < scan.samples; ++i) {
    x = mw(x);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi - lo < scan.delta;
}

std::string_view to_string(WBifStatus s) {
  switch (s) {
    case WBifStatus::Found: return "found";
    case WBifStatus::StableThroughout: return "stable_throughout";
    case WBifStatus::UnstableAtLow: return "unstable_at_w_lo";
    case WBifStatus::Invalid: return "invalid";
  }
  return "invalid";
}

std::string WBifResult::status_text() const {
  std::string text(to_string(status));
  if (!reason.empty()) text += ": " + reason;
  return text;
}

WBifResult find_w_bif(const NormalizedModel& m, const WScan& scan) {
  scan.validate();
  WBifResult out;
  auto coarse = [&scan](std::size_t i) {
    if (i + 1 == scan.points) return scan.w_hi;
    return scan.w_lo +
           (scan.w_hi - scan.w_lo) * static_cast<double>(i) / static_cast<double>(scan.points - 1);
  };
  if (!stable_at(m, scan.w_lo, scan)) {
    out.status = WBifStatus::UnstableAtLow;
    return out;
  }
  for (std::size_t i = 1; i < scan.points; ++i) {
    const double w = coarse(i);
    if (stable_at(m, w, scan)) continue;
    double lo = coarse(i - 1);
    double hi = w;
    while (hi - lo > scan.tol) {
      const double mid = 0.5 * (lo + hi);
      if (stable_at(m, mid, scan)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.status = WBifStatus::Found;
    out.w_bif = hi;
    out.w_stable = lo;
    return out;
  }
  out.status = WBifStatus::StableThroughout;
  return out;
}

WBifResult find_w_bif(const ModelSpec& spec, const WScan& scan) {
  try {
    return find_w_bif(spec.build(), scan);
  } catch (const std::invalid_argument& e) {
    WBifResult out;
    out.status = WBifStatus::Invalid;
    out.reason = e.what();
    return out;
  } catch (const std::domain_error& e) {
    WBifResult out;
    out.status = WBifStatus::Invalid;
    out.reason = e.what();
    return out;
  }
}

double GridAxis::value(std::size_t i) const {
  if (points <= 1) return lo;
  if (i + 1 == points) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

std::vector<GridCell> alpha_beta_grid(const ModelSpec& base, const GridAxis& alpha,
                                      const GridAxis& beta, const WScan& scan,
                                      std::size_t workers) {
  scan.validate();
  if (alpha.points < 1 || beta.points < 1) {
    throw std::invalid_argument("grid requires at least one point per axis");
  }
  std::vector<GridCell> cells(alpha.points * beta.points);
  parallel_for(cells.size(), workers, [&](std::size_t k) {
    GridCell& cell = cells[k];
    cell.alpha = alpha.value(k / beta.points);
    cell.beta = beta.value(k % beta.points);
    try {
      ModelSpec spec = base;
      spec.control.shape = BetaShape(cell.alpha, cell.beta);
      cell.result = find_w_bif(spec, scan);
    } catch (const std::exception& e) {
      cell.result.status = WBifStatus::Invalid;
      cell.result.reason = e.what();
    }
  });
  return cells;
}

int w_bif_band(double w_bif) { return static_cast<int>(std::floor(w_bif / 0.15)); }

std::size_t default_worker_count() {
  if (const char* env = std::getenv("GRED_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<std::size_t>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = default_worker_count();
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto run = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      if (failed.load()) return;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace gred
