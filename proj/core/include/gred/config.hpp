#pragma once

// JSON run configuration shared by all CLI subcommands:
//
//   {
//     "system":  {"N": 1850, "C": 321000, "d": 0.012, "M": 1, "B": 2000, "K": 1.2247},
//     "control": {"p_max": 0.5, "x_min": 0.2, "x_max": 0.6, "w": 0.15,
//                 "alpha": 1, "beta": 1},
//     "orbit":   {"x0": 0.4, "transient": 500, "samples": 50, "lyapunov_samples": 5000},
//     "scan":    {"w_lo": 0.01, "w_hi": 0.99, "points": 50, "tol": 1e-4,
//                 "delta": 1e-4, "transient": 500, "samples": 50}
//   }
//
// Every section and key is optional; missing keys keep the reference values.
// "system" may also carry "A1" / "A2" to bypass the physical parameters.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gred/sweep.hpp"

namespace gred {

/// Malformed configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
  ModelSpec model;
  std::optional<double> x0;
  std::size_t transient = 500;
  std::size_t samples = 50;
  std::size_t lyapunov_samples = kLyapunovSamples;
  WScan scan;
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);

/// Sets a single key given as "section.key" (e.g. "control.w") or a bare key
/// that is unique across sections (e.g. "w", "N", "alpha").
void set_config_value(RunConfig& cfg, std::string_view key, double value);

}  // namespace gred
