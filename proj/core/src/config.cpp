#include "gred/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace gred {
namespace {

using Setter = std::function<void(RunConfig&, double)>;

struct KeyEntry {
  std::string_view section;
  std::string_view key;
  Setter set;
};

std::size_t as_count(double v, std::string_view key) {
  if (!(v >= 0.0) || std::floor(v) != v || v > 1e12) {
    throw ConfigError(std::string(key) + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

const std::vector<KeyEntry>& key_table() {
  static const std::vector<KeyEntry> table = {
      {"system", "N", [](RunConfig& c, double v) { c.model.system.connections = v; }},
      {"system", "C", [](RunConfig& c, double v) { c.model.system.capacity = v; }},
      {"system", "d", [](RunConfig& c, double v) { c.model.system.round_trip = v; }},
      {"system", "M", [](RunConfig& c, double v) { c.model.system.packet_size = v; }},
      {"system", "B", [](RunConfig& c, double v) { c.model.system.buffer = v; }},
      {"system", "K", [](RunConfig& c, double v) { c.model.system.k_const = v; }},
      {"system", "A1", [](RunConfig& c, double v) { c.model.a1_override = v; }},
      {"system", "A2", [](RunConfig& c, double v) { c.model.a2_override = v; }},
      {"control", "p_max", [](RunConfig& c, double v) { c.model.control.p_max = v; }},
      {"control", "x_min", [](RunConfig& c, double v) { c.model.control.x_min = v; }},
      {"control", "x_max", [](RunConfig& c, double v) { c.model.control.x_max = v; }},
      {"control", "w", [](RunConfig& c, double v) { c.model.control.w = v; }},
      {"control", "alpha",
       [](RunConfig& c, double v) {
         c.model.control.shape = BetaShape(v, c.model.control.shape.beta());
       }},
      {"control", "beta",
       [](RunConfig& c, double v) {
         c.model.control.shape = BetaShape(c.model.control.shape.alpha(), v);
       }},
      {"orbit", "x0", [](RunConfig& c, double v) { c.x0 = v; }},
      {"orbit", "transient",
       [](RunConfig& c, double v) { c.transient = as_count(v, "orbit.transient"); }},
      {"orbit", "samples",
       [](RunConfig& c, double v) { c.samples = as_count(v, "orbit.samples"); }},
      {"orbit", "lyapunov_samples",
       [](RunConfig& c, double v) {
         c.lyapunov_samples = as_count(v, "orbit.lyapunov_samples");
       }},
      {"scan", "w_lo", [](RunConfig& c, double v) { c.scan.w_lo = v; }},
      {"scan", "w_hi", [](RunConfig& c, double v) { c.scan.w_hi = v; }},
      {"scan", "points",
       [](RunConfig& c, double v) { c.scan.points = as_count(v, "scan.points"); }},
      {"scan", "tol", [](RunConfig& c, double v) { c.scan.tol = v; }},
      {"scan", "delta", [](RunConfig& c, double v) { c.scan.delta = v; }},
      {"scan", "transient",
       [](RunConfig& c, double v) { c.scan.transient = as_count(v, "scan.transient"); }},
      {"scan", "samples",
       [](RunConfig& c, double v) { c.scan.samples = as_count(v, "scan.samples"); }},
  };
  return table;
}

void apply(const KeyEntry& entry, RunConfig& cfg, double value) {
  const std::string name = std::string(entry.section) + "." + std::string(entry.key);
  if (!std::isfinite(value)) throw ConfigError(name + " must be a finite number");
  try {
    entry.set(cfg, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig cfg;
  for (const auto& [section, body] : doc.items()) {
    if (section != "system" && section != "control" && section != "orbit" && section != "scan") {
      throw ConfigError("unknown config section '" + section + "'");
    }
    if (!body.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      const auto& table = key_table();
      auto it = std::find_if(table.begin(), table.end(), [&](const KeyEntry& e) {
        return e.section == section && e.key == key;
      });
      if (it == table.end()) throw ConfigError("unknown config key '" + section + "." + key + "'");
      if (!value.is_number()) {
        throw ConfigError("config key '" + section + "." + key + "' must be a number");
      }
      apply(*it, cfg, value.get<double>());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void set_config_value(RunConfig& cfg, std::string_view key, double value) {
  const auto& table = key_table();
  const KeyEntry* match = nullptr;
  const auto dot = key.find('.');
  for (const KeyEntry& e : table) {
    const bool hit = dot == std::string_view::npos
                         ? e.key == key
                         : (e.section == key.substr(0, dot) && e.key == key.substr(dot + 1));
    if (!hit) continue;
    if (match) throw ConfigError("ambiguous config key '" + std::string(key) + "'");
    match = &e;
  }
  if (!match) throw ConfigError("unknown config key '" + std::string(key) + "'");
  apply(*match, cfg, value);
}

}  // namespace gred
