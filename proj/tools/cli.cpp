#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "gred/chaos.hpp"
#include "gred/config.hpp"
#include "gred/csv.hpp"
#include "gred/error.hpp"
#include "gred/model.hpp"
#include "gred/stability.hpp"
#include "gred/sweep.hpp"
#include "json.hpp"

namespace gred::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

// Failures of the run itself (I/O), as opposed to bad input.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config keys that can be overridden with a flag of the same name.
constexpr const char* kFlagKeys[] = {"N",     "C",     "d",     "M",      "B",    "K",
                                     "A1",    "A2",    "p_max", "x_min",  "x_max", "w",
                                     "alpha", "beta",  "x0",    "lyapunov_samples", "w_lo",
                                     "w_hi",  "tol",   "delta"};

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> assignments;
  std::map<std::string, double> flags;
  std::optional<double> transient;
  std::optional<double> samples;
  std::string format = "text";
  std::size_t workers = 0;
};

// Registers --config, --set and one flag per overridable key.
void add_common(CLI::App* cmd, CommonOptions& opt, bool with_format) {
  cmd->add_option("-c,--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", opt.assignments, "Override a config key: section.key=value")
      ->take_all();
  for (const char* key : kFlagKeys) {
    const std::string name(key);
    std::string flag = "--" + name;
    if (name.find('_') != std::string::npos) {
      std::string dashed = name;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      flag += ",--" + dashed;
    }
    cmd->add_option_function<double>(
        flag, [&opt, name](double v) { opt.flags[name] = v; }, "Override config key " + name);
  }
  cmd->add_option("--transient", opt.transient, "Transient iterations");
  cmd->add_option("--samples", opt.samples, "Recorded orbit samples");
  if (with_format) {
    cmd->add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));
  }
}

// Loads the config file and applies --set entries, then flags. `orbit_keys`
// selects whether --transient/--samples address the orbit or the scan section.
RunConfig resolve(const CommonOptions& opt, bool orbit_keys) {
  RunConfig cfg = opt.config_path.empty() ? RunConfig{} : load_config(opt.config_path);
  for (const std::string& item : opt.assignments) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--set expects key=value, got '" + item + "'");
    }
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    double value = 0.0;
    std::size_t used = 0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) {
      throw ConfigError("config key '" + key + "' expects a number, got '" + text + "'");
    }
    set_config_value(cfg, key, value);
  }
  for (const auto& [key, value] : opt.flags) set_config_value(cfg, key, value);
  const std::string section = orbit_keys ? "orbit." : "scan.";
  if (opt.transient) set_config_value(cfg, section + "transient", *opt.transient);
  if (opt.samples) set_config_value(cfg, section + "samples", *opt.samples);
  return cfg;
}

ordered_json number_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::string text_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string text_number(std::optional<double> v) { return v ? text_number(*v) : "none"; }

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw RuntimeFailure("cannot open output file '" + path + "'");
  body(file);
  file.flush();
  if (!file) throw RuntimeFailure("failed writing output file '" + path + "'");
}

int cmd_model(const CommonOptions& opt, std::ostream& out) {
  const RunConfig cfg = resolve(opt, true);
  const NormalizedModel m = cfg.model.build();
  const auto fp = fixed_point(m);
  const double p_max = m.controls().p_max;
  if (opt.format == "json") {
    ordered_json j;
    j["A1"] = m.a1();
    j["A2"] = m.a2();
    j["A1_sqrt_p_max"] = m.a1() * std::sqrt(p_max);
    j["theta_l"] = m.theta_l();
    j["theta_r"] = m.theta_r();
    j["x_star"] = number_or_null(fp ? std::optional<double>(fp->x_star) : std::nullopt);
    j["continuous"] = m.continuous_at_theta_r();
    j["jump"] = m.w() * m.excess();
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "A1 = " << text_number(m.a1()) << '\n'
      << "A2 = " << text_number(m.a2()) << '\n'
      << "A1*sqrt(p_max) = " << text_number(m.a1() * std::sqrt(p_max)) << '\n'
      << "theta_l = " << text_number(m.theta_l()) << '\n'
      << "theta_r = " << text_number(m.theta_r()) << '\n'
      << "x_star = " << text_number(fp ? std::optional<double>(fp->x_star) : std::nullopt)
      << '\n'
      << "continuous = " << (m.continuous_at_theta_r() ? "yes" : "no") << '\n';
  if (!m.continuous_at_theta_r()) out << "jump = " << text_number(m.w() * m.excess()) << '\n';
  return kExitOk;
}

int cmd_verdict(const CommonOptions& opt, std::ostream& out) {
  const RunConfig cfg = resolve(opt, true);
  const NormalizedModel m = cfg.model.build();
  const StabilityVerdict v = verdict(m);
  if (opt.format == "json") {
    out << verdict_json(m, v) << '\n';
  } else {
    out << format_report(m, v);
  }
  return kExitOk;
}

int cmd_chaos(const CommonOptions& opt, std::ostream& out) {
  const RunConfig cfg = resolve(opt, true);
  const NormalizedModel m = cfg.model.build();
  const LiYorkeCertificate cert = li_yorke_certificate(m);
  OrbitConfig orbit;
  orbit.x0 = cfg.x0.value_or(0.5 * (m.theta_l() + m.theta_r()));
  orbit.transient = cfg.transient;
  orbit.samples = cfg.lyapunov_samples;
  const double lambda = lyapunov(m, orbit);
  const char* kind = cert.case_kind == LiYorkeCase::CaseI    ? "I"
                     : cert.case_kind == LiYorkeCase::CaseII ? "II"
                                                             : "not applicable";
  if (opt.format == "json") {
    ordered_json j;
    j["case"] = kind;
    j["chaotic"] = cert.certifies_chaos();
    j["continuity_ok"] = cert.continuity_ok;
    j["w_ok"] = cert.w_ok;
    j["x0"] = cert.x0;
    j["orbit"] = cert.orbit;
    j["exact_chain_holds"] = cert.exact_chain_holds;
    j["case1_small_w_flag"] = cert.case1_small_w_flag;
    j["case2_flag"] = cert.case2_flag;
    j["lyapunov"] = number_or_null(lambda);
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "Li-Yorke case = " << kind << '\n'
      << "  A1 <= A2: " << (cert.continuity_ok ? "yes" : "no") << '\n'
      << "  w < 1 - theta_r: " << (cert.w_ok ? "yes" : "no") << '\n';
  if (cert.applicable()) {
    out << "  x0 = " << text_number(cert.x0) << ", f(x0) = " << text_number(cert.orbit[0])
        << ", f2(x0) = " << text_number(cert.orbit[1])
        << ", f3(x0) = " << text_number(cert.orbit[2]) << '\n'
        << "  f3(x0) >= x0 > f(x0) > f2(x0): " << (cert.exact_chain_holds ? "yes" : "no") << '\n'
        << "  case I first-order flag: " << (cert.case1_small_w_flag ? "yes" : "no") << '\n'
        << "  case II flag: " << (cert.case2_flag ? "yes" : "no") << '\n';
  }
  out << "chaotic (period three) = " << (cert.certifies_chaos() ? "yes" : "no") << '\n'
      << "lyapunov = " << text_number(lambda) << '\n';
  return kExitOk;
}

struct BifOptionsCli {
  std::string param;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 2000;
  std::string out_path;
  bool continuation = false;
};

int cmd_bif(const CommonOptions& opt, const BifOptionsCli& bif, std::ostream& out) {
  const RunConfig cfg = resolve(opt, true);
  const auto param = parse_sweep_param(bif.param);
  if (!param) throw ConfigError("unknown sweep parameter '" + bif.param + "' (--param)");
  SweepAxis axis{*param, bif.lo, bif.hi, bif.points};
  axis.validate();
  BifOptions options;
  options.transient = cfg.transient;
  options.samples = cfg.samples;
  options.lyapunov_samples = cfg.lyapunov_samples;
  options.x0 = cfg.x0;
  options.continuation = bif.continuation;
  options.workers = opt.workers;
  if (options.samples < 1) throw ConfigError("orbit.samples must be at least 1");
  const auto rows = bifurcation_sweep(cfg.model, axis, options);
  auto emit = [&](std::ostream& os) { write_bif_csv(os, *param, rows, options.samples); };
  if (bif.out_path.empty()) {
    emit(out);
  } else {
    write_file(bif.out_path, emit);
  }
  return kExitOk;
}

int cmd_wbif(const CommonOptions& opt, std::ostream& out) {
  const RunConfig cfg = resolve(opt, false);
  cfg.scan.validate();
  const NormalizedModel m = cfg.model.build();
  const WBifResult r = find_w_bif(m, cfg.scan);
  if (opt.format == "json") {
    ordered_json j;
    j["status"] = std::string(to_string(r.status));
    j["w_bif"] = number_or_null(r.w_bif);
    j["w_stable"] = number_or_null(r.w_stable);
    j["band"] = r.w_bif ? ordered_json(w_bif_band(*r.w_bif)) : ordered_json(nullptr);
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "status = " << r.status_text() << '\n'
      << "w_bif = " << text_number(r.w_bif) << '\n'
      << "w_stable = " << text_number(r.w_stable) << '\n';
  return kExitOk;
}

struct GridOptionsCli {
  std::size_t points = 40;
  double lo = 0.002;
  double hi = 1.5;
  std::vector<double> n_values;
  std::string out_path;
  std::string out_dir;
};

int cmd_grid(const CommonOptions& opt, const GridOptionsCli& grid, std::ostream& out) {
  const RunConfig cfg = resolve(opt, false);
  cfg.scan.validate();
  if (!(grid.lo > 0.0 && grid.lo <= grid.hi)) {
    throw ConfigError("grid range requires 0 < --lo <= --hi");
  }
  if (grid.points < 1) throw ConfigError("--points must be at least 1");
  std::vector<double> n_values = grid.n_values;
  if (n_values.empty()) n_values.push_back(cfg.model.system.connections);
  if (n_values.size() > 1 && grid.out_dir.empty()) {
    throw ConfigError("--n-values with more than one value requires --out-dir");
  }
  if (!grid.out_dir.empty() && !grid.out_path.empty()) {
    throw ConfigError("--out and --out-dir are mutually exclusive");
  }
  // Validate every base model before the long run starts.
  for (double n : n_values) {
    ModelSpec spec = cfg.model;
    spec.system.connections = n;
    spec.system.validate();
  }
  const GridAxis axis{grid.lo, grid.hi, grid.points};
  if (!grid.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(grid.out_dir, ec);
    if (ec) throw RuntimeFailure("cannot create directory '" + grid.out_dir + "': " + ec.message());
  }
  for (double n : n_values) {
    ModelSpec spec = cfg.model;
    spec.system.connections = n;
    const auto cells = alpha_beta_grid(spec, axis, axis, cfg.scan, opt.workers);
    auto emit = [&](std::ostream& os) { write_grid_csv(os, cells); };
    if (!grid.out_dir.empty()) {
      std::ostringstream name;
      name << "grid_N" << format_number(n) << ".csv";
      write_file((std::filesystem::path(grid.out_dir) / name.str()).string(), emit);
    } else if (!grid.out_path.empty()) {
      write_file(grid.out_path, emit);
    } else {
      emit(out);
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized RED model: stability, chaos and bifurcation analysis", "gred"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  CommonOptions model_opt;
  CommonOptions verdict_opt;
  CommonOptions chaos_opt;
  CommonOptions bif_opt;
  CommonOptions wbif_opt;
  CommonOptions grid_opt;
  BifOptionsCli bif;
  GridOptionsCli grid;

  auto* model = app.add_subcommand("model", "Print A1, A2, the core and the fixed point");
  add_common(model, model_opt, true);

  auto* verd = app.add_subcommand("verdict", "Global-stability checklist");
  add_common(verd, verdict_opt, true);

  auto* chaos = app.add_subcommand("chaos", "Li-Yorke certificate and Lyapunov exponent");
  add_common(chaos, chaos_opt, true);

  auto* bif_cmd = app.add_subcommand("bif", "Bifurcation diagram as CSV");
  add_common(bif_cmd, bif_opt, false);
  bif_cmd->add_option("--param", bif.param, "Swept parameter")
      ->required()
      ->check(CLI::IsMember({"x_min", "x_max", "w", "p_max", "alpha", "beta", "A1", "A2", "N", "d"}));
  bif_cmd->add_option("--lo", bif.lo, "Axis start")->required();
  bif_cmd->add_option("--hi", bif.hi, "Axis end")->required();
  bif_cmd->add_option("--points", bif.points, "Axis points (inclusive)")->capture_default_str();
  bif_cmd->add_option("-o,--out", bif.out_path, "Output CSV (default stdout)");
  bif_cmd->add_flag("--continuation", bif.continuation,
                    "Start each point from the previous point's final state");
  bif_cmd->add_option("--workers", bif_opt.workers, "Worker threads (0 = auto)");

  auto* wbif = app.add_subcommand("wbif", "Bifurcation value of the averaging weight");
  add_common(wbif, wbif_opt, true);

  auto* grid_cmd = app.add_subcommand("grid", "(alpha, beta) grid of w_bif as CSV");
  add_common(grid_cmd, grid_opt, false);
  grid_cmd->add_option("--points", grid.points, "Points per axis")->capture_default_str();
  grid_cmd->add_option("--lo", grid.lo, "Lower end of both shape axes")->capture_default_str();
  grid_cmd->add_option("--hi", grid.hi, "Upper end of both shape axes")->capture_default_str();
  grid_cmd->add_option("--n-values", grid.n_values, "Connection counts, one CSV each")
      ->delimiter(',');
  grid_cmd->add_option("-o,--out", grid.out_path, "Output CSV (single N)");
  grid_cmd->add_option("--out-dir", grid.out_dir, "Directory for grid_N<N>.csv files");
  grid_cmd->add_option("--workers", grid_opt.workers, "Worker threads (0 = auto)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (model->parsed()) return cmd_model(model_opt, out);
    if (verd->parsed()) return cmd_verdict(verdict_opt, out);
    if (chaos->parsed()) return cmd_chaos(chaos_opt, out);
    if (bif_cmd->parsed()) return cmd_bif(bif_opt, bif, out);
    if (wbif->parsed()) return cmd_wbif(wbif_opt, out);
    if (grid_cmd->parsed()) return cmd_grid(grid_opt, grid, out);
  } catch (const RuntimeFailure& e) {
    err << "gred: error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const ConfigError& e) {
    err << "gred: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "gred: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "gred: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "gred: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << "gred: no subcommand\n";
  return kExitConfig;
}

}  // namespace gred::cli
