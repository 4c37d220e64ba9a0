#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lumped_pid/analysis.hpp"
#include "lumped_pid/config.hpp"
#include "lumped_pid/controller.hpp"
#include "lumped_pid/error.hpp"
#include "lumped_pid/scenario.hpp"
#include "lumped_pid/svg_plot.hpp"
#include "lumped_pid/sweep.hpp"

namespace fs = std::filesystem;
using namespace lumped_pid;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kDiverged = 3, kPartialSweep = 4 };

bool is_config_kind(ErrorKind k) {
  switch (k) {
    case ErrorKind::kInvalidConfig:
    case ErrorKind::kParse:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kOrderMismatch:
      return true;
    default:
      return false;
  }
}

Scenario load_scenario(const std::string& path) {
  Scenario sc = scenario_from_config(Config::from_file(path));
  if (const char* env = std::getenv("LUMPED_PID_SEED")) {
    Config tmp;
    tmp.set("LUMPED_PID_SEED", env);
    sc.set_seed(tmp.get_u64("LUMPED_PID_SEED", 0));
  }
  return sc;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(ErrorKind::kInvalidConfig, "cannot write '" + p.string() + "'");
  return os;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorKind::kInvalidConfig, "--out: cannot create directory '" + dir.string() + "'");
}

std::string g(double v) { return format_double(v); }

int cmd_tune(const std::string& config_path, const std::string& format, const std::string& out_path) {
  const Scenario sc = load_scenario(config_path);
  const auto* chain = std::get_if<ChainScenario>(&sc.setup);
  if (!chain) throw Error(ErrorKind::kInvalidConfig, "plant.kind: tune needs an integrator plant");
  const ControllerConfig& cfg = chain->controller;
  const auto gains = synthesize_gains(cfg.order, cfg.omega);
  std::optional<ClassicPidGains> pid;
  if (cfg.order == 1) pid = reduce_to_pi(cfg);
  if (cfg.order == 2) pid = reduce_to_pid(cfg);

  std::ostringstream os;
  if (format == "csv") {
    os << "n,b,omega,omega_f";
    for (int i = 0; i < cfg.order; ++i) os << ",a" << i;
    os << ",kp,ki,kd,kp_over_b,ki_over_b,kd_over_b\n";
    os << cfg.order << ',' << g(cfg.b) << ',' << g(cfg.omega) << ',' << g(cfg.omega_f);
    for (double a : gains.a) os << ',' << g(a);
    if (pid) {
      const auto post = pid->divided_by(cfg.b);
      os << ',' << g(pid->kp) << ',' << g(pid->ki) << ',' << (pid->kd ? g(*pid->kd) : "") << ',' << g(post.kp) << ','
         << g(post.ki) << ',' << (post.kd ? g(*post.kd) : "");
    } else {
      os << ",,,,,,";
    }
    os << '\n';
  } else if (format == "text") {
    os << "order n    " << cfg.order << '\n'
       << "b          " << g(cfg.b) << '\n'
       << "omega      " << g(cfg.omega) << '\n'
       << "omega_f    " << g(cfg.omega_f) << '\n'
       << "homogeneous gains (u_x = -sum a_i x^(i)):\n";
    for (int i = 0; i < cfg.order; ++i) os << "  a" << i << " = " << g(gains.a[i]) << '\n';
    if (pid) {
      const auto post = pid->divided_by(cfg.b);
      const char* name = cfg.order == 1 ? "PI" : "PID";
      os << "classic " << name << " gains:\n"
         << "  kp = " << g(pid->kp) << "  (kp/b = " << g(post.kp) << ")\n"
         << "  ki = " << g(pid->ki) << "  (ki/b = " << g(post.ki) << ")\n";
      if (pid->kd) os << "  kd = " << g(*pid->kd) << "  (kd/b = " << g(*post.kd) << ")\n";
    } else {
      os << "no classic PI/PID reduction exists for order " << cfg.order << "; use the generalized gains\n";
    }
  } else {
    throw Error(ErrorKind::kInvalidConfig, "--format: expected text|csv, got '" + format + "'");
  }

  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    auto f = open_out(out_path);
    f << os.str();
  }
  return kOk;
}

std::vector<std::string> plot_columns(const Scenario& sc) {
  switch (sc.kind()) {
    case PlantKind::kIntegrator: return {"x0", "u", "f_true", "f_hat"};
    case PlantKind::kVtol: return {"err_norm", "thrust", "obs_err"};
    case PlantKind::kVehicle: return {"l", "e_theta", "delta", "d_hat"};
  }
  return {};
}

int cmd_simulate(const std::string& config_path, const fs::path& out_dir, bool plot) {
  const Scenario sc = load_scenario(config_path);
  prepare_dir(out_dir);
  SimTrace trace;
  try {
    trace = run_scenario(sc);
  } catch (const Error& e) {
    if (is_config_kind(e.kind())) throw;
    auto m = open_out(out_dir / "metrics.csv");
    write_metrics_header(m);
    write_metrics_row(m, failed_row(sc, sc.name, to_string(e.kind())));
    std::cerr << "lumped-pid: run aborted: " << e.what() << '\n';
    return kDiverged;
  }
  {
    auto t = open_out(out_dir / "trace.csv");
    trace.write_csv(t);
  }
  {
    auto m = open_out(out_dir / "metrics.csv");
    write_metrics_header(m);
    write_metrics_row(m, evaluate_trace(sc, trace, sc.name));
  }
  if (plot) {
    auto p = open_out(out_dir / "plot.svg");
    write_svg_plot(p, trace, plot_columns(sc), sc.name);
  }
  return kOk;
}

int cmd_sweep(const std::string& config_path, const fs::path& out_dir, const std::vector<std::string>& grid_tokens,
              unsigned parallel) {
  const Scenario sc = load_scenario(config_path);
  const SweepGrid grid = SweepGrid::parse(grid_tokens);
  if (parallel == 0) throw Error(ErrorKind::kInvalidConfig, "--parallel: must be >= 1");
  prepare_dir(out_dir);
  const SweepResult result = run_sweep(sc, grid, parallel);
  auto os = open_out(out_dir / "sweep.csv");
  write_sweep_csv(os, result);
  if (result.failures > 0) {
    std::cerr << "lumped-pid: " << result.failures << " of " << result.rows.size() << " sweep cells failed\n";
    return kPartialSweep;
  }
  return kOk;
}

std::vector<double> bode_grid(const std::vector<std::string>& tokens, double omega, double omega_f) {
  if (tokens.empty()) return default_bode_grid(omega, omega_f);
  const auto fallback = default_bode_grid(omega, omega_f);
  double fmin = fallback.front(), fmax = fallback.back();
  int per_decade = 50;
  for (const auto& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kInvalidConfig, "--grid: expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "fmin") fmin = parse_double(val, "grid fmin");
    else if (key == "fmax") fmax = parse_double(val, "grid fmax");
    else if (key == "per_decade") per_decade = static_cast<int>(parse_double(val, "grid per_decade"));
    else throw Error(ErrorKind::kInvalidConfig, "--grid: unknown key '" + key + "' (fmin, fmax, per_decade)");
  }
  if (!(fmin > 0.0) || !(fmax > fmin) || per_decade < 1)
    throw Error(ErrorKind::kInvalidConfig, "--grid: need 0 < fmin < fmax and per_decade >= 1");
  return log_grid(fmin, fmax, per_decade);
}

int cmd_bode(const std::string& config_path, const std::vector<std::string>& grid_tokens, const std::string& out_path) {
  const Scenario sc = load_scenario(config_path);
  const auto* chain = std::get_if<ChainScenario>(&sc.setup);
  if (!chain) throw Error(ErrorKind::kInvalidConfig, "plant.kind: bode needs an integrator plant");
  const auto& cfg = chain->controller;
  const auto grid = bode_grid(grid_tokens, cfg.omega, cfg.omega_f);
  const auto obs = observer_tfs(cfg.omega_f);
  const std::vector<std::pair<std::string, TransferFunction>> tfs{
      {"G", closed_loop_tf(cfg)}, {"G_o", obs.observer}, {"G_e", obs.error}};

  std::ostringstream os;
  os << "tf,freq,mag,phase_rad\n";
  for (const auto& [name, tf] : tfs)
    for (const auto& r : bode_table(tf, grid))
      os << name << ',' << g(r.frequency) << ',' << g(r.magnitude) << ',' << g(r.phase) << '\n';
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    const fs::path p(out_path);
    if (p.has_parent_path()) prepare_dir(p.parent_path());
    auto f = open_out(p);
    f << os.str();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lumped-disturbance PID toolkit: tuning, simulation, sweeps and frequency responses"};
  app.require_subcommand(1);

  std::string config, out, format = "text";
  std::vector<std::string> grid;
  unsigned parallel = 1;
  bool plot = false;

  auto* tune = app.add_subcommand("tune", "Print homogeneous and classic PI/PID gains");
  tune->add_option("--config", config, "Config file")->required();
  tune->add_option("--format", format, "text or csv");
  tune->add_option("--out", out, "Output file (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Run one scenario, write trace.csv and metrics.csv");
  simulate->add_option("--config", config, "Scenario file")->required();
  simulate->add_option("--out", out, "Output directory")->required();
  simulate->add_flag("--plot", plot, "Also write plot.svg");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid, write sweep.csv");
  sweep->add_option("--config", config, "Scenario file")->required();
  sweep->add_option("--out", out, "Output directory")->required();
  sweep->add_option("--grid", grid, "e.g. omega=1,2,5 omega_f=10,20 sigma=0,0.01 seed=per-cell")->required();
  sweep->add_option("--parallel", parallel, "Worker threads");

  auto* bode = app.add_subcommand("bode", "Frequency responses of G, G_o and G_e");
  bode->add_option("--config", config, "Config file")->required();
  bode->add_option("--grid", grid, "fmin=... fmax=... per_decade=...");
  bode->add_option("--out", out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*tune) return cmd_tune(config, format, out);
    if (*simulate) return cmd_simulate(config, out, plot);
    if (*sweep) return cmd_sweep(config, out, grid, parallel);
    if (*bode) return cmd_bode(config, grid, out);
  } catch (const Error& e) {
    std::cerr << "lumped-pid: " << e.what() << '\n';
    return is_config_kind(e.kind()) ? kConfigError : kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "lumped-pid: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
