#include "lumped_pid/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "lumped_pid/error.hpp"

namespace lumped_pid {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::kInvalidConfig, field + ": " + what);
}

Vec3 get_vec3(const Config& cfg, const std::string& key, const Vec3& fallback) {
  if (!cfg.has(key)) return fallback;
  const auto v = cfg.get_doubles(key);
  if (v.size() != 3) bad(key, "expected 3 values, got " + std::to_string(v.size()));
  return Vec3(v[0], v[1], v[2]);
}

Quadrature get_quadrature(const Config& cfg) {
  const std::string q = cfg.get_string("controller.quadrature", "rectangular");
  if (q == "rectangular") return Quadrature::kRectangular;
  if (q == "trapezoidal") return Quadrature::kTrapezoidal;
  bad("controller.quadrature", "expected rectangular|trapezoidal, got '" + q + "'");
}

DisturbanceSignal parse_signal(const Config& cfg, const std::string& prefix, int depth = 0) {
  if (depth > 8) bad(prefix, "disturbance nesting too deep");
  const std::string kind_key = prefix + ".kind";
  if (!cfg.has(kind_key)) {
    if (cfg.has(prefix)) return DisturbanceSignal::Constant{cfg.get_double(prefix)};
    return DisturbanceSignal::zero();
  }
  const std::string kind = cfg.get_string(kind_key);
  if (kind == "none") return DisturbanceSignal::zero();
  if (kind == "constant") return DisturbanceSignal::Constant{cfg.get_double(prefix + ".value")};
  if (kind == "step")
    return DisturbanceSignal::Step{cfg.get_double(prefix + ".value"), cfg.get_double(prefix + ".t_start", 0.0)};
  if (kind == "sinusoid")
    return DisturbanceSignal::Sinusoid{cfg.get_double(prefix + ".amplitude"), cfg.get_double(prefix + ".frequency"),
                                       cfg.get_double(prefix + ".phase", 0.0)};
  if (kind == "sum") {
    DisturbanceSignal::Sum sum;
    for (const auto& term : cfg.get_strings(prefix + ".terms"))
      sum.terms.push_back(parse_signal(cfg, prefix + "." + term, depth + 1));
    if (sum.terms.empty()) bad(prefix + ".terms", "empty sum");
    return sum;
  }
  bad(kind_key, "expected none|constant|step|sinusoid|sum, got '" + kind + "'");
}

std::array<DisturbanceSignal, 3> parse_vector_signal(const Config& cfg, const std::string& prefix) {
  std::array<DisturbanceSignal, 3> out;
  if (cfg.has(prefix)) {
    const Vec3 c = get_vec3(cfg, prefix, Vec3::Zero());
    for (int i = 0; i < 3; ++i) out[i] = DisturbanceSignal::Constant{c[i]};
    return out;
  }
  const char* axes[3] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) out[i] = parse_signal(cfg, prefix + "." + axes[i]);
  return out;
}

void parse_noise(const Config& cfg, Scenario& sc, NoiseSpec& noise) {
  const std::size_t channels = sc.noise_channel_count();
  sc.noise_channels.clear();
  if (cfg.has("noise.channels")) {
    for (double c : cfg.get_doubles("noise.channels")) {
      if (c < 0 || c != std::floor(c) || c >= static_cast<double>(channels))
        bad("noise.channels", "channel out of range [0, " + std::to_string(channels) + ")");
      sc.noise_channels.push_back(static_cast<std::size_t>(c));
    }
  } else {
    for (std::size_t i = 0; i < channels; ++i) sc.noise_channels.push_back(i);
  }
  noise.sigma.assign(channels, 0.0);
  if (!cfg.has("noise.sigma")) return;
  const auto sig = cfg.get_doubles("noise.sigma");
  for (double s : sig)
    if (!(s >= 0.0) || !std::isfinite(s)) bad("noise.sigma", "must be finite and >= 0");
  if (sig.size() == 1) {
    for (auto c : sc.noise_channels) noise.sigma[c] = sig[0];
  } else if (sig.size() == channels) {
    noise.sigma = sig;
  } else {
    bad("noise.sigma", "expected 1 or " + std::to_string(channels) + " values");
  }
}

ChainScenario parse_chain(const Config& cfg) {
  ChainScenario s;
  s.order = cfg.get_int("plant.order", 2);
  if (s.order < 1) bad("plant.order", "must be >= 1");
  s.plant_b = cfg.get_double("plant.b", 1.0);
  s.initial = cfg.get_doubles("plant.initial", std::vector<double>(static_cast<std::size_t>(s.order), 0.0));
  if (s.initial.size() != static_cast<std::size_t>(s.order))
    bad("plant.initial", "expected " + std::to_string(s.order) + " values");
  s.disturbance = parse_signal(cfg, "disturbance");
  s.state_coeffs = cfg.get_doubles("disturbance.state_coeffs", {});
  if (!s.state_coeffs.empty() && s.state_coeffs.size() != static_cast<std::size_t>(s.order))
    bad("disturbance.state_coeffs", "expected " + std::to_string(s.order) + " values");

  const std::string mode = cfg.get_string("controller.mode", "generalized");
  if (mode == "generalized") s.mode = ControllerMode::kGeneralized;
  else if (mode == "homogeneous") s.mode = ControllerMode::kHomogeneous;
  else if (mode == "classic") s.mode = ControllerMode::kClassic;
  else bad("controller.mode", "expected generalized|homogeneous|classic, got '" + mode + "'");

  auto& c = s.controller;
  c.order = s.order;
  c.b = cfg.get_double("controller.b", s.plant_b);
  c.omega = cfg.get_double("controller.omega", 1.0);
  c.omega_f = cfg.get_double("controller.omega_f", 10.0);
  c.dt = cfg.get_double("sim.dt", 1e-3);
  c.quadrature = get_quadrature(cfg);
  const std::string init = cfg.get_string("controller.observer_init", "zero");
  if (init == "zero") c.observer_init = ObserverInit::kZero;
  else if (init == "seed") c.observer_init = ObserverInit::kSeedFromMeasurement;
  else bad("controller.observer_init", "expected zero|seed, got '" + init + "'");
  if (s.mode == ControllerMode::kClassic && s.order > 2) bad("controller.mode", "classic mode needs plant.order <= 2");
  return s;
}

VtolScenario parse_vtol(const Config& cfg) {
  VtolScenario s;
  s.params.mass = cfg.get_double("plant.mass", s.params.mass);
  s.params.gravity = cfg.get_double("plant.gravity", s.params.gravity);
  if (cfg.has("plant.inertia")) {
    const auto j = cfg.get_doubles("plant.inertia");
    if (j.size() == 3) s.params.inertia = Vec3(j[0], j[1], j[2]).asDiagonal();
    else if (j.size() == 9) s.params.inertia = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(j.data());
    else bad("plant.inertia", "expected 3 (diagonal) or 9 (row-major) values");
  }
  s.params.force_disturbance = parse_vector_signal(cfg, "disturbance.force");
  s.params.torque_disturbance = parse_vector_signal(cfg, "disturbance.torque");

  const std::string ref = cfg.get_string("reference.kind", "hover");
  const double yaw = cfg.get_double("reference.yaw", 0.0);
  if (ref == "hover") {
    s.reference = VtolReference::Hover{get_vec3(cfg, "reference.position", Vec3::Zero()), yaw};
  } else if (ref == "circle") {
    s.reference = VtolReference::Circle{cfg.get_double("reference.radius", 1.0), cfg.get_double("reference.rate", 1.0),
                                        cfg.get_double("reference.height", 0.0), yaw};
  } else if (ref == "lissajous") {
    VtolReference::Lissajous l;
    l.center = get_vec3(cfg, "reference.center", l.center);
    l.amplitude = get_vec3(cfg, "reference.amplitude", l.amplitude);
    l.frequency = get_vec3(cfg, "reference.frequency", l.frequency);
    l.phase = get_vec3(cfg, "reference.phase", l.phase);
    l.yaw = yaw;
    s.reference = l;
  } else {
    bad("reference.kind", "expected hover|circle|lissajous, got '" + ref + "'");
  }

  s.gains.omega = cfg.get_double("controller.omega", s.gains.omega);
  s.gains.omega_f = cfg.get_double("controller.omega_f", s.gains.omega_f);
  s.gains.omega_att = cfg.get_double("controller.omega_att", s.gains.omega_att);
  s.gains.omega_tau = cfg.get_double("controller.omega_tau", s.gains.omega_tau);
  s.gains.quadrature = get_quadrature(cfg);

  if (cfg.has("plant.initial_position") || cfg.has("plant.initial_velocity")) {
    RigidBodyState init;
    init.p = get_vec3(cfg, "plant.initial_position", s.reference(0.0).p);
    init.v = get_vec3(cfg, "plant.initial_velocity", s.reference(0.0).v);
    s.initial = init;
  }
  s.dt = cfg.get_double("sim.dt", s.dt);
  return s;
}

VehicleScenario parse_vehicle(const Config& cfg) {
  VehicleScenario s;
  s.wheelbase = cfg.get_double("plant.wheelbase", s.wheelbase);
  s.speed = cfg.get_double("plant.speed", s.speed);
  s.initial_offset = cfg.get_double("plant.initial_offset", 0.0);
  s.initial_heading_error = cfg.get_double("plant.initial_heading_error", 0.0);
  s.grace_distance = cfg.get_double("plant.grace_distance", s.grace_distance);
  s.bias = parse_signal(cfg, "disturbance");

  const std::string interp = cfg.get_string("path.interpolation", "arc");
  PathInterpolation rule = PathInterpolation::kArc;
  if (interp == "linear") rule = PathInterpolation::kLinear;
  else if (interp != "arc") bad("path.interpolation", "expected arc|linear, got '" + interp + "'");

  const std::string kind = cfg.get_string("path.kind", "line");
  const double spacing = cfg.get_double("path.spacing", 0.1);
  if (kind == "line") {
    s.path = std::make_shared<const FrenetPath>(
        FrenetPath(FrenetPath::line(cfg.get_double("path.length", 500.0), spacing).samples(), rule));
  } else if (kind == "circle") {
    const double radius = cfg.get_double("path.radius", 50.0);
    const double arc = cfg.get_double("path.arc", 250.0);
    s.path = std::make_shared<const FrenetPath>(FrenetPath(FrenetPath::circle(radius, arc, spacing).samples(), rule));
  } else if (kind == "csv") {
    s.path = std::make_shared<const FrenetPath>(FrenetPath::from_csv_file(cfg.get_string("path.file"), rule));
  } else {
    bad("path.kind", "expected line|circle|csv, got '" + kind + "'");
  }

  const std::string mode = cfg.get_string("controller.mode", "observer");
  if (mode == "observer") s.mode = LateralMode::kObserver;
  else if (mode == "known_d") s.mode = LateralMode::kKnownDisturbance;
  else bad("controller.mode", "expected observer|known_d, got '" + mode + "'");
  s.omega = cfg.get_double("controller.omega", s.omega);
  s.omega_d = cfg.get_double("controller.omega_f", s.omega_d);
  s.quadrature = get_quadrature(cfg);
  s.match.capture_radius = cfg.get_double("match.capture_radius", s.match.capture_radius);
  s.match.ambiguity_tol = cfg.get_double("match.ambiguity_tol", s.match.ambiguity_tol);
  s.dt = cfg.get_double("sim.dt", s.dt);
  return s;
}

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

}  // namespace

std::string to_string(PlantKind kind) {
  switch (kind) {
    case PlantKind::kIntegrator: return "integrator";
    case PlantKind::kVtol: return "vtol";
    case PlantKind::kVehicle: return "vehicle";
  }
  return "unknown";
}

PlantKind Scenario::kind() const { return static_cast<PlantKind>(setup.index()); }

double Scenario::omega() const {
  return std::visit(Overload{[](const ChainScenario& s) { return s.controller.omega; },
                             [](const VtolScenario& s) { return s.gains.omega; },
                             [](const VehicleScenario& s) { return s.omega; }},
                    setup);
}

double Scenario::omega_f() const {
  return std::visit(Overload{[](const ChainScenario& s) { return s.controller.omega_f; },
                             [](const VtolScenario& s) { return s.gains.omega_f; },
                             [](const VehicleScenario& s) { return s.omega_d; }},
                    setup);
}

const NoiseSpec& Scenario::noise() const {
  return std::visit([](const auto& s) -> const NoiseSpec& { return s.noise; }, setup);
}

std::uint64_t Scenario::seed() const { return noise().seed; }

std::size_t Scenario::noise_channel_count() const {
  return std::visit(Overload{[](const ChainScenario& s) { return static_cast<std::size_t>(s.order); },
                             [](const VtolScenario&) { return std::size_t{6}; },
                             [](const VehicleScenario&) { return std::size_t{2}; }},
                    setup);
}

void Scenario::set_bandwidths(double omega, double omega_f) {
  std::visit(Overload{[&](ChainScenario& s) {
                        s.controller.omega = omega;
                        s.controller.omega_f = omega_f;
                      },
                      [&](VtolScenario& s) {
                        s.gains.omega = omega;
                        s.gains.omega_f = omega_f;
                      },
                      [&](VehicleScenario& s) {
                        s.omega = omega;
                        s.omega_d = omega_f;
                      }},
             setup);
}

void Scenario::set_seed(std::uint64_t seed) {
  std::visit([&](auto& s) { s.noise.seed = seed; }, setup);
}

void Scenario::set_noise_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) bad("noise.sigma", "must be finite and >= 0");
  const std::size_t n = noise_channel_count();
  std::visit(
      [&](auto& s) {
        s.noise.sigma.assign(n, 0.0);
        for (auto c : noise_channels)
          if (c < n) s.noise.sigma[c] = sigma;
      },
      setup);
}

double Scenario::noise_sigma() const {
  double m = 0.0;
  for (double s : noise().sigma) m = std::max(m, s);
  return m;
}

void Scenario::validate() const {
  std::visit(Overload{[](const ChainScenario& s) {
                        s.controller.validate();
                        if (!(s.duration > 0.0)) bad("sim.duration", "must be > 0");
                        if (s.plant_b == 0.0 || !std::isfinite(s.plant_b)) bad("plant.b", "must be finite and nonzero");
                      },
                      [](const VtolScenario& s) {
                        s.params.validate();
                        s.gains.validate();
                        if (!(s.dt > 0.0)) bad("sim.dt", "must be > 0");
                        if (!(s.duration > 0.0)) bad("sim.duration", "must be > 0");
                      },
                      [](const VehicleScenario& s) {
                        if (!(s.wheelbase > 0.0)) bad("plant.wheelbase", "must be > 0");
                        if (!(s.speed > 0.0)) bad("plant.speed", "must be > 0");
                        if (!(s.omega > 0.0)) bad("controller.omega", "must be > 0");
                        if (!(s.omega_d > 0.0)) bad("controller.omega_f", "must be > 0");
                        if (!(s.dt > 0.0)) bad("sim.dt", "must be > 0");
                        if (!(s.duration > 0.0)) bad("sim.duration", "must be > 0");
                      }},
             setup);
}

Scenario scenario_from_config(const Config& cfg) {
  Scenario sc;
  sc.name = cfg.get_string("scenario.name", "scenario");
  sc.metrics_threshold = cfg.get_double("metrics.threshold", sc.metrics_threshold);
  if (!(sc.metrics_threshold > 0.0)) bad("metrics.threshold", "must be > 0");
  const std::string kind = cfg.get_string("plant.kind", "integrator");
  if (kind == "integrator") sc.setup = parse_chain(cfg);
  else if (kind == "vtol") sc.setup = parse_vtol(cfg);
  else if (kind == "vehicle") sc.setup = parse_vehicle(cfg);
  else bad("plant.kind", "expected integrator|vtol|vehicle, got '" + kind + "'");

  const double duration = cfg.get_double("sim.duration", 10.0);
  const int decimation = cfg.get_int("sim.decimation", 1);
  if (decimation < 1) bad("sim.decimation", "must be >= 1");
  const std::uint64_t seed = cfg.get_u64("sim.seed", 0);
  std::visit(
      [&](auto& s) {
        s.duration = duration;
        s.decimation = static_cast<std::size_t>(decimation);
        s.noise.seed = seed;
      },
      sc.setup);
  std::visit([&](auto& s) { parse_noise(cfg, sc, s.noise); }, sc.setup);

  const auto unused = cfg.unused_keys();
  if (!unused.empty()) {
    std::string list;
    for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
    throw Error(ErrorKind::kInvalidConfig, "unknown key(s) for plant.kind=" + kind + ": " + list);
  }
  sc.validate();
  return sc;
}

SimTrace run_scenario(const Scenario& scenario) {
  return std::visit(Overload{[](const ChainScenario& s) { return simulate_chain(s); },
                             [](const VtolScenario& s) { return simulate_vtol(s); },
                             [](const VehicleScenario& s) { return simulate_vehicle(s); }},
                    scenario.setup);
}

TraceRoles roles_for(const Scenario& scenario) {
  TraceRoles r;
  switch (scenario.kind()) {
    case PlantKind::kIntegrator: break;
    case PlantKind::kVtol:
      r.error = "err_norm";
      r.control = "thrust";
      r.observer_error = "obs_err";
      break;
    case PlantKind::kVehicle:
      r.error = "l";
      r.control = "delta";
      r.f_true = "d_lump";
      r.f_hat = "d_hat";
      break;
  }
  return r;
}

MetricsRow evaluate_trace(const Scenario& scenario, const SimTrace& trace, const std::string& id) {
  MetricsRow row;
  row.scenario_id = id;
  row.omega = scenario.omega();
  row.omega_f = scenario.omega_f();
  row.sigma = scenario.noise_sigma();
  const TraceRoles roles = roles_for(scenario);
  row.metrics = trace_metrics(trace, scenario.metrics_threshold, roles);
  row.limsup = row.metrics.sse_max;
  row.bound = kNaN;

  if (const auto* chain = std::get_if<ChainScenario>(&scenario.setup)) {
    const std::size_t w0 = final_window_start(trace.rows());
    const auto t = trace.time();
    if (chain->mode != ControllerMode::kClassic && t[w0] >= 10.0 / chain->controller.omega) {
      const auto f = trace.column("f_true");
      const auto fh = trace.column("f_hat");
      const bool compensated = chain->mode == ControllerMode::kGeneralized;
      double f_bar = 0.0;
      for (std::size_t i = w0; i < trace.rows(); ++i)
        f_bar = std::max(f_bar, std::abs(compensated ? f[i] - fh[i] : f[i]));
      row.bound = ultimate_bound(f_bar, chain->controller.omega, chain->order);
      row.satisfied = row.limsup <= row.bound * (1.0 + kDefaultBoundMargin) + kBoundAbsTolerance ? "true" : "false";
    }
  }
  return row;
}

MetricsRow failed_row(const Scenario& scenario, const std::string& id, const std::string& status) {
  MetricsRow row;
  row.scenario_id = id;
  row.omega = scenario.omega();
  row.omega_f = scenario.omega_f();
  row.sigma = scenario.noise_sigma();
  row.metrics = {kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
  row.bound = kNaN;
  row.limsup = kNaN;
  row.status = status;
  return row;
}

void write_metrics_header(std::ostream& os) {
  os << "scenario_id,omega,omega_f,sse_rms,sse_max,settling,overshoot,observer_rmse,bound,limsup,satisfied,sigma,"
        "u_rms,status\n";
}

void write_metrics_row(std::ostream& os, const MetricsRow& r) {
  const auto& m = r.metrics;
  os << r.scenario_id << ',' << format_double(r.omega) << ',' << format_double(r.omega_f) << ','
     << format_double(m.sse_rms) << ',' << format_double(m.sse_max) << ',' << format_double(m.settling_time) << ','
     << format_double(m.overshoot) << ',' << format_double(m.observer_rmse) << ',' << format_double(r.bound) << ','
     << format_double(r.limsup) << ',' << r.satisfied << ',' << format_double(r.sigma) << ','
     << format_double(m.control_rms) << ',' << r.status << '\n';
}

}  // namespace lumped_pid
