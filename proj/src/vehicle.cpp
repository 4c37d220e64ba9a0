#include "lumped_pid/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>

#include "lumped_pid/error.hpp"
#include "lumped_pid/integrator.hpp"
#include "lumped_pid/integrator_chain.hpp"

namespace lumped_pid {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double u) { return std::abs(u) < 1e-6 ? 1.0 - u * u / 6.0 : std::sin(u) / u; }

// g(s) = (p_d(s) − p)·t(s); zero at the matching point.
struct Tangency {
  double g;
  double l;
};

Tangency tangency(const FrenetPath& path, const Pose2& pose, double s) {
  const auto pd = path.at(s);
  const double ex = pd.x - pose.x;
  const double ey = pd.y - pose.y;
  const double c = std::cos(pd.theta), sn = std::sin(pd.theta);
  return {ex * c + ey * sn, -ex * sn + ey * c};
}

std::optional<double> solve_segment(const FrenetPath& path, std::size_t i, const Pose2& pose) {
  const auto& smp = path.samples();
  if (i + 1 >= smp.size()) return std::nullopt;
  double a = smp[i].s, b = smp[i + 1].s;
  const double ga = tangency(path, pose, a).g;
  const double gb = tangency(path, pose, b).g;
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if ((ga < 0.0) == (gb < 0.0)) return std::nullopt;
  const bool rising = ga < 0.0;
  const double kbar = (smp[i + 1].theta - smp[i].theta) / (b - a);
  double s = 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    const auto tg = tangency(path, pose, s);
    if (tg.g == 0.0) break;
    if ((tg.g < 0.0) == rising) a = s; else b = s;
    const double slope = 1.0 + kbar * tg.l;
    const double newton = slope > 0.0 ? s - tg.g / slope : a - 1.0;
    const double next = (newton > a && newton < b) ? newton : 0.5 * (a + b);
    if (std::abs(next - s) <= 1e-15 * std::max(1.0, std::abs(s))) {
      s = next;
      break;
    }
    s = next;
  }
  return s;
}

LateralErrorState refine(const FrenetPath& path, const Pose2& pose, std::size_t best) {
  double s_star = path.samples()[best].s;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t seg : {best == 0 ? best : best - 1, best}) {
    if (const auto s = solve_segment(path, seg, pose)) {
      const auto pd = path.at(*s);
      const double dist = std::hypot(pd.x - pose.x, pd.y - pose.y);
      if (dist < best_dist) {
        best_dist = dist;
        s_star = *s;
      }
    }
  }
  const auto pd = path.at(s_star);
  const double ex = pd.x - pose.x, ey = pd.y - pose.y;
  LateralErrorState e;
  e.s_d = s_star;
  e.x_d = pd.x;
  e.y_d = pd.y;
  e.theta_d = pd.theta;
  e.kappa_d = pd.kappa;
  e.l = -ex * std::sin(pd.theta) + ey * std::cos(pd.theta);
  e.e_theta = wrap_angle(pd.theta - pose.theta);
  return e;
}

double sample_distance(const PathSample& p, const Pose2& pose) { return std::hypot(p.x - pose.x, p.y - pose.y); }

}  // namespace

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);  // [−π, π]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

Pose2 bicycle_derivative(const Pose2& pose, double v, double delta, double d, double wheelbase) {
  const double steer = delta + d;
  if (!(std::abs(steer) < kPi / 2.0 - 1e-6))
    throw Error(ErrorKind::kSteeringLimit, "|delta + d| too close to pi/2");
  return {v * std::cos(pose.theta), v * std::sin(pose.theta), v * std::tan(steer) / wheelbase};
}

FrenetPath::FrenetPath(std::vector<PathSample> samples, PathInterpolation rule)
    : samples_(std::move(samples)), rule_(rule) {
  if (samples_.size() < 2) throw Error(ErrorKind::kInvalidConfig, "path: needs at least two samples");
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].s > samples_[i - 1].s))
      throw Error(ErrorKind::kInvalidConfig, "path: arc length must be strictly increasing (row " + std::to_string(i) + ")");
    samples_[i].theta = samples_[i - 1].theta + wrap_angle(samples_[i].theta - samples_[i - 1].theta);
  }
}

FrenetPath FrenetPath::line(double length, double spacing, double heading) {
  if (!(length > 0.0) || !(spacing > 0.0)) throw Error(ErrorKind::kInvalidConfig, "path.length/spacing: must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(length / spacing));
  std::vector<PathSample> s(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double si = length * static_cast<double>(i) / static_cast<double>(n);
    s[i] = {si, si * std::cos(heading), si * std::sin(heading), heading, 0.0};
  }
  return FrenetPath(std::move(s));
}

FrenetPath FrenetPath::circle(double radius, double arc, double spacing) {
  if (!(radius > 0.0) || !(arc > 0.0) || !(spacing > 0.0))
    throw Error(ErrorKind::kInvalidConfig, "path.radius/arc/spacing: must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(arc / spacing));
  std::vector<PathSample> s(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double si = arc * static_cast<double>(i) / static_cast<double>(n);
    const double phi = si / radius;
    s[i] = {si, radius * std::sin(phi), radius * (1.0 - std::cos(phi)), phi, 1.0 / radius};
  }
  return FrenetPath(std::move(s));
}

FrenetPath FrenetPath::from_csv(std::istream& in, PathInterpolation rule) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kParse, "path csv: empty input");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell.erase(std::remove_if(cell.begin(), cell.end(), [](unsigned char c) { return std::isspace(c); }), cell.end());
      header.push_back(cell);
    }
  }
  const std::vector<std::string> want{"s", "x", "y", "theta", "kappa"};
  std::vector<int> pos(want.size(), -1);
  for (std::size_t w = 0; w < want.size(); ++w)
    for (std::size_t h = 0; h < header.size(); ++h)
      if (header[h] == want[w]) pos[w] = static_cast<int>(h);
  for (std::size_t w = 0; w < want.size(); ++w)
    if (pos[w] < 0) throw Error(ErrorKind::kParse, "path csv: missing column '" + want[w] + "'");

  std::vector<PathSample> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::kParse, "path csv line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (vals.size() != header.size())
      throw Error(ErrorKind::kParse, "path csv line " + std::to_string(lineno) + ": wrong column count");
    samples.push_back({vals[pos[0]], vals[pos[1]], vals[pos[2]], vals[pos[3]], vals[pos[4]]});
  }
  return FrenetPath(std::move(samples), rule);
}

FrenetPath FrenetPath::from_csv_file(const std::string& path, PathInterpolation rule) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidConfig, "path.file: cannot open '" + path + "'");
  return from_csv(in, rule);
}

std::size_t FrenetPath::segment_of(double s) const {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), s,
                                   [](double v, const PathSample& p) { return v < p.s; });
  const auto idx = static_cast<std::size_t>(std::distance(samples_.begin(), it));
  if (idx == 0) return 0;
  return std::min(idx - 1, samples_.size() - 2);
}

PathSample FrenetPath::at(double s) const {
  s = std::clamp(s, start(), end());
  const std::size_t i = segment_of(s);
  const auto& a = samples_[i];
  const auto& b = samples_[i + 1];
  const double h = b.s - a.s;
  const double delta = s - a.s;
  const double frac = delta / h;
  PathSample out;
  out.s = s;
  out.kappa = a.kappa + (b.kappa - a.kappa) * frac;
  out.theta = a.theta + (b.theta - a.theta) * frac;
  if (rule_ == PathInterpolation::kLinear) {
    out.x = a.x + (b.x - a.x) * frac;
    out.y = a.y + (b.y - a.y) * frac;
  } else {
    const double half = 0.5 * (b.theta - a.theta) * frac;
    const double chord = delta * sinc(half);
    out.x = a.x + chord * std::cos(a.theta + half);
    out.y = a.y + chord * std::sin(a.theta + half);
  }
  return out;
}

FrenetPath::Consistency FrenetPath::consistency() const {
  Consistency c{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
    const auto& a = samples_[i];
    const auto& b = samples_[i + 1];
    const double h = b.s - a.s;
    const double mid = 0.5 * (a.theta + b.theta);
    c.position = std::max({c.position, std::abs((b.x - a.x) / h - std::cos(mid)), std::abs((b.y - a.y) / h - std::sin(mid))});
    c.heading = std::max(c.heading, std::abs((b.theta - a.theta) / h - 0.5 * (a.kappa + b.kappa)));
  }
  return c;
}

LateralErrorState frenet_match(const FrenetPath& path, const Pose2& pose, const MatchOptions& options) {
  const auto& smp = path.samples();
  std::vector<double> dist(smp.size());
  std::size_t best = 0;
  for (std::size_t j = 0; j < smp.size(); ++j) {
    dist[j] = sample_distance(smp[j], pose);
    if (dist[j] < dist[best]) best = j;
  }
  if (dist[best] > options.capture_radius)
    throw Error(ErrorKind::kOffPath, "nearest path point is " + std::to_string(dist[best]) + " m away");
  for (std::size_t j = 0; j < smp.size(); ++j) {
    if (j + 1 >= best && j <= best + 1) continue;
    const bool local_min = (j == 0 || dist[j] <= dist[j - 1]) && (j + 1 == smp.size() || dist[j] <= dist[j + 1]);
    if (!local_min || dist[j] - dist[best] > options.ambiguity_tol) continue;
    if (std::hypot(smp[j].x - smp[best].x, smp[j].y - smp[best].y) > 1e-9)
      throw Error(ErrorKind::kAmbiguousMatch, "two path points equally near (s=" + std::to_string(smp[best].s) +
                                                  ", s=" + std::to_string(smp[j].s) + ")");
  }
  return refine(path, pose, best);
}

FrenetMatcher::FrenetMatcher(std::shared_ptr<const FrenetPath> path, MatchOptions options)
    : path_(std::move(path)), options_(options) {
  if (!path_) throw Error(ErrorKind::kInvalidConfig, "path: missing");
}

LateralErrorState FrenetMatcher::match(const Pose2& pose) {
  if (!hint_) {
    auto e = frenet_match(*path_, pose, options_);
    hint_ = path_->segment_of(e.s_d);
    return e;
  }
  const auto& smp = path_->samples();
  std::size_t j = *hint_;
  while (j + 1 < smp.size() && sample_distance(smp[j + 1], pose) < sample_distance(smp[j], pose)) ++j;
  while (j > 0 && sample_distance(smp[j - 1], pose) < sample_distance(smp[j], pose)) --j;
  if (sample_distance(smp[j], pose) > options_.capture_radius)
    throw Error(ErrorKind::kOffPath, "vehicle left the capture region of the path");
  hint_ = j;
  return refine(*path_, pose, j);
}

LateralDerivatives lateral_error_derivatives(const LateralErrorState& err, double delta, double d,
                                             double wheelbase, double r_s, double kappa_d) {
  return {std::sin(err.e_theta), std::cos(err.e_theta) * (r_s * kappa_d - std::tan(delta + d) / wheelbase)};
}

double lateral_controller_known_d(const LateralErrorState& err, double kappa_d, double d, double wheelbase,
                                  double k0, double k1) {
  const double c = std::cos(err.e_theta);
  if (c < 1e-9) throw Error(ErrorKind::kSingularity, "|e_theta| at or beyond pi/2");
  const double arg = wheelbase * (kappa_d + (k0 * err.l + k1 * std::sin(err.e_theta)) / c);
  if (!std::isfinite(arg)) throw Error(ErrorKind::kSingularity, "steering argument not finite");
  return std::atan(arg) - d;
}

double lateral_lump(double e_theta, double delta, double d, double wheelbase, double r_s, double kappa_d) {
  const double td = std::tan(d);
  const double tdel = std::tan(delta);
  return std::cos(e_theta) * (r_s * kappa_d - td * (1.0 + tdel * tdel) / (wheelbase * (1.0 - tdel * td)));
}

double path_rate(const LateralErrorState& err) { return std::cos(err.e_theta) / (1.0 + err.kappa_d * err.l); }

LateralObserverController::LateralObserverController(double wheelbase, double omega, double omega_d, Quadrature rule)
    : wheelbase_(wheelbase), k0_(omega * omega), k1_(2.0 * omega), omega_d_(omega_d), integral_(rule) {
  if (!(wheelbase > 0.0)) throw Error(ErrorKind::kInvalidConfig, "plant.wheelbase: must be positive");
  if (!(omega > 0.0)) throw Error(ErrorKind::kInvalidConfig, "controller.omega: must be positive");
  if (!(omega_d > 0.0)) throw Error(ErrorKind::kInvalidConfig, "controller.omega_f: must be positive");
}

double LateralObserverController::step(const LateralErrorState& err, double ds) {
  const double c = std::cos(err.e_theta);
  if (c < 1e-9) throw Error(ErrorKind::kSingularity, "|e_theta| at or beyond pi/2");
  const double sin_e = std::sin(err.e_theta);
  const double u_x = k0_ * err.l + k1_ * sin_e;
  const double integral = std::abs(ds) < 1e-12 ? integral_.value() : integral_.update(u_x, ds);
  d_hat_ = omega_d_ * (sin_e + integral);
  const double arg = wheelbase_ * (u_x + d_hat_) / c;
  if (!std::isfinite(arg)) throw Error(ErrorKind::kSingularity, "steering argument not finite");
  return std::atan(arg);
}

SimTrace simulate_vehicle(const VehicleScenario& sc) {
  if (!sc.path) throw Error(ErrorKind::kInvalidConfig, "path: missing");
  if (!(sc.wheelbase > 0.0)) throw Error(ErrorKind::kInvalidConfig, "plant.wheelbase: must be positive");
  if (!std::isfinite(sc.speed)) throw Error(ErrorKind::kInvalidConfig, "plant.speed: must be finite");
  if (sc.decimation == 0) throw Error(ErrorKind::kInvalidConfig, "sim.decimation: must be >= 1");
  const std::size_t steps = step_count(sc.duration, sc.dt);
  const double L = sc.wheelbase;
  const double k0 = sc.omega * sc.omega;
  const double k1 = 2.0 * sc.omega;
  LateralObserverController observer(L, sc.omega, sc.omega_d, sc.quadrature);
  FrenetMatcher matcher(sc.path, sc.match);

  const auto p0 = sc.path->at(sc.path->start());
  Pose2 pose{p0.x + sc.initial_offset * std::sin(p0.theta), p0.y - sc.initial_offset * std::cos(p0.theta),
             p0.theta - sc.initial_heading_error};

  SimTrace trace({"t", "s", "x", "y", "theta", "s_d", "l", "e_theta", "delta", "d", "d_lump", "d_hat",
                  "l_prime", "l_second", "kappa_d", "r_s"});
  std::vector<double> state(3);
  double beyond = 0.0;
  const double ds = sc.speed * sc.dt;

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * sc.dt;
    const auto err = matcher.match(pose);
    if (std::abs(err.e_theta) >= kPi / 2.0) {
      beyond += std::abs(ds);
      if (beyond > sc.grace_distance)
        throw Error(ErrorKind::kSingularity, "heading error outside (-pi/2, pi/2) beyond grace distance");
    } else {
      beyond = 0.0;
    }
    LateralErrorState measured = err;
    measured.l += gaussian_noise(sc.noise, 0, k);
    measured.e_theta += gaussian_noise(sc.noise, 1, k);

    const double d = sc.bias(t);
    double delta;
    double f_hat;
    if (sc.mode == LateralMode::kKnownDisturbance) {
      delta = lateral_controller_known_d(measured, measured.kappa_d, d, L, k0, k1);
      f_hat = std::numeric_limits<double>::quiet_NaN();
    } else {
      delta = observer.step(measured, ds);
      f_hat = observer.d_hat();
    }

    if (k % sc.decimation == 0) {
      const double r_s = path_rate(err);
      const auto derivs = lateral_error_derivatives(err, delta, d, L, 1.0, err.kappa_d);
      const double row[] = {t, static_cast<double>(k) * ds, pose.x, pose.y, pose.theta, err.s_d, err.l,
                            err.e_theta, delta, d, lateral_lump(err.e_theta, delta, d, L, r_s, err.kappa_d), f_hat,
                            derivs.l_prime, derivs.l_second, err.kappa_d, r_s};
      trace.append(row);
    }
    if (k == steps) break;

    state = {pose.x, pose.y, pose.theta};
    rk4_step(
        [&](double tt, std::span<const double> xx, std::span<double> dx) {
          const auto dp = bicycle_derivative({xx[0], xx[1], xx[2]}, sc.speed, delta, sc.bias(tt), L);
          dx[0] = dp.x;
          dx[1] = dp.y;
          dx[2] = dp.theta;
        },
        state, t, sc.dt);
    check_state(state, k + 1);
    pose = {state[0], state[1], state[2]};
  }
  return trace;
}

}  // namespace lumped_pid
