#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lumped_pid/controller.hpp"
#include "lumped_pid/signals.hpp"
#include "lumped_pid/trace.hpp"

namespace lumped_pid {

/// Rear-axle pose.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// Wraps into (−π, π].
double wrap_angle(double a);

/// (v cos θ, v sin θ, v tan(δ+d)/L). Throws kSteeringLimit when
/// |δ+d| is within 1e-6 of π/2.
Pose2 bicycle_derivative(const Pose2& pose, double v, double delta, double d, double wheelbase);

struct PathSample {
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double kappa = 0.0;
};

/// kArc advances along a constant-curvature arc between samples (exact for
/// lines and circles); kLinear interpolates every field linearly.
enum class PathInterpolation { kArc, kLinear };

/// Arc-length parameterized reference path. Headings are unwrapped on
/// construction; s must be strictly increasing.
class FrenetPath {
 public:
  explicit FrenetPath(std::vector<PathSample> samples, PathInterpolation rule = PathInterpolation::kArc);

  /// Straight path from the origin along heading `heading`.
  static FrenetPath line(double length, double spacing = 0.1, double heading = 0.0);
  /// Counter-clockwise circular arc of length `arc` starting at the origin
  /// heading +x, centre (0, R).
  static FrenetPath circle(double radius, double arc, double spacing = 0.1);
  /// Columns s,x,y,theta,kappa with a header row.
  static FrenetPath from_csv(std::istream& in, PathInterpolation rule = PathInterpolation::kArc);
  static FrenetPath from_csv_file(const std::string& path, PathInterpolation rule = PathInterpolation::kArc);

  const std::vector<PathSample>& samples() const { return samples_; }
  double length() const { return samples_.back().s - samples_.front().s; }
  double start() const { return samples_.front().s; }
  double end() const { return samples_.back().s; }
  PathInterpolation interpolation() const { return rule_; }

  /// Interpolated point at arc length s (clamped to the path).
  PathSample at(double s) const;
  /// Index i of the segment [s_i, s_{i+1}] containing s.
  std::size_t segment_of(double s) const;

  /// Worst deviation of the sampled geometry from dx/ds = cos θ,
  /// dy/ds = sin θ, dθ/ds = κ, each measured by forward differences.
  struct Consistency {
    double position;
    double heading;
  };
  Consistency consistency() const;

 private:
  std::vector<PathSample> samples_;
  PathInterpolation rule_;
};

struct LateralErrorState {
  double l = 0.0;        // (p_d − p)·n̂_d, positive when the path lies to the vehicle's left
  double e_theta = 0.0;  // θ_d − θ wrapped into (−π, π]
  double s_d = 0.0;
  double x_d = 0.0;
  double y_d = 0.0;
  double theta_d = 0.0;
  double kappa_d = 0.0;
};

struct MatchOptions {
  double capture_radius = 10.0;  // off-path beyond this distance
  double ambiguity_tol = 1e-6;   // distinct candidates this close in distance are ambiguous
};

/// Global match: coarse nearest-sample pass (with ambiguity and capture
/// checks), then the tangency constraint
/// (x_d − x)cos θ_d + (y_d − y)sin θ_d = 0 solved on the neighbouring
/// segments.
LateralErrorState frenet_match(const FrenetPath& path, const Pose2& pose, const MatchOptions& options = {});

/// Stateful matcher for simulation: after the first global match it only
/// scans samples within the capture radius of the previous match.
class FrenetMatcher {
 public:
  explicit FrenetMatcher(std::shared_ptr<const FrenetPath> path, MatchOptions options = {});
  LateralErrorState match(const Pose2& pose);
  const FrenetPath& path() const { return *path_; }

 private:
  std::shared_ptr<const FrenetPath> path_;
  MatchOptions options_;
  std::optional<std::size_t> hint_;
};

struct LateralDerivatives {
  double l_prime;   // sin e_θ
  double l_second;  // cos e_θ (r_s κ_d − tan(δ+d)/L)
};

LateralDerivatives lateral_error_derivatives(const LateralErrorState& err, double delta, double d,
                                             double wheelbase, double r_s, double kappa_d);

/// δ = atan(L(κ_d + sec e_θ (k₀ l + k₁ sin e_θ))) − d.
double lateral_controller_known_d(const LateralErrorState& err, double kappa_d, double d, double wheelbase,
                                  double k0, double k1);

/// cos e_θ (r_s κ_d − tan d (1 + tan²δ)/(L(1 − tan δ tan d))).
double lateral_lump(double e_theta, double delta, double d, double wheelbase, double r_s, double kappa_d);

/// ds_d/ds = cos e_θ / (1 + κ_d l).
double path_rate(const LateralErrorState& err);

/// Distance-domain observer controller for an unknown steering bias:
///   u_x = k₀ l + k₁ sin e_θ
///   d̂  = ω_d (sin e_θ + ∫u_x ds)
///   δ  = atan(L sec e_θ (u_x + d̂))
/// The input coefficient here is −cos e_θ / L, hence the sign pattern.
class LateralObserverController {
 public:
  LateralObserverController(double wheelbase, double omega, double omega_d,
                            Quadrature rule = Quadrature::kRectangular);

  /// `ds` is the distance travelled since the previous call (v·dt). For
  /// |ds| < 1e-12 the integral is frozen.
  double step(const LateralErrorState& err, double ds);
  double d_hat() const { return d_hat_; }
  double k0() const { return k0_; }
  double k1() const { return k1_; }

 private:
  double wheelbase_;
  double k0_;
  double k1_;
  double omega_d_;
  RunningIntegral integral_;
  double d_hat_ = 0.0;
};

enum class LateralMode { kObserver, kKnownDisturbance };

struct VehicleScenario {
  std::shared_ptr<const FrenetPath> path;
  double wheelbase = 2.7;
  double speed = 10.0;  // m/s
  double initial_offset = 0.0;         // l at s = 0
  double initial_heading_error = 0.0;  // e_θ at s = 0
  DisturbanceSignal bias;              // steering bias d(t), rad
  LateralMode mode = LateralMode::kObserver;
  double omega = 0.5;    // rad/m
  double omega_d = 2.0;  // rad/m
  Quadrature quadrature = Quadrature::kRectangular;
  NoiseSpec noise;  // channel 0: l, channel 1: e_θ
  MatchOptions match;
  double grace_distance = 1.0;  // m allowed with |e_θ| >= π/2
  double dt = 1e-3;
  double duration = 20.0;
  std::size_t decimation = 1;
};

/// Columns: t, s, x, y, theta, s_d, l, e_theta, delta, d, d_lump, d_hat,
/// l_prime, l_second, kappa_d, r_s. d_lump uses the true r_s;
/// l_second is the model value with r_s = 1.
SimTrace simulate_vehicle(const VehicleScenario& scenario);

}  // namespace lumped_pid
