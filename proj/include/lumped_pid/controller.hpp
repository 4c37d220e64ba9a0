#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lumped_pid/polynomial.hpp"

namespace lumped_pid {

/// Rule used for every running integral in a controller (the observer's
/// ∫u_x and the classic PID's ∫e). Both controller forms must use the same
/// rule for their outputs to coincide.
enum class Quadrature { kRectangular, kTrapezoidal };

/// Initial value of the observer integral. kZero drops the ω_f·x⁽ⁿ⁻¹⁾(0)
/// term into the lumped disturbance; kSeedFromMeasurement sets ∫u_x(0) to
/// the first top-derivative sample so that f̂(0) = 0.
enum class ObserverInit { kZero, kSeedFromMeasurement };

struct ControllerConfig {
  int order = 2;
  double b = 1.0;
  double omega = 1.0;    // homogeneous bandwidth
  double omega_f = 10.0; // observer bandwidth
  double dt = 1e-3;
  Quadrature quadrature = Quadrature::kRectangular;
  ObserverInit observer_init = ObserverInit::kZero;

  /// Throws Error(kInvalidConfig) naming the offending field.
  void validate() const;
};

/// a[i] multiplies x⁽ⁱ⁾, i = 0..n-1.
struct HomogeneousGains {
  std::vector<double> a;

  int order() const { return static_cast<int>(a.size()); }
};

HomogeneousGains synthesize_gains(int n, double omega);

/// u_x = -Σ a[i]·x⁽ⁱ⁾.
double homogeneous_control(const HomogeneousGains& gains, std::span<const double> x_derivs);

/// Running quadrature over a uniform grid. update() is called once per grid
/// point with the sample at t_k and returns ∫₀^{t_k}.
class RunningIntegral {
 public:
  explicit RunningIntegral(Quadrature rule = Quadrature::kRectangular, double initial = 0.0)
      : rule_(rule), value_(initial) {}

  double update(double sample, double dt);
  double value() const { return value_; }
  void reset(double initial = 0.0) {
    value_ = initial;
    started_ = false;
  }

 private:
  Quadrature rule_;
  double value_;
  double prev_ = 0.0;
  bool started_ = false;
};

struct ObserverState {
  double ux_integral = 0.0;  // ∫u_x up to the current grid point
  double f_hat = 0.0;
  double prev_ux = 0.0;
  bool started = false;
};

struct ObserverStep {
  ObserverState state;
  double f_hat;
};

/// f̂ = ω_f·(x⁽ⁿ⁻¹⁾ − ∫u_x dt), with the integral advanced to the current
/// grid point under `rule`. The first call leaves the integral at its
/// initial value.
ObserverStep observer_step(const ObserverState& state, double x_top, double u_x, double omega_f,
                           double dt, Quadrature rule = Quadrature::kRectangular);

/// u = (u_x − f̂)/b.
double control_output(double u_x, double f_hat, double b);

/// Classic gains before division by b. kd is empty for a PI controller.
struct ClassicPidGains {
  double kp = 0.0;
  double ki = 0.0;
  std::optional<double> kd;

  ClassicPidGains divided_by(double b) const;
};

ClassicPidGains reduce_to_pi(const ControllerConfig& config);
ClassicPidGains reduce_to_pid(const ControllerConfig& config);

struct PidIntegralState {
  double e_integral = 0.0;
  double prev_e = 0.0;
  bool started = false;
};

/// u = −(kd·ė + kp·e + ki·∫e dt)/b, advancing `state` by one grid point.
double classic_pid_step(const ClassicPidGains& gains, PidIntegralState& state, double e,
                        double e_dot, double b, double dt,
                        Quadrature rule = Quadrature::kRectangular);

/// G(s) = s / ((s+ω)ⁿ (s+ω_f)).
TransferFunction closed_loop_tf(const ControllerConfig& config);

struct ObserverTfs {
  TransferFunction observer;  // ω_f/(s+ω_f)
  TransferFunction error;     // s/(s+ω_f)
};

ObserverTfs observer_tfs(double omega_f);

/// Homogeneous feedback plus lumped-disturbance observer for x⁽ⁿ⁾ = f + bu.
/// One instance serves one run.
class GeneralizedController {
 public:
  struct Output {
    double u;
    double u_x;
    double f_hat;
  };

  explicit GeneralizedController(const ControllerConfig& config);

  /// `z` holds the measured x⁽⁰⁾..x⁽ⁿ⁻¹⁾ at the current grid point.
  Output step(std::span<const double> z);
  void reset() { observer_ = {}; }

  const ControllerConfig& config() const { return config_; }
  const HomogeneousGains& gains() const { return gains_; }
  const ObserverState& observer() const { return observer_; }

 private:
  ControllerConfig config_;
  HomogeneousGains gains_;
  ObserverState observer_;
};

/// Textbook PI (n=1) or PID (n=2) built from the reduced gains.
class ClassicPid {
 public:
  explicit ClassicPid(const ControllerConfig& config);

  /// For n=1 `e_dot` is ignored.
  double step(double e, double e_dot);
  const ClassicPidGains& gains() const { return gains_; }

 private:
  ControllerConfig config_;
  ClassicPidGains gains_;
  PidIntegralState state_;
};

}  // namespace lumped_pid
