#include "lumped_pid/controller.hpp"

#include <cmath>
#include <string>

#include "lumped_pid/error.hpp"

namespace lumped_pid {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kInvalidConfig, field + ": " + what);
}

}  // namespace

void ControllerConfig::validate() const {
  require(order >= 1, "order", "must be >= 1");
  require(std::isfinite(b) && b != 0.0, "b", "must be finite and nonzero");
  require(std::isfinite(omega) && omega > 0.0, "omega", "must be positive");
  require(std::isfinite(omega_f) && omega_f > 0.0, "omega_f", "must be positive");
  require(std::isfinite(dt) && dt > 0.0, "dt", "must be positive");
}

HomogeneousGains synthesize_gains(int n, double omega) {
  const Polynomial p = binomial_poly(omega, n);
  const auto c = p.coeffs();
  return {std::vector<double>(c.begin(), c.end() - 1)};
}

double homogeneous_control(const HomogeneousGains& gains, std::span<const double> x_derivs) {
  if (x_derivs.size() != gains.a.size())
    throw Error(ErrorKind::kDimensionMismatch, "expected " + std::to_string(gains.a.size()) +
                                                   " state derivatives, got " +
                                                   std::to_string(x_derivs.size()));
  double acc = 0.0;
  for (std::size_t i = 0; i < x_derivs.size(); ++i) acc += gains.a[i] * x_derivs[i];
  return -acc;
}

double RunningIntegral::update(double sample, double dt) {
  if (started_) {
    value_ += rule_ == Quadrature::kRectangular ? prev_ * dt : 0.5 * (prev_ + sample) * dt;
  }
  prev_ = sample;
  started_ = true;
  return value_;
}

ObserverStep observer_step(const ObserverState& state, double x_top, double u_x, double omega_f,
                           double dt, Quadrature rule) {
  ObserverState next = state;
  if (state.started) {
    next.ux_integral += rule == Quadrature::kRectangular ? state.prev_ux * dt
                                                         : 0.5 * (state.prev_ux + u_x) * dt;
  }
  next.prev_ux = u_x;
  next.started = true;
  next.f_hat = omega_f * (x_top - next.ux_integral);
  return {next, next.f_hat};
}

double control_output(double u_x, double f_hat, double b) {
  if (b == 0.0) throw Error(ErrorKind::kInvalidConfig, "b: input coefficient must be nonzero");
  return (u_x - f_hat) / b;
}

ClassicPidGains ClassicPidGains::divided_by(double b) const {
  if (b == 0.0) throw Error(ErrorKind::kInvalidConfig, "b: input coefficient must be nonzero");
  ClassicPidGains out{kp / b, ki / b, std::nullopt};
  if (kd) out.kd = *kd / b;
  return out;
}

ClassicPidGains reduce_to_pi(const ControllerConfig& config) {
  config.validate();
  if (config.order != 1)
    throw Error(ErrorKind::kOrderMismatch, "PI reduction needs order 1, got " + std::to_string(config.order));
  // u = (1/b)(-(a0 + ω_f) x - ω_f a0 ∫x): the observer's ω_f·x term adds
  // to the proportional gain.
  const double a0 = config.omega;
  return {a0 + config.omega_f, config.omega_f * a0, std::nullopt};
}

ClassicPidGains reduce_to_pid(const ControllerConfig& config) {
  config.validate();
  if (config.order != 2)
    throw Error(ErrorKind::kOrderMismatch, "PID reduction needs order 2, got " + std::to_string(config.order));
  const double a0 = config.omega * config.omega;
  const double a1 = 2.0 * config.omega;
  return {a0 + config.omega_f * a1, config.omega_f * a0, a1 + config.omega_f};
}

double classic_pid_step(const ClassicPidGains& gains, PidIntegralState& state, double e,
                        double e_dot, double b, double dt, Quadrature rule) {
  if (b == 0.0) throw Error(ErrorKind::kInvalidConfig, "b: input coefficient must be nonzero");
  if (state.started) {
    state.e_integral += rule == Quadrature::kRectangular ? state.prev_e * dt
                                                         : 0.5 * (state.prev_e + e) * dt;
  }
  state.prev_e = e;
  state.started = true;
  const double kd = gains.kd.value_or(0.0);
  return -(kd * e_dot + gains.kp * e + gains.ki * state.e_integral) / b;
}

TransferFunction closed_loop_tf(const ControllerConfig& config) {
  config.validate();
  return {Polynomial{0.0, 1.0},
          poly_mul(binomial_poly(config.omega, config.order), Polynomial{config.omega_f, 1.0})};
}

ObserverTfs observer_tfs(double omega_f) {
  if (!(omega_f > 0.0)) throw Error(ErrorKind::kInvalidConfig, "omega_f: must be positive");
  const Polynomial den{omega_f, 1.0};
  return {TransferFunction(Polynomial{omega_f}, den), TransferFunction(Polynomial{0.0, 1.0}, den)};
}

GeneralizedController::GeneralizedController(const ControllerConfig& config)
    : config_(config), gains_((config.validate(), synthesize_gains(config.order, config.omega))) {}

GeneralizedController::Output GeneralizedController::step(std::span<const double> z) {
  const double u_x = homogeneous_control(gains_, z);
  const double x_top = z.back();
  if (!observer_.started && config_.observer_init == ObserverInit::kSeedFromMeasurement)
    observer_.ux_integral = x_top;
  const auto [next, f_hat] =
      observer_step(observer_, x_top, u_x, config_.omega_f, config_.dt, config_.quadrature);
  observer_ = next;
  return {control_output(u_x, f_hat, config_.b), u_x, f_hat};
}

ClassicPid::ClassicPid(const ControllerConfig& config)
    : config_(config),
      gains_(config.order == 1 ? reduce_to_pi(config) : reduce_to_pid(config)) {}

double ClassicPid::step(double e, double e_dot) {
  return classic_pid_step(gains_, state_, e, e_dot, config_.b, config_.dt, config_.quadrature);
}

}  // namespace lumped_pid
