#include "lumped_pid/integrator_chain.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lumped_pid {

IntegratorChain::IntegratorChain(int order, double b, DisturbanceSignal f0, std::vector<double> state_coeffs)
    : order_(order), b_(b), f0_(std::move(f0)), coeffs_(std::move(state_coeffs)) {
  if (order_ < 1) throw Error(ErrorKind::kInvalidConfig, "plant.order: must be >= 1");
  if (!std::isfinite(b_)) throw Error(ErrorKind::kInvalidConfig, "plant.b: must be finite");
  if (coeffs_.size() > static_cast<std::size_t>(order_))
    throw Error(ErrorKind::kDimensionMismatch, "disturbance.state_coeffs: more coefficients than states");
}

double IntegratorChain::disturbance(double t, std::span<const double> x) const {
  double f = f0_(t);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) f += coeffs_[i] * x[i];
  return f;
}

void IntegratorChain::derivative(double t, std::span<const double> x, std::span<const double> u,
                                 std::span<double> dx) const {
  const std::size_t n = state_dim();
  for (std::size_t i = 0; i + 1 < n; ++i) dx[i] = x[i + 1];
  dx[n - 1] = disturbance(t, x) + b_ * u[0];
}

std::size_t step_count(double duration, double dt) {
  if (!(duration > 0.0)) throw Error(ErrorKind::kInvalidConfig, "sim.duration: must be positive");
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidConfig, "sim.dt: must be positive");
  if (dt > duration) throw Error(ErrorKind::kInvalidConfig, "sim.dt: must not exceed sim.duration");
  return static_cast<std::size_t>(std::llround(duration / dt));
}

SimTrace simulate_chain(const ChainScenario& sc) {
  const int n = sc.order;
  if (sc.controller.order != n)
    throw Error(ErrorKind::kOrderMismatch, "controller order " + std::to_string(sc.controller.order) +
                                               " does not match plant order " + std::to_string(n));
  if (sc.decimation == 0) throw Error(ErrorKind::kInvalidConfig, "sim.decimation: must be >= 1");
  sc.controller.validate();
  if (sc.mode == ControllerMode::kClassic && n > 2)
    throw Error(ErrorKind::kOrderMismatch, "classic PI/PID reduction exists only for order 1 and 2");

  const IntegratorChain plant(n, sc.plant_b, sc.disturbance, sc.state_coeffs);
  const auto un = static_cast<std::size_t>(n);
  std::vector<double> x(un, 0.0);
  if (!sc.initial.empty()) {
    if (sc.initial.size() != un) throw Error(ErrorKind::kDimensionMismatch, "plant.initial: expected one value per state");
    x = sc.initial;
  }

  std::vector<std::string> cols{"t"};
  for (int i = 0; i < n; ++i) cols.push_back("x" + std::to_string(i));
  cols.insert(cols.end(), {"u", "f_true", "f_hat"});
  for (int i = 0; i < n; ++i) cols.push_back("z" + std::to_string(i));
  SimTrace trace(cols);

  GeneralizedController generalized(sc.controller);
  std::optional<ClassicPid> classic;
  if (sc.mode == ControllerMode::kClassic) classic.emplace(sc.controller);
  const HomogeneousGains& gains = generalized.gains();

  const double dt = sc.controller.dt;
  const std::size_t steps = step_count(sc.duration, dt);
  std::vector<double> z(un), row(cols.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    for (std::size_t i = 0; i < un; ++i) z[i] = x[i] + gaussian_noise(sc.noise, i, k);

    double u = 0.0;
    double f_hat = 0.0;
    switch (sc.mode) {
      case ControllerMode::kGeneralized: {
        const auto out = generalized.step(z);
        u = out.u;
        f_hat = out.f_hat;
        break;
      }
      case ControllerMode::kHomogeneous:
        u = homogeneous_control(gains, z) / sc.controller.b;
        break;
      case ControllerMode::kClassic:
        u = classic->step(z[0], n == 2 ? z[1] : 0.0);
        f_hat = nan;
        break;
    }

    if (k % sc.decimation == 0) {
      std::size_t c = 0;
      row[c++] = t;
      for (double xi : x) row[c++] = xi;
      row[c++] = u;
      row[c++] = plant.disturbance(t, x) + (sc.plant_b - sc.controller.b) * u;
      row[c++] = f_hat;
      for (double zi : z) row[c++] = zi;
      trace.append(row);
    }
    if (k == steps) break;

    const double held[1] = {u};
    rk4_step([&](double tt, std::span<const double> xx, std::span<double> dx) { plant.derivative(tt, xx, held, dx); },
             x, t, dt);
    check_state(x, k + 1);
  }
  return trace;
}

}  // namespace lumped_pid
