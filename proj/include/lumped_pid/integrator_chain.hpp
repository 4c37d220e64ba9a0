#pragma once

#include <vector>

#include "lumped_pid/controller.hpp"
#include "lumped_pid/integrator.hpp"
#include "lumped_pid/signals.hpp"
#include "lumped_pid/trace.hpp"

namespace lumped_pid {

/// x⁽ⁿ⁾ = f + b·u with state (x, ẋ, …, x⁽ⁿ⁻¹⁾) and
/// f = f₀(t) + Σ cᵢ·x⁽ⁱ⁾.
class IntegratorChain : public PlantModel {
 public:
  IntegratorChain(int order, double b, DisturbanceSignal f0, std::vector<double> state_coeffs = {});

  std::size_t state_dim() const override { return static_cast<std::size_t>(order_); }
  void derivative(double t, std::span<const double> x, std::span<const double> u,
                  std::span<double> dx) const override;

  /// f₀(t) + Σ cᵢ·xᵢ, i.e. everything except the input term.
  double disturbance(double t, std::span<const double> x) const;

  int order() const { return order_; }
  double b() const { return b_; }

 private:
  int order_;
  double b_;
  DisturbanceSignal f0_;
  std::vector<double> coeffs_;
};

enum class ControllerMode {
  kGeneralized,  // homogeneous feedback + observer
  kHomogeneous,  // u = u_x / b, no disturbance compensation
  kClassic,      // reduced PI/PID gains, n <= 2
};

struct ChainScenario {
  int order = 2;
  double plant_b = 1.0;
  std::vector<double> initial;  // empty -> zeros
  DisturbanceSignal disturbance;
  std::vector<double> state_coeffs;
  ControllerMode mode = ControllerMode::kGeneralized;
  ControllerConfig controller;  // controller.b is the model's b̂
  NoiseSpec noise;
  double duration = 10.0;
  std::size_t decimation = 1;
};

/// Columns: t, x0..x{n-1}, u, f_true, f_hat, z0..z{n-1}. f_true is the
/// lumped disturbance relative to the controller's model, including the
/// (b − b̂)·u mismatch term.
SimTrace simulate_chain(const ChainScenario& scenario);

/// Number of integration steps for a run, rejecting dt > duration.
std::size_t step_count(double duration, double dt);

}  // namespace lumped_pid
