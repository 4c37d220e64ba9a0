#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lumped_pid/error.hpp"

namespace lumped_pid {

/// States with any component above this magnitude are reported as diverged.
inline constexpr double kDivergenceLimit = 1e12;

/// Throws kNonFinite or kDiverged, tagging the message with the step index.
void check_state(std::span<const double> x, std::size_t step_index);

/// Continuous plant ẋ = F(t, x, u). Disturbances live inside the plant and
/// are evaluated at whatever time the integrator asks for.
class PlantModel {
 public:
  virtual ~PlantModel() = default;

  virtual std::size_t state_dim() const = 0;
  virtual void derivative(double t, std::span<const double> x, std::span<const double> u,
                          std::span<double> dx) const = 0;
  /// Maps a freshly integrated state back onto its manifold.
  virtual void project(std::span<double> /*x*/) const {}
};

/// Classical RK4 on a generic right-hand side rhs(t, x, dx), in place.
template <class Rhs>
void rk4_step(Rhs&& rhs, std::vector<double>& x, double t, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidConfig, "dt: must be positive");
  const std::size_t n = x.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  rhs(t, std::span<const double>(x), std::span<double>(k1));
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
  rhs(t + 0.5 * dt, std::span<const double>(tmp), std::span<double>(k2));
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
  rhs(t + 0.5 * dt, std::span<const double>(tmp), std::span<double>(k3));
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
  rhs(t + dt, std::span<const double>(tmp), std::span<double>(k4));
  for (std::size_t i = 0; i < n; ++i) x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

/// One RK4 step of `plant` with `u` held over [t, t+dt] (zero-order hold),
/// followed by the plant's projection and a finiteness check.
std::vector<double> rk4_step(const PlantModel& plant, std::span<const double> x,
                             std::span<const double> u, double t, double dt);

}  // namespace lumped_pid
