#include "lumped_pid/integrator.hpp"

namespace lumped_pid {

void check_state(std::span<const double> x, std::size_t step_index) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]))
      throw Error(ErrorKind::kNonFinite, "state[" + std::to_string(i) + "] at step " + std::to_string(step_index));
    if (std::abs(x[i]) > kDivergenceLimit)
      throw Error(ErrorKind::kDiverged, "|state[" + std::to_string(i) + "]| > 1e12 at step " +
                                            std::to_string(step_index));
  }
}

std::vector<double> rk4_step(const PlantModel& plant, std::span<const double> x,
                             std::span<const double> u, double t, double dt) {
  if (x.size() != plant.state_dim())
    throw Error(ErrorKind::kDimensionMismatch, "state size does not match plant");
  std::vector<double> next(x.begin(), x.end());
  rk4_step([&](double tt, std::span<const double> xx, std::span<double> dx) { plant.derivative(tt, xx, u, dx); },
           next, t, dt);
  plant.project(next);
  check_state(next, 0);
  return next;
}

}  // namespace lumped_pid
