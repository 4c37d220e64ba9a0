#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

namespace lumped_pid {

/// Bounded scalar signal of time: Constant | Step | Sinusoid | Sum.
class DisturbanceSignal {
 public:
  struct Constant {
    double value = 0.0;
  };
  struct Step {
    double value = 0.0;
    double t_start = 0.0;
  };
  struct Sinusoid {
    double amplitude = 0.0;
    double frequency = 0.0;  // rad/s
    double phase = 0.0;
  };
  struct Sum {
    std::vector<DisturbanceSignal> terms;
  };

  DisturbanceSignal() : repr_(Constant{}) {}
  DisturbanceSignal(Constant c) : repr_(c) {}
  DisturbanceSignal(Step s) : repr_(s) {}
  DisturbanceSignal(Sinusoid s) : repr_(s) {}
  DisturbanceSignal(Sum s) : repr_(std::move(s)) {}

  static DisturbanceSignal zero() { return Constant{0.0}; }

  double operator()(double t) const;

  /// sup over [t0, ∞) of |f|, an upper bound for sums.
  double sup_abs(double t0 = 0.0) const;

  bool is_zero() const;

 private:
  std::variant<Constant, Step, Sinusoid, Sum> repr_;
};

/// Per-channel white measurement noise addressed by (seed, channel, step).
struct NoiseSpec {
  std::vector<double> sigma;
  std::uint64_t seed = 0;

  double sigma_for(std::size_t channel) const { return channel < sigma.size() ? sigma[channel] : 0.0; }
};

/// Standard normal sample that depends only on (seed, channel, step_index).
/// Counter-based: splitmix64 finalizer over the packed key, Box–Muller on
/// the two resulting uniforms.
double standard_normal(std::uint64_t seed, std::uint64_t channel, std::uint64_t step_index);

double gaussian_noise(const NoiseSpec& spec, std::size_t channel, std::uint64_t step_index);

}  // namespace lumped_pid
