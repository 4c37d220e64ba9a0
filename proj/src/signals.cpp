#include "lumped_pid/signals.hpp"

#include <cmath>
#include <numbers>

#include "lumped_pid/error.hpp"

namespace lumped_pid {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// 53-bit uniform in (0, 1].
double to_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

double DisturbanceSignal::operator()(double t) const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.value; },
          [t](const Step& s) { return t >= s.t_start ? s.value : 0.0; },
          [t](const Sinusoid& s) { return s.amplitude * std::sin(s.frequency * t + s.phase); },
          [t](const Sum& s) {
            double acc = 0.0;
            for (const auto& term : s.terms) acc += term(t);
            return acc;
          },
      },
      repr_);
}

double DisturbanceSignal::sup_abs(double t0) const {
  return std::visit(Overloaded{
                        [](const Constant& c) { return std::abs(c.value); },
                        [](const Step& s) { return std::abs(s.value); },
                        [](const Sinusoid& s) { return std::abs(s.amplitude); },
                        [t0](const Sum& s) {
                          double acc = 0.0;
                          for (const auto& term : s.terms) acc += term.sup_abs(t0);
                          return acc;
                        },
                    },
                    repr_);
}

bool DisturbanceSignal::is_zero() const { return sup_abs() == 0.0; }

double standard_normal(std::uint64_t seed, std::uint64_t channel, std::uint64_t step_index) {
  const std::uint64_t key = splitmix64(splitmix64(seed) ^ (channel * 0xd1342543de82ef95ULL)) ^ step_index;
  const std::uint64_t h1 = splitmix64(key);
  const std::uint64_t h2 = splitmix64(h1 ^ 0x632be59bd9b4e019ULL);
  const double u1 = to_unit(h1);
  const double u2 = to_unit(h2);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double gaussian_noise(const NoiseSpec& spec, std::size_t channel, std::uint64_t step_index) {
  const double sigma = spec.sigma_for(channel);
  if (sigma < 0.0) throw Error(ErrorKind::kInvalidConfig, "noise.sigma: must be nonnegative");
  if (sigma == 0.0) return 0.0;
  return sigma * standard_normal(spec.seed, channel, step_index);
}

}  // namespace lumped_pid
