#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "lumped_pid/analysis.hpp"
#include "lumped_pid/config.hpp"
#include "lumped_pid/integrator_chain.hpp"
#include "lumped_pid/trace.hpp"
#include "lumped_pid/vehicle.hpp"
#include "lumped_pid/vtol.hpp"

namespace lumped_pid {

enum class PlantKind { kIntegrator, kVtol, kVehicle };

std::string to_string(PlantKind kind);

struct Scenario {
  std::string name = "scenario";
  std::variant<ChainScenario, VtolScenario, VehicleScenario> setup;
  std::vector<std::size_t> noise_channels;  // channels a scalar sigma applies to
  double metrics_threshold = 1e-3;

  PlantKind kind() const;
  double omega() const;
  double omega_f() const;
  std::uint64_t seed() const;
  const NoiseSpec& noise() const;
  std::size_t noise_channel_count() const;

  void set_bandwidths(double omega, double omega_f);
  void set_seed(std::uint64_t seed);
  /// Assigns `sigma` to every channel in noise_channels, zero elsewhere.
  void set_noise_sigma(double sigma);
  /// Largest per-channel sigma.
  double noise_sigma() const;

  void validate() const;
};

/// Builds a scenario from a flat config. Unknown keys are rejected.
Scenario scenario_from_config(const Config& config);

SimTrace run_scenario(const Scenario& scenario);

TraceRoles roles_for(const Scenario& scenario);

struct MetricsRow {
  std::string scenario_id;
  double omega = 0.0;
  double omega_f = 0.0;
  TraceMetrics metrics;
  double bound = 0.0;   // nan when not applicable
  double limsup = 0.0;  // max |error| over the final window
  std::string satisfied = "na";
  double sigma = 0.0;
  std::string status = "ok";
};

/// Metrics and, for integrator chains, the ultimate-bound check.
MetricsRow evaluate_trace(const Scenario& scenario, const SimTrace& trace, const std::string& id);

/// Row for a run that aborted.
MetricsRow failed_row(const Scenario& scenario, const std::string& id, const std::string& status);

void write_metrics_header(std::ostream& os);
void write_metrics_row(std::ostream& os, const MetricsRow& row);

}  // namespace lumped_pid
