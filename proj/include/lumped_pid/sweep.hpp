#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lumped_pid/scenario.hpp"

namespace lumped_pid {

enum class SeedPolicy { kFixed, kPerCell };

struct SweepGrid {
  std::vector<double> omega;    // empty -> scenario value
  std::vector<double> omega_f;  // empty -> scenario value
  std::vector<double> sigma;    // empty -> scenario noise unchanged
  SeedPolicy seed_policy = SeedPolicy::kFixed;

  /// Tokens like `omega=1,2,5`, `omega_f=10,20`, `sigma=0,0.01`,
  /// `seed=fixed|per-cell`.
  static SweepGrid parse(const std::vector<std::string>& tokens);
  void validate() const;
};

struct SweepCell {
  std::size_t index = 0;  // canonical position
  double omega = 0.0;
  double omega_f = 0.0;
  std::optional<double> sigma;
};

/// Cells in canonical order: ω, then ω_f, then σ, each ascending.
std::vector<SweepCell> expand_grid(const SweepGrid& grid, const Scenario& base);

/// The scenario a given cell runs. Per-cell seeds are base_seed + index.
Scenario cell_scenario(const Scenario& base, const SweepGrid& grid, const SweepCell& cell);

struct SweepResult {
  std::vector<MetricsRow> rows;  // canonical order
  std::size_t failures = 0;
};

/// Runs every cell on up to `parallelism` worker threads. Failed cells are
/// recorded with the error kind as status, never dropped.
SweepResult run_sweep(const Scenario& base, const SweepGrid& grid, unsigned parallelism);

void write_sweep_csv(std::ostream& os, const SweepResult& result);

}  // namespace lumped_pid
