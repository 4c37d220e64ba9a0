#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lumped_pid/controller.hpp"
#include "lumped_pid/polynomial.hpp"
#include "lumped_pid/trace.hpp"

namespace lumped_pid {

/// Fraction of the trace (from the end) treated as steady state.
inline constexpr double kFinalWindowFraction = 0.2;
inline constexpr double kDefaultBoundMargin = 0.05;
/// Absolute slack on the bound so a zero bound tolerates roundoff.
inline constexpr double kBoundAbsTolerance = 1e-8;

/// Index of the first row in the final window.
std::size_t final_window_start(std::size_t rows);

/// f̄ / ωⁿ.
double ultimate_bound(double f_bar, double omega, int n);

struct BoundReport {
  double f_bar = 0.0;              // sup |f| over the final window
  double theoretical_bound = 0.0;  // f̄ / ωⁿ
  double measured_limsup = 0.0;    // max |x| over the final window
  double margin = kDefaultBoundMargin;
  bool satisfied = false;
};

/// For a run of the homogeneous-only loop. The final window must start at
/// least 10/ω into the run (kWindowTooShort otherwise); the limsup is
/// estimated as the window maximum.
BoundReport check_bound(const SimTrace& trace, double omega, int n, double margin = kDefaultBoundMargin,
                        const std::string& state_column = "x0", const std::string& disturbance_column = "f_true");

/// Which columns carry which role for trace_metrics.
struct TraceRoles {
  std::string error = "x0";
  std::string control = "u";
  std::string f_true = "f_true";
  std::string f_hat = "f_hat";
  std::string observer_error;  // when set, used instead of f_true − f_hat
};

struct TraceMetrics {
  double sse_rms = 0.0;
  double sse_max = 0.0;
  double settling_time = 0.0;  // time after the last |e| > threshold; +inf if never settled
  double overshoot = 0.0;      // max |e| after the first sign change
  double observer_rmse = 0.0;  // over the final window; nan without an estimate
  double control_rms = 0.0;    // whole trace
};

TraceMetrics trace_metrics(const SimTrace& trace, double threshold, const TraceRoles& roles = {});

/// RMS of a column over rows [begin, end).
double rms(std::span<const double> v, std::size_t begin = 0, std::size_t end = static_cast<std::size_t>(-1));

/// Logarithmic grid with `per_decade` points per decade, inclusive of both
/// ends.
std::vector<double> log_grid(double f_min, double f_max, int per_decade);

/// min(ω, ω_f)/100 .. max(ω, ω_f)·100 at 50 points per decade.
std::vector<double> default_bode_grid(double omega, double omega_f);

std::vector<ComplexResponse> bode_table(const TransferFunction& tf, std::span<const double> frequencies);

/// Header `freq,mag,phase_rad`.
void write_bode_csv(std::ostream& os, std::span<const ComplexResponse> rows);

/// |1/(jν + ω)ⁿ|, the steady amplitude of x under a unit sinusoid of
/// frequency ν for the homogeneous loop.
double homogeneous_gain(double omega, int n, double nu);

/// Measured control-signal noise (u_noisy − u_clean) against the first-order
/// prediction (a_{n−1} + ω_f)·σ_top/|b| that treats the observer's noise
/// term as ω_f·w_{n−1}. Reported, not asserted.
struct NoiseThroughput {
  double measured_rms = 0.0;
  double predicted_rms = 0.0;
  double relative_error = 0.0;
};

NoiseThroughput noise_throughput(const SimTrace& clean, const SimTrace& noisy, const ControllerConfig& config,
                                 double sigma_top);

}  // namespace lumped_pid
