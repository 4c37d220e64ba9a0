#include "lumped_pid/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "lumped_pid/error.hpp"

namespace lumped_pid {

std::size_t final_window_start(std::size_t rows) {
  return static_cast<std::size_t>(std::floor((1.0 - kFinalWindowFraction) * static_cast<double>(rows)));
}

double ultimate_bound(double f_bar, double omega, int n) {
  if (!(f_bar >= 0.0)) throw Error(ErrorKind::kInvalidConfig, "f_bar: must be nonnegative");
  if (!(omega > 0.0)) throw Error(ErrorKind::kInvalidConfig, "omega: must be positive");
  if (n < 1) throw Error(ErrorKind::kInvalidConfig, "n: must be >= 1");
  return f_bar / std::pow(omega, n);
}

BoundReport check_bound(const SimTrace& trace, double omega, int n, double margin, const std::string& state_column,
                        const std::string& disturbance_column) {
  if (trace.empty()) throw Error(ErrorKind::kEmptyTrace, "check_bound on an empty trace");
  const auto t = trace.time();
  const std::size_t w0 = final_window_start(trace.rows());
  const double settle = 10.0 / omega;
  if (t[w0] < settle)
    throw Error(ErrorKind::kWindowTooShort, "final window starts at t=" + std::to_string(t[w0]) +
                                                ", needs >= 10/omega = " + std::to_string(settle));
  const auto x = trace.column(state_column);
  const auto f = trace.column(disturbance_column);
  BoundReport r;
  r.margin = margin;
  for (std::size_t i = w0; i < trace.rows(); ++i) {
    r.f_bar = std::max(r.f_bar, std::abs(f[i]));
    r.measured_limsup = std::max(r.measured_limsup, std::abs(x[i]));
  }
  r.theoretical_bound = ultimate_bound(r.f_bar, omega, n);
  r.satisfied = r.measured_limsup <= r.theoretical_bound * (1.0 + margin) + kBoundAbsTolerance;
  return r;
}

double rms(std::span<const double> v, std::size_t begin, std::size_t end) {
  end = std::min(end, v.size());
  if (begin >= end) return 0.0;
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += v[i] * v[i];
  return std::sqrt(acc / static_cast<double>(end - begin));
}

TraceMetrics trace_metrics(const SimTrace& trace, double threshold, const TraceRoles& roles) {
  if (trace.empty()) throw Error(ErrorKind::kEmptyTrace, "trace_metrics on an empty trace");
  const auto t = trace.time();
  const auto e = trace.column(roles.error);
  const std::size_t n = trace.rows();
  const std::size_t w0 = final_window_start(n);
  TraceMetrics m;

  m.sse_rms = rms(e, w0, n);
  for (std::size_t i = w0; i < n; ++i) m.sse_max = std::max(m.sse_max, std::abs(e[i]));

  std::optional<std::size_t> last_exceed;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(e[i]) > threshold) last_exceed = i;
  if (!last_exceed) m.settling_time = 0.0;
  else if (*last_exceed + 1 < n) m.settling_time = t[*last_exceed + 1];
  else m.settling_time = std::numeric_limits<double>::infinity();

  std::size_t first_cross = n;
  for (std::size_t i = 1; i < n; ++i) {
    if ((e[i - 1] > 0.0 && e[i] <= 0.0) || (e[i - 1] < 0.0 && e[i] >= 0.0)) {
      first_cross = i;
      break;
    }
  }
  for (std::size_t i = first_cross; i < n; ++i) m.overshoot = std::max(m.overshoot, std::abs(e[i]));

  if (!roles.observer_error.empty() && trace.has(roles.observer_error)) {
    m.observer_rmse = rms(trace.column(roles.observer_error), w0, n);
  } else if (trace.has(roles.f_true) && trace.has(roles.f_hat)) {
    const auto ft = trace.column(roles.f_true);
    const auto fh = trace.column(roles.f_hat);
    double acc = 0.0;
    for (std::size_t i = w0; i < n; ++i) acc += (ft[i] - fh[i]) * (ft[i] - fh[i]);
    m.observer_rmse = std::sqrt(acc / static_cast<double>(n - w0));
  } else {
    m.observer_rmse = std::numeric_limits<double>::quiet_NaN();
  }

  if (trace.has(roles.control)) m.control_rms = rms(trace.column(roles.control));
  return m;
}

std::vector<double> log_grid(double f_min, double f_max, int per_decade) {
  if (!(f_min > 0.0) || !(f_max > f_min) || per_decade < 1)
    throw Error(ErrorKind::kInvalidConfig, "frequency grid: need 0 < f_min < f_max and per_decade >= 1");
  const double lo = std::log10(f_min);
  const double hi = std::log10(f_max);
  const auto count = static_cast<std::size_t>(std::ceil((hi - lo) * per_decade - 1e-9));
  std::vector<double> grid(count + 1);
  for (std::size_t i = 0; i <= count; ++i)
    grid[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count));
  grid.front() = f_min;
  grid.back() = f_max;
  return grid;
}

std::vector<double> default_bode_grid(double omega, double omega_f) {
  return log_grid(std::min(omega, omega_f) / 100.0, std::max(omega, omega_f) * 100.0, 50);
}

std::vector<ComplexResponse> bode_table(const TransferFunction& tf, std::span<const double> frequencies) {
  std::vector<ComplexResponse> rows;
  rows.reserve(frequencies.size());
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!(frequencies[i] > 0.0) || (i > 0 && !(frequencies[i] > frequencies[i - 1])))
      throw Error(ErrorKind::kInvalidConfig, "frequency grid must be positive and strictly ascending");
    rows.push_back(frequency_response(tf, frequencies[i]));
  }
  return rows;
}

void write_bode_csv(std::ostream& os, std::span<const ComplexResponse> rows) {
  os << "freq,mag,phase_rad\n";
  for (const auto& r : rows)
    os << format_double(r.frequency) << ',' << format_double(r.magnitude) << ',' << format_double(r.phase) << '\n';
}

double homogeneous_gain(double omega, int n, double nu) {
  const TransferFunction g(Polynomial{1.0}, binomial_poly(omega, n));
  return std::abs(evaluate_at(g, {0.0, nu}));
}

NoiseThroughput noise_throughput(const SimTrace& clean, const SimTrace& noisy, const ControllerConfig& config,
                                 double sigma_top) {
  if (clean.rows() != noisy.rows()) throw Error(ErrorKind::kDimensionMismatch, "traces differ in length");
  const auto uc = clean.column("u");
  const auto un = noisy.column("u");
  std::vector<double> diff(uc.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = un[i] - uc[i];
  const auto gains = synthesize_gains(config.order, config.omega);
  NoiseThroughput r;
  r.measured_rms = rms(diff);
  r.predicted_rms = (gains.a.back() + config.omega_f) * sigma_top / std::abs(config.b);
  r.relative_error = r.predicted_rms > 0.0 ? (r.measured_rms - r.predicted_rms) / r.predicted_rms : 0.0;
  return r;
}

}  // namespace lumped_pid
