#include <cmath>
#include <complex>
#include <sstream>

#include "doctest.h"
#include "lumped_pid/analysis.hpp"
#include "lumped_pid/error.hpp"
#include "lumped_pid/integrator_chain.hpp"

using namespace lumped_pid;

namespace {

SimTrace synthetic(double dt, std::size_t n, auto&& fn) {
  SimTrace tr({"t", "x0", "u", "f_true", "f_hat"});
  for (std::size_t k = 0; k < n; ++k) {
    const double t = k * dt;
    const double x = fn(t);
    const double row[] = {t, x, -x, 0.0, 0.0};
    tr.append(row);
  }
  return tr;
}

SimTrace homogeneous_run(int n, double w, DisturbanceSignal f, std::vector<double> x0 = {}) {
  ChainScenario sc;
  sc.order = n;
  sc.mode = ControllerMode::kHomogeneous;
  sc.controller.order = n;
  sc.controller.omega = w;
  sc.initial = std::move(x0);
  sc.disturbance = std::move(f);
  sc.duration = 40.0;
  sc.decimation = 4;
  return simulate_chain(sc);
}

}  // namespace

TEST_CASE("ultimate bound arithmetic") {
  CHECK(ultimate_bound(0.0, 3.0, 2) == 0.0);
  CHECK(ultimate_bound(1.0, 5.0, 2) == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(ultimate_bound(2.0, 2.0, 3) == 0.25);
}

TEST_CASE("check_bound on simulated homogeneous loops") {
  const auto rest = check_bound(homogeneous_run(2, 2.0, DisturbanceSignal::zero(), {1.0, 0.0}), 2.0, 2);
  CHECK(rest.measured_limsup < 1e-8);
  CHECK(rest.satisfied);

  const auto sine = check_bound(homogeneous_run(2, 5.0, DisturbanceSignal::Sinusoid{1.0, 1.0, 0.0}), 5.0, 2);
  CHECK(sine.measured_limsup <= 0.04);
  const double fr = std::abs(evaluate_at(TransferFunction(Polynomial({1.0}), binomial_poly(5.0, 2)), {0.0, 1.0}));
  CHECK(fr == doctest::Approx(0.03846).epsilon(1e-3));
  CHECK(sine.measured_limsup == doctest::Approx(fr).epsilon(0.02));
  CHECK(homogeneous_gain(5.0, 2, 1.0) == doctest::Approx(fr).epsilon(1e-14));

  const auto dc = check_bound(homogeneous_run(1, 2.0, DisturbanceSignal::Constant{1.0}), 2.0, 1);
  CHECK(dc.measured_limsup == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dc.theoretical_bound == 0.5);
  CHECK(dc.satisfied);
}

TEST_CASE("check_bound needs enough settling before the window") {
  ChainScenario sc;
  sc.order = 1;
  sc.controller.order = 1;
  sc.mode = ControllerMode::kHomogeneous;
  sc.duration = 5.0;
  const auto tr = simulate_chain(sc);
  try {
    (void)check_bound(tr, 1.0, 1);
    FAIL("expected window-too-short");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kWindowTooShort);
  }
}

TEST_CASE("trace metrics on a zero trace") {
  const auto tr = synthetic(0.01, 100, [](double) { return 0.0; });
  const auto m = trace_metrics(tr, 0.02);
  CHECK(m.sse_rms == 0.0);
  CHECK(m.sse_max == 0.0);
  CHECK(m.settling_time == 0.0);
  CHECK(m.overshoot == 0.0);
  CHECK(m.observer_rmse == 0.0);
  CHECK(m.control_rms == 0.0);
}

TEST_CASE("settling time of an exponential") {
  const double dt = 1e-3;
  const auto tr = synthetic(dt, 5001, [](double t) { return std::exp(-2.0 * t); });
  const auto m = trace_metrics(tr, 0.02);
  CHECK(std::abs(m.settling_time - std::log(50.0) / 2.0) <= dt);
  CHECK(m.overshoot == 0.0);

  const auto never = synthetic(dt, 100, [](double) { return 1.0; });
  CHECK(std::isinf(trace_metrics(never, 0.5).settling_time));
}

TEST_CASE("overshoot after the first sign change") {
  const auto tr = synthetic(1e-3, 10001, [](double t) { return std::exp(-t) * std::cos(2.0 * t); });
  const auto m = trace_metrics(tr, 1e-3);
  // First negative lobe peaks where tan(2t) = -1/2 past t = pi/4.
  const double tp = (M_PI - std::atan(0.5)) / 2.0;
  CHECK(m.overshoot == doctest::Approx(std::exp(-tp) * std::abs(std::cos(2.0 * tp))).epsilon(1e-4));
}

TEST_CASE("observer RMSE falls as the observer bandwidth rises") {
  double prev = INFINITY;
  for (double wf : {5.0, 10.0, 20.0}) {
    ChainScenario sc;
    sc.order = 2;
    sc.controller.order = 2;
    sc.controller.omega_f = wf;
    sc.disturbance = DisturbanceSignal::Sum{{DisturbanceSignal::Step{1.0, 1.0}, DisturbanceSignal::Sinusoid{0.5, 2.0, 0.0}}};
    sc.noise = {{0.0, 0.0}, 1};
    sc.duration = 20.0;
    const auto m = trace_metrics(simulate_chain(sc), 1e-3);
    CHECK(m.observer_rmse < prev);
    prev = m.observer_rmse;
  }
}

TEST_CASE("trace metrics honour column roles") {
  SimTrace tr({"t", "err", "cmd", "est_err"});
  for (int k = 0; k < 10; ++k) {
    const double row[] = {k * 0.1, 0.0, 2.0, 3.0};
    tr.append(row);
  }
  TraceRoles roles;
  roles.error = "err";
  roles.control = "cmd";
  roles.observer_error = "est_err";
  const auto m = trace_metrics(tr, 0.1, roles);
  CHECK(m.control_rms == 2.0);
  CHECK(m.observer_rmse == 3.0);
  CHECK(trace_metrics(tr, 0.1, roles).observer_rmse == m.observer_rmse);
  CHECK_THROWS_AS(trace_metrics(SimTrace({"t", "x0"}), 0.1), Error);
}

TEST_CASE("frequency grids") {
  const auto g = log_grid(0.01, 100.0, 50);
  CHECK(g.size() == 201);
  CHECK(g.front() == doctest::Approx(0.01));
  CHECK(g.back() == doctest::Approx(100.0));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  const auto d = default_bode_grid(2.0, 10.0);
  CHECK(d.front() == doctest::Approx(0.02));
  CHECK(d.back() == doctest::Approx(1000.0));
}

TEST_CASE("bode tables") {
  const auto tfs = observer_tfs(10.0);
  const double low[] = {1e-6};
  CHECK(bode_table(tfs.observer, low)[0].magnitude == doctest::Approx(1.0).epsilon(1e-12));
  const double at[] = {10.0};
  CHECK(bode_table(tfs.error, at)[0].magnitude == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

  // Below the first pole the closed loop rises at +20 dB/decade.
  ControllerConfig cfg;
  cfg.order = 2;
  cfg.omega = 2.0;
  cfg.omega_f = 10.0;
  const auto grid = log_grid(2e-3, 2e-1, 20);
  const auto rows = bode_table(closed_loop_tf(cfg), grid);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    const double x = std::log10(r.frequency), y = 20.0 * std::log10(r.magnitude);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = rows.size();
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(20.0).epsilon(0.01));

  std::ostringstream os;
  write_bode_csv(os, rows);
  CHECK(os.str().rfind("freq,mag,phase_rad\n", 0) == 0);
}

TEST_CASE("noise throughput is reported against the feedthrough estimate") {
  ChainScenario sc;
  sc.order = 2;
  sc.controller.order = 2;
  sc.controller.omega = 1.0;
  sc.controller.omega_f = 20.0;
  sc.duration = 10.0;
  const auto clean = simulate_chain(sc);
  sc.noise = {{0.0, 0.01}, 17};
  const auto noisy = simulate_chain(sc);
  const auto r = noise_throughput(clean, noisy, sc.controller, 0.01);
  CHECK(r.predicted_rms == doctest::Approx(22.0 * 0.01));
  CHECK(r.measured_rms > 0.0);
  CHECK(r.relative_error < 0.2);
}
