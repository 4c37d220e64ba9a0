#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "lumped_pid/controller.hpp"
#include "lumped_pid/error.hpp"
#include "lumped_pid/integrator_chain.hpp"

using namespace lumped_pid;
using cd = std::complex<double>;

namespace {

ControllerConfig make(int n, double w, double wf, double b = 1.0) {
  ControllerConfig c;
  c.order = n;
  c.omega = w;
  c.omega_f = wf;
  c.b = b;
  return c;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kParse;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK(kind_of([] { make(2, 0.0, 10.0).validate(); }) == ErrorKind::kInvalidConfig);
  CHECK(kind_of([] { make(0, 1.0, 10.0).validate(); }) == ErrorKind::kInvalidConfig);
  CHECK(kind_of([] { make(2, 1.0, 0.0).validate(); }) == ErrorKind::kInvalidConfig);
  CHECK(kind_of([] { make(2, 1.0, 10.0, 0.0).validate(); }) == ErrorKind::kInvalidConfig);
  auto c = make(2, 1.0, 10.0);
  c.dt = -1.0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::kInvalidConfig);
  CHECK_NOTHROW(make(3, 1.0, 10.0, -2.0).validate());
}

TEST_CASE("synthesize_gains") {
  CHECK(synthesize_gains(1, 5.0).a == std::vector<double>{5.0});
  CHECK(synthesize_gains(2, 2.0).a == std::vector<double>{4.0, 4.0});
  const auto p = binomial_poly(2.0, 3);
  const auto g = synthesize_gains(3, 2.0);
  REQUIRE(g.order() == 3);
  for (int i = 0; i < 3; ++i) CHECK(g.a[i] == p[i]);
  CHECK(g.a == std::vector<double>{8.0, 12.0, 6.0});
}

TEST_CASE("homogeneous_control") {
  const HomogeneousGains g2{{4.0, 4.0}};
  const double z0[] = {0.0, 0.0};
  const double z1[] = {1.0, 0.0};
  CHECK(homogeneous_control(g2, z0) == 0.0);
  CHECK(homogeneous_control(g2, z1) == -4.0);
  const HomogeneousGains g3{{8.0, 12.0, 6.0}};
  const double z3[] = {0.5, -1.0, 2.0};
  const double reversed = -(6.0 * 2.0 + 12.0 * -1.0 + 8.0 * 0.5);
  CHECK(homogeneous_control(g3, z3) == reversed);
  CHECK(homogeneous_control(g3, z3) == -4.0);
  CHECK(kind_of([&] { (void)homogeneous_control(g3, z1); }) == ErrorKind::kDimensionMismatch);
}

TEST_CASE("running integral rules") {
  RunningIntegral rect(Quadrature::kRectangular);
  RunningIntegral trap(Quadrature::kTrapezoidal);
  // First call only primes the previous sample.
  CHECK(rect.update(1.0, 0.5) == 0.0);
  CHECK(trap.update(1.0, 0.5) == 0.0);
  CHECK(rect.update(3.0, 0.5) == 0.5);
  CHECK(trap.update(3.0, 0.5) == 1.0);
  rect.reset(2.0);
  CHECK(rect.value() == 2.0);
  CHECK(rect.update(7.0, 1.0) == 2.0);
}

TEST_CASE("observer_step at rest and with constant u_x") {
  const auto r = observer_step(ObserverState{}, 0.0, 0.0, 10.0, 1e-3);
  CHECK(r.f_hat == 0.0);

  const double c = 2.5, wf = 8.0, dt = 0.01;
  ObserverState s;
  for (int k = 0; k <= 50; ++k) {
    const auto step = observer_step(s, 0.0, c, wf, dt);
    s = step.state;
    CHECK(step.f_hat == doctest::Approx(-wf * c * k * dt).epsilon(1e-12));
  }
}

TEST_CASE("observer tracks a constant disturbance like a first-order lag") {
  ChainScenario sc;
  sc.order = 1;
  sc.controller = make(1, 2.0, 10.0);
  sc.controller.dt = 1e-4;
  sc.duration = 1.0;
  sc.disturbance = DisturbanceSignal::Constant{1.0};
  const auto tr = simulate_chain(sc);
  const auto t = tr.time();
  const auto fh = tr.column("f_hat");
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.rows(); ++i) worst = std::max(worst, std::abs(fh[i] - (1.0 - std::exp(-10.0 * t[i]))));
  CHECK(worst < 2e-3);
}

TEST_CASE("control_output") {
  CHECK(control_output(0.0, 0.0, 1.0) == 0.0);
  CHECK(control_output(-4.0, 1.0, 2.0) == -2.5);
  CHECK(control_output(-4.0, 1.0, -2.0) == 2.5);
  CHECK(kind_of([] { (void)control_output(1.0, 0.0, 0.0); }) == ErrorKind::kInvalidConfig);
}

TEST_CASE("PI reduction") {
  // Proportional gain carries the observer's direct feedthrough ω_f on top of a0.
  auto g = reduce_to_pi(make(1, 5.0, 20.0));
  CHECK(g.kp == 25.0);
  CHECK(g.ki == 100.0);
  CHECK_FALSE(g.kd.has_value());
  g = reduce_to_pi(make(1, 1.0, 1.0));
  CHECK(g.kp == 2.0);
  CHECK(g.ki == 1.0);
  g = reduce_to_pi(make(1, 0.5, 4.0));
  CHECK(g.kp == 4.5);
  CHECK(g.ki == 2.0);
  const auto post = reduce_to_pi(make(1, 5.0, 20.0, 2.0)).divided_by(2.0);
  CHECK(post.kp == 12.5);
  CHECK(post.ki == 50.0);
  CHECK(kind_of([] { (void)reduce_to_pi(make(2, 1.0, 1.0)); }) == ErrorKind::kOrderMismatch);
}

TEST_CASE("PID reduction") {
  auto g = reduce_to_pid(make(2, 2.0, 10.0));
  CHECK(*g.kd == 14.0);
  CHECK(g.kp == 44.0);
  CHECK(g.ki == 40.0);
  g = reduce_to_pid(make(2, 3.0, 6.0));
  CHECK(*g.kd == 12.0);
  CHECK(g.kp == 45.0);
  CHECK(g.ki == 54.0);
  // Approaching the pure pole-placement limit.
  g = reduce_to_pid(make(2, 1.0, 1e-9));
  CHECK(*g.kd == doctest::Approx(2.0));
  CHECK(g.kp == doctest::Approx(1.0));
  CHECK(g.ki == doctest::Approx(0.0));
  CHECK(kind_of([] { (void)reduce_to_pid(make(3, 1.0, 1.0)); }) == ErrorKind::kOrderMismatch);
  CHECK(kind_of([] { (void)reduce_to_pid(make(2, 1.0, 0.0)); }) == ErrorKind::kInvalidConfig);
}

TEST_CASE("classic_pid_step accumulation") {
  const ClassicPidGains g{44.0, 40.0, 14.0};
  PidIntegralState zero;
  CHECK(classic_pid_step(g, zero, 0.0, 0.0, 1.0, 1e-3) == 0.0);

  PidIntegralState s;
  const double dt = 1e-3;
  for (int k = 0; k < 100; ++k) {
    const double u = classic_pid_step(g, s, 1.0, 0.0, 1.0, dt);
    CHECK(u == doctest::Approx(-44.0 - 40.0 * k * dt).epsilon(1e-12));
  }
}

TEST_CASE("classic and generalized controllers agree on arbitrary sequences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> m(-2.0, 2.0);
  for (Quadrature q : {Quadrature::kRectangular, Quadrature::kTrapezoidal}) {
    for (int n : {1, 2}) {
      auto cfg = make(n, 1.3, 17.0, -0.7);
      cfg.quadrature = q;
      GeneralizedController gen(cfg);
      ClassicPid pid(cfg);
      RunningIntegral x(q);
      double worst = 0.0;
      for (int k = 0; k < 10000; ++k) {
        double z[2];
        z[1] = m(rng);
        z[0] = n == 1 ? m(rng) : x.update(z[1], cfg.dt);
        const double a = gen.step(std::span<const double>(z, n)).u;
        const double b = pid.step(z[0], z[1]);
        worst = std::max(worst, std::abs(a - b));
      }
      CHECK(worst <= 1e-9);
    }
  }
}

TEST_CASE("observer seeding removes the initial estimate") {
  auto cfg = make(2, 1.0, 10.0);
  cfg.observer_init = ObserverInit::kSeedFromMeasurement;
  GeneralizedController seeded(cfg);
  const double z[] = {0.0, 3.0};
  CHECK(seeded.step(z).f_hat == 0.0);
  GeneralizedController plain(make(2, 1.0, 10.0));
  CHECK(plain.step(z).f_hat == 30.0);
}

TEST_CASE("closed_loop_tf denominators") {
  const auto g1 = closed_loop_tf(make(1, 2.0, 10.0));
  CHECK(g1.numerator() == Polynomial({0.0, 1.0}));
  CHECK(g1.denominator() == Polynomial({20.0, 12.0, 1.0}));
  const auto g2 = closed_loop_tf(make(2, 2.0, 10.0));
  CHECK(g2.denominator() == Polynomial({40.0, 44.0, 14.0, 1.0}));
  const auto pid = reduce_to_pid(make(2, 2.0, 10.0));
  CHECK(g2.denominator()[0] == pid.ki);
  CHECK(g2.denominator()[1] == pid.kp);
  CHECK(g2.denominator()[2] == *pid.kd);
  // The PI gains reproduce the n = 1 denominator the same way.
  const auto pi = reduce_to_pi(make(1, 2.0, 10.0));
  CHECK(g1.denominator()[0] == pi.ki);
  CHECK(g1.denominator()[1] == pi.kp);
}

TEST_CASE("observer transfer functions") {
  const double wf = 7.0;
  const auto tfs = observer_tfs(wf);
  CHECK(std::abs(evaluate_at(tfs.observer, cd(0.0, 1e6 * wf))) < 2e-6);
  CHECK(std::abs(evaluate_at(tfs.observer, cd(0.0, wf))) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  for (double w = 0.01; w < 1000.0; w *= 1.7) {
    const double go = std::norm(evaluate_at(tfs.observer, cd(0.0, w)));
    const double ge = std::norm(evaluate_at(tfs.error, cd(0.0, w)));
    CHECK(go + ge == doctest::Approx(1.0).epsilon(1e-13));
  }
  // Same denominator, numerators sum to it.
  CHECK(tfs.observer.denominator() == tfs.error.denominator());
  CHECK(poly_add(tfs.observer.numerator(), tfs.error.numerator()) == tfs.observer.denominator());
}

TEST_CASE("noise injected through the observer scales with omega_f") {
  // Noise on the top channel only, identical realizations.
  auto rms_of = [](double wf) {
    ChainScenario sc;
    sc.order = 2;
    sc.controller = make(2, 1.0, wf);
    sc.duration = 10.0;
    const auto clean = simulate_chain(sc);
    sc.noise = {{0.0, 0.01}, 3};
    const auto noisy = simulate_chain(sc);
    const auto a = clean.column("u"), b = noisy.column("u");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc / a.size());
  };
  const double r10 = rms_of(10.0), r20 = rms_of(20.0), r40 = rms_of(40.0);
  CHECK(r10 < r20);
  CHECK(r20 < r40);
  // Feedthrough (a1 + ω_f)·σ dominates, so the growth is close to linear.
  CHECK(r40 / r10 == doctest::Approx(42.0 / 12.0).epsilon(0.05));
}
