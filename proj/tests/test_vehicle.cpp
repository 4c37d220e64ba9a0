#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lumped_pid/analysis.hpp"
#include "lumped_pid/error.hpp"
#include "lumped_pid/integrator.hpp"
#include "lumped_pid/vehicle.hpp"

using namespace lumped_pid;

namespace {

constexpr double kL = 2.7;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kParse;
}

VehicleScenario straight_scenario() {
  VehicleScenario sc;
  sc.path = std::make_shared<const FrenetPath>(FrenetPath::line(300.0));
  sc.wheelbase = kL;
  sc.speed = 10.0;
  sc.duration = 15.0;
  return sc;
}

double max_abs(std::span<const double> v, std::size_t begin = 0) {
  double m = 0.0;
  for (std::size_t i = begin; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

}  // namespace

TEST_CASE("wrap_angle") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3.0 * M_PI / 2.0) == doctest::Approx(-M_PI / 2.0));
  CHECK(wrap_angle(-7.0) == doctest::Approx(-7.0 + 2.0 * M_PI));
}

TEST_CASE("bicycle kinematics") {
  const auto straight = bicycle_derivative({0, 0, 0.4}, 10.0, 0.05, -0.05, kL);
  CHECK(straight.theta == 0.0);
  CHECK(straight.x == doctest::Approx(10.0 * std::cos(0.4)));

  const auto turn = bicycle_derivative({0, 0, 0}, 10.0, 0.07, 0.03, kL);
  CHECK(turn.theta == doctest::Approx(0.3716).epsilon(1e-4));
  CHECK(turn.theta == doctest::Approx(10.0 * std::tan(0.1) / kL).epsilon(1e-15));

  CHECK(kind_of([] { (void)bicycle_derivative({}, 1.0, M_PI / 2.0, 0.0, kL); }) == ErrorKind::kSteeringLimit);
}

TEST_CASE("constant steering closes a circle") {
  const double steer = 0.1, v = 10.0;
  const double radius = kL / std::tan(steer);
  const double period = 2.0 * M_PI * radius / v;
  const int steps = 20000;
  const double dt = period / steps;
  std::vector<double> x{1.0, -2.0, 0.3};
  for (int k = 0; k < steps; ++k)
    rk4_step(
        [&](double, std::span<const double> s, std::span<double> dx) {
          const auto d = bicycle_derivative({s[0], s[1], s[2]}, v, steer, 0.0, kL);
          dx[0] = d.x;
          dx[1] = d.y;
          dx[2] = d.theta;
        },
        x, k * dt, dt);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(x[1] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(wrap_angle(x[2] - 0.3) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("path construction and interpolation") {
  const auto c = FrenetPath::circle(50.0, 100.0, 0.5);
  const auto mid = c.at(37.3);
  CHECK(mid.x == doctest::Approx(50.0 * std::sin(37.3 / 50.0)).epsilon(1e-12));
  CHECK(mid.y == doctest::Approx(50.0 * (1.0 - std::cos(37.3 / 50.0))).epsilon(1e-12));
  CHECK(mid.theta == doctest::Approx(37.3 / 50.0).epsilon(1e-12));
  CHECK(c.consistency().position < 1e-3);
  CHECK(c.consistency().heading < 1e-9);
  CHECK(c.segment_of(37.3) == 74);

  const FrenetPath lin(c.samples(), PathInterpolation::kLinear);
  CHECK(std::abs(lin.at(37.3).x - mid.x) < 1e-3);

  std::vector<PathSample> bad{{0, 0, 0, 0, 0}, {0, 1, 0, 0, 0}};
  CHECK_THROWS_AS(FrenetPath{bad}, Error);
}

TEST_CASE("path csv import") {
  std::istringstream in("s,x,y,theta,kappa\n0,0,0,0,0\n1,1,0,0,0\n2,2,0,0,0\n");
  const auto p = FrenetPath::from_csv(in);
  CHECK(p.length() == 2.0);
  CHECK(p.at(1.5).x == doctest::Approx(1.5));
  std::istringstream broken("s,x,y\n0,0,0\n");
  CHECK_THROWS_AS(FrenetPath::from_csv(broken), Error);
}

TEST_CASE("frenet match on a straight path") {
  const auto line = FrenetPath::line(20.0);
  const auto on = frenet_match(line, {3.0, 0.0, 0.0});
  CHECK(on.l == 0.0);
  CHECK(on.e_theta == 0.0);

  const auto off = frenet_match(line, {5.0, 0.3, 0.0});
  // Path lies to the vehicle's right: negative lateral error.
  CHECK(off.l == doctest::Approx(-0.3).epsilon(1e-12));
  CHECK(off.e_theta == 0.0);
  CHECK(off.s_d == doctest::Approx(5.0).epsilon(1e-12));

  CHECK(frenet_match(line, {5.0, -0.3, 0.2}).e_theta == doctest::Approx(-0.2));
  CHECK(kind_of([&] { (void)frenet_match(line, {5.0, 15.0, 0.0}); }) == ErrorKind::kOffPath);
}

TEST_CASE("frenet match on a circle against brute force") {
  const double r = 50.0;
  const auto c = FrenetPath::circle(r, 200.0, 0.25);
  for (double s : {10.0, 47.1, 123.4}) {
    const double phi = s / r;
    // Radially 0.2 m outside the circle.
    const double px = (r + 0.2) * std::sin(phi), py = r - (r + 0.2) * std::cos(phi);
    const auto m = frenet_match(c, {px, py, phi + 0.05});

    double best = INFINITY, best_s = 0.0;
    for (int i = 0; i <= 2000000; ++i) {
      const double si = 200.0 * i / 2000000.0;
      const double d = std::hypot(r * std::sin(si / r) - px, r * (1.0 - std::cos(si / r)) - py);
      if (d < best) {
        best = d;
        best_s = si;
      }
    }
    CHECK(std::abs(m.l) == doctest::Approx(best).epsilon(1e-6));
    CHECK(m.l > 0.0);
    CHECK(m.s_d == doctest::Approx(best_s).epsilon(1e-5));
    CHECK(m.e_theta == doctest::Approx(-0.05).epsilon(1e-9));
    CHECK(m.kappa_d == doctest::Approx(1.0 / r));
  }
}

TEST_CASE("frenet match ambiguity") {
  const auto half = FrenetPath::circle(10.0, M_PI * 10.0, 0.1);
  CHECK(kind_of([&] { (void)frenet_match(half, {0.0, 10.0, 0.0}); }) == ErrorKind::kAmbiguousMatch);
}

TEST_CASE("lateral derivative model") {
  LateralErrorState e;
  const auto matched = lateral_error_derivatives(e, std::atan(kL / 50.0) - 0.01, 0.01, kL, 1.0, 1.0 / 50.0);
  CHECK(matched.l_prime == 0.0);
  CHECK(std::abs(matched.l_second) < 1e-17);
  e.e_theta = 0.1;
  const auto aligned = lateral_error_derivatives(e, 0.02, -0.02, kL, 1.0, 0.0);
  CHECK(aligned.l_prime == std::sin(0.1));
  CHECK(aligned.l_second == 0.0);
}

TEST_CASE("known-disturbance steering law") {
  LateralErrorState e;
  CHECK(lateral_controller_known_d(e, 0.0, 0.0, kL, 0.25, 1.0) == 0.0);
  CHECK(lateral_controller_known_d(e, 1.0 / 50.0, 0.03, kL, 0.25, 1.0) ==
        doctest::Approx(std::atan(kL / 50.0) - 0.03).epsilon(1e-15));
}

TEST_CASE("known-disturbance loop follows the critically damped response") {
  auto sc = straight_scenario();
  sc.mode = LateralMode::kKnownDisturbance;
  sc.bias = DisturbanceSignal::Constant{0.03};
  sc.initial_offset = 1.0;
  const auto tr = simulate_vehicle(sc);
  const auto s = tr.column("s");
  const auto l = tr.column("l");
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.rows(); ++i) {
    const double ws = sc.omega * s[i];
    worst = std::max(worst, std::abs(l[i] - (1.0 + ws) * std::exp(-ws)));
  }
  CHECK(worst < 0.02);
  // Past ten time constants the error stays under the double-pole envelope
  // value 11·e⁻¹⁰ of the initial offset.
  double tail = 0.0;
  for (std::size_t i = 0; i < tr.rows(); ++i)
    if (sc.omega * s[i] >= 10.0) tail = std::max(tail, std::abs(l[i]));
  CHECK(tail <= 1.05 * 11.0 * std::exp(-10.0));
}

TEST_CASE("observer controller with no bias stays consistent") {
  auto sc = straight_scenario();
  sc.initial_offset = 0.8;
  const auto tr = simulate_vehicle(sc);
  const std::size_t last = tr.rows() - 1;
  CHECK(std::abs(tr.column("d_hat")[last]) < 1e-9);
  CHECK(std::abs(tr.column("delta")[last]) < 1e-9);
  CHECK(std::abs(tr.column("l")[last]) < 1e-9);
}

TEST_CASE("observer absorbs curvature and steering bias") {
  auto sc = straight_scenario();
  sc.path = std::make_shared<const FrenetPath>(FrenetPath::circle(50.0, 250.0));
  sc.initial_offset = 0.3;
  auto tr = simulate_vehicle(sc);
  std::size_t last = tr.rows() - 1;
  CHECK(tr.column("d_hat")[last] == doctest::Approx(0.02).epsilon(1e-4));
  CHECK(std::abs(tr.column("l")[last]) < 1e-6);

  sc = straight_scenario();
  const double d = 2.0 * M_PI / 180.0;
  sc.bias = DisturbanceSignal::Constant{d};
  tr = simulate_vehicle(sc);
  last = tr.rows() - 1;
  CHECK(tr.column("d_hat")[last] == doctest::Approx(-std::tan(d) / kL).epsilon(1e-4));
  CHECK(tr.column("delta")[last] == doctest::Approx(-d).epsilon(1e-6));
}

TEST_CASE("lateral error derivatives agree with the simulated trajectory") {
  VehicleScenario sc;
  sc.path = std::make_shared<const FrenetPath>(FrenetPath::circle(40.0, 200.0, 0.05));
  sc.bias = DisturbanceSignal::Constant{0.02};
  sc.initial_offset = -1.0;
  sc.initial_heading_error = 0.15;
  sc.duration = 8.0;
  const auto tr = simulate_vehicle(sc);
  const auto s = tr.column("s");
  const auto l = tr.column("l");
  const auto e = tr.column("e_theta");
  const auto delta = tr.column("delta");
  const auto rs = tr.column("r_s");
  const auto kappa = tr.column("kappa_d");
  double worst1 = 0.0, worst2 = 0.0, peak1 = 0.0, peak2 = 0.0;
  for (std::size_t i = 1; i + 1 < tr.rows(); ++i) {
    const double h = s[i + 1] - s[i];
    const double fd1 = (l[i + 1] - l[i - 1]) / (2.0 * h);
    const double fd2 = (l[i + 1] - 2.0 * l[i] + l[i - 1]) / (h * h);
    LateralErrorState err;
    err.l = l[i];
    err.e_theta = e[i];
    const auto m = lateral_error_derivatives(err, delta[i], 0.02, sc.wheelbase, rs[i], kappa[i]);
    // The central difference spans two held steering values.
    const auto prev = lateral_error_derivatives(err, delta[i - 1], 0.02, sc.wheelbase, rs[i], kappa[i]);
    worst1 = std::max(worst1, std::abs(fd1 - m.l_prime));
    worst2 = std::max(worst2, std::abs(fd2 - 0.5 * (m.l_second + prev.l_second)));
    peak1 = std::max(peak1, std::abs(m.l_prime));
    peak2 = std::max(peak2, std::abs(m.l_second));
  }
  CHECK(worst1 / peak1 < 1e-3);
  CHECK(worst2 / peak2 < 1e-3);
}

TEST_CASE("vehicle run is reproducible and reports heading breakdown") {
  auto sc = straight_scenario();
  sc.noise = {{0.01, 0.001}, 5};
  sc.duration = 3.0;
  CHECK(simulate_vehicle(sc).to_csv() == simulate_vehicle(sc).to_csv());

  sc = straight_scenario();
  sc.initial_heading_error = 2.0;
  sc.grace_distance = 0.5;
  CHECK(kind_of([&] { (void)simulate_vehicle(sc); }) == ErrorKind::kSingularity);
}
