#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <span>
#include <sstream>

#include "lumped_pid/analysis.hpp"
#include "lumped_pid/config.hpp"
#include "lumped_pid/controller.hpp"
#include "lumped_pid/error.hpp"
#include "lumped_pid/scenario.hpp"
#include "lumped_pid/sweep.hpp"

namespace py = pybind11;
using namespace lumped_pid;

namespace {

Quadrature quadrature_from(const std::string& name) {
  if (name == "rectangular") return Quadrature::kRectangular;
  if (name == "trapezoidal") return Quadrature::kTrapezoidal;
  throw Error(ErrorKind::kInvalidConfig, "quadrature: expected rectangular|trapezoidal, got '" + name + "'");
}

ControllerConfig make_config(int order, double b, double omega, double omega_f, double dt,
                             const std::string& quadrature) {
  ControllerConfig c;
  c.order = order;
  c.b = b;
  c.omega = omega;
  c.omega_f = omega_f;
  c.dt = dt;
  c.quadrature = quadrature_from(quadrature);
  c.validate();
  return c;
}

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::dict gains_dict(const ClassicPidGains& g) {
  py::dict d;
  d["kp"] = g.kp;
  d["ki"] = g.ki;
  d["kd"] = g.kd ? py::cast(*g.kd) : py::none();
  return d;
}

py::dict trace_dict(const SimTrace& trace) {
  py::dict d;
  for (const auto& name : trace.columns()) {
    d[py::str(name)] = to_array(trace.column(name));
  }
  return d;
}

py::dict row_dict(const MetricsRow& r) {
  py::dict d;
  d["scenario_id"] = r.scenario_id;
  d["omega"] = r.omega;
  d["omega_f"] = r.omega_f;
  d["sse_rms"] = r.metrics.sse_rms;
  d["sse_max"] = r.metrics.sse_max;
  d["settling"] = r.metrics.settling_time;
  d["overshoot"] = r.metrics.overshoot;
  d["observer_rmse"] = r.metrics.observer_rmse;
  d["u_rms"] = r.metrics.control_rms;
  d["bound"] = r.bound;
  d["limsup"] = r.limsup;
  d["satisfied"] = r.satisfied;
  d["sigma"] = r.sigma;
  d["status"] = r.status;
  return d;
}

py::dict bode_dict(const TransferFunction& tf, const std::vector<double>& freqs) {
  std::vector<double> mag, phase;
  for (const auto& r : bode_table(tf, freqs)) {
    mag.push_back(r.magnitude);
    phase.push_back(r.phase);
  }
  py::dict d;
  d["freq"] = to_array(freqs);
  d["mag"] = to_array(mag);
  d["phase_rad"] = to_array(phase);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lumped-disturbance PID core";

  static py::handle error_type = py::exception<Error>(m, "LumpedPidError", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = error_type(e.what());
      err.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  m.def("synthesize_gains", [](int n, double omega) { return synthesize_gains(n, omega).a; }, py::arg("n"),
        py::arg("omega"), "Homogeneous gains a_0..a_{n-1} with a_i = C(n, n-i) omega^(n-i).");

  m.def(
      "classic_gains",
      [](int order, double omega, double omega_f, double b) {
        const auto cfg = make_config(order, b, omega, omega_f, 1e-3, "rectangular");
        const auto pre = order == 1 ? reduce_to_pi(cfg) : reduce_to_pid(cfg);
        py::dict d;
        d["pre_b"] = gains_dict(pre);
        d["post_b"] = gains_dict(pre.divided_by(b));
        return d;
      },
      py::arg("order"), py::arg("omega"), py::arg("omega_f"), py::arg("b") = 1.0,
      "Equivalent PI (order 1) or PID (order 2) gains before and after division by b.");

  py::class_<GeneralizedController>(m, "GeneralizedController")
      .def(py::init([](int order, double b, double omega, double omega_f, double dt, const std::string& quadrature) {
             return GeneralizedController(make_config(order, b, omega, omega_f, dt, quadrature));
           }),
           py::arg("order"), py::arg("b"), py::arg("omega"), py::arg("omega_f"), py::arg("dt"),
           py::arg("quadrature") = "rectangular")
      .def(
          "step",
          [](GeneralizedController& c, const std::vector<double>& z) {
            const auto out = c.step(z);
            return py::make_tuple(out.u, out.u_x, out.f_hat);
          },
          py::arg("z"), "Advance one grid point; returns (u, u_x, f_hat).")
      .def("reset", &GeneralizedController::reset)
      .def_property_readonly("gains", [](const GeneralizedController& c) { return c.gains().a; });

  m.def(
      "bode",
      [](int order, double omega, double omega_f, std::optional<std::vector<double>> freqs) {
        const auto cfg = make_config(order, 1.0, omega, omega_f, 1e-3, "rectangular");
        const auto grid = freqs ? *freqs : default_bode_grid(omega, omega_f);
        const auto obs = observer_tfs(omega_f);
        py::dict d;
        d["G"] = bode_dict(closed_loop_tf(cfg), grid);
        d["G_o"] = bode_dict(obs.observer, grid);
        d["G_e"] = bode_dict(obs.error, grid);
        return d;
      },
      py::arg("order"), py::arg("omega"), py::arg("omega_f"), py::arg("freqs") = py::none());

  m.def("ultimate_bound", &ultimate_bound, py::arg("f_bar"), py::arg("omega"), py::arg("n"));

  py::class_<Scenario>(m, "Scenario")
      .def_static(
          "from_text", [](const std::string& text) { return scenario_from_config(Config::from_string(text)); },
          py::arg("text"))
      .def_static(
          "from_file", [](const std::string& path) { return scenario_from_config(Config::from_file(path)); },
          py::arg("path"))
      .def_readwrite("name", &Scenario::name)
      .def_property_readonly("kind", [](const Scenario& s) { return to_string(s.kind()); })
      .def_property_readonly("omega", &Scenario::omega)
      .def_property_readonly("omega_f", &Scenario::omega_f)
      .def_property("seed", &Scenario::seed, &Scenario::set_seed)
      .def("set_bandwidths", &Scenario::set_bandwidths, py::arg("omega"), py::arg("omega_f"))
      .def("set_noise_sigma", &Scenario::set_noise_sigma, py::arg("sigma"))
      .def(
          "run",
          [](const Scenario& s) {
            SimTrace trace;
            {
              py::gil_scoped_release release;
              trace = run_scenario(s);
            }
            return py::make_tuple(trace_dict(trace), row_dict(evaluate_trace(s, trace, s.name)));
          },
          "Simulate; returns (columns, metrics).")
      .def(
          "trace_csv",
          [](const Scenario& s) {
            std::ostringstream os;
            {
              py::gil_scoped_release release;
              run_scenario(s).write_csv(os);
            }
            return os.str();
          })
      .def(
          "sweep",
          [](const Scenario& s, const std::vector<std::string>& grid, unsigned parallel) {
            const SweepGrid g = SweepGrid::parse(grid);
            SweepResult res;
            {
              py::gil_scoped_release release;
              res = run_sweep(s, g, parallel);
            }
            py::list rows;
            for (const auto& r : res.rows) rows.append(row_dict(r));
            return rows;
          },
          py::arg("grid"), py::arg("parallel") = 1u);
}
