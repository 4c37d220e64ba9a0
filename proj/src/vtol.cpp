#include "lumped_pid/vtol.hpp"

#include <cmath>
#include <string>

#include "lumped_pid/error.hpp"
#include "lumped_pid/integrator.hpp"
#include "lumped_pid/integrator_chain.hpp"

namespace lumped_pid {

namespace {

const Vec3 kE3(0.0, 0.0, 1.0);

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* field) {
  if (!(std::isfinite(v) && v > 0.0)) throw Error(ErrorKind::kInvalidConfig, std::string(field) + ": must be positive");
}

struct StageRates {
  Vec3 p_dot, v_dot, omega_dot;
};

StageRates stage_rates(const Vec3& v, const Mat3& R, const Vec3& omega, double thrust, const Vec3& tau,
                       const VtolParams& params, double t) {
  const Mat3& J = params.inertia;
  return {v,
          params.gravity * kE3 - (thrust / params.mass) * (R * kE3) + params.d_force(t) / params.mass,
          J.ldlt().solve(-omega.cross(J * omega) + tau + params.d_torque(t))};
}

}  // namespace

void VtolParams::validate() const {
  require_positive(mass, "plant.mass");
  require_positive(gravity, "plant.gravity");
  if ((inertia - inertia.transpose()).norm() > 1e-12)
    throw Error(ErrorKind::kInvalidConfig, "plant.inertia: must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorKind::kInvalidConfig, "plant.inertia: must be positive definite");
}

Vec3 VtolParams::d_force(double t) const {
  return {force_disturbance[0](t), force_disturbance[1](t), force_disturbance[2](t)};
}

Vec3 VtolParams::d_torque(double t) const {
  return {torque_disturbance[0](t), torque_disturbance[1](t), torque_disturbance[2](t)};
}

RigidBodyDerivative vtol_derivative(const RigidBodyState& s, double thrust, const Vec3& tau,
                                    const VtolParams& params, double t) {
  const auto r = stage_rates(s.v, s.R, s.omega, thrust, tau, params, t);
  return {r.p_dot, r.v_dot, s.R * hat(s.omega), r.omega_dot};
}

RigidBodyState vtol_step(const RigidBodyState& s, double thrust, const Vec3& tau, const VtolParams& params,
                         double t, double dt) {
  const double h = dt;
  const auto k1 = stage_rates(s.v, s.R, s.omega, thrust, tau, params, t);
  const Vec3 w1 = s.omega;

  const Vec3 v2 = s.v + 0.5 * h * k1.v_dot;
  const Vec3 w2 = s.omega + 0.5 * h * k1.omega_dot;
  const Mat3 R2 = s.R * rodrigues(0.5 * h * w1);
  const auto k2 = stage_rates(v2, R2, w2, thrust, tau, params, t + 0.5 * h);

  const Vec3 v3 = s.v + 0.5 * h * k2.v_dot;
  const Vec3 w3 = s.omega + 0.5 * h * k2.omega_dot;
  const Mat3 R3 = s.R * rodrigues(0.5 * h * w2);
  const auto k3 = stage_rates(v3, R3, w3, thrust, tau, params, t + 0.5 * h);

  const Vec3 v4 = s.v + h * k3.v_dot;
  const Vec3 w4 = s.omega + h * k3.omega_dot;
  const Mat3 R4 = s.R * rodrigues(h * w3);
  const auto k4 = stage_rates(v4, R4, w4, thrust, tau, params, t + h);

  RigidBodyState next;
  next.p = s.p + h / 6.0 * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);
  next.v = s.v + h / 6.0 * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
  next.omega = s.omega + h / 6.0 * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot);
  next.R = gram_schmidt(s.R * rodrigues(h / 6.0 * (w1 + 2.0 * w2 + 2.0 * w3 + w4)));
  return next;
}

AttitudeError attitude_error(const Mat3& R, const Mat3& R_d, const Vec3& omega, const Vec3& omega_d) {
  AttitudeError e;
  e.R_tilde = R_d.transpose() * R;
  const double denom = e.R_tilde.trace() + 1.0;
  if (denom < 1e-6) throw Error(ErrorKind::kSingularity, "attitude error rotation near 180 degrees (tr(R~)+1 < 1e-6)");
  e.g_tilde = vee(e.R_tilde - e.R_tilde.transpose()) / denom;
  e.G = 0.5 * (Mat3::Identity() + hat(e.g_tilde) + e.g_tilde * e.g_tilde.transpose());
  e.omega_tilde = omega - e.R_tilde.transpose() * omega_d;
  e.g_tilde_dot = e.G * e.omega_tilde;
  return e;
}

DesiredAttitude desired_attitude(const Vec3& F_d, double psi_d, const Mat3& R) {
  const double f_norm = F_d.norm();
  if (!(f_norm > kMinThrustNorm)) throw Error(ErrorKind::kDegenerateThrust, "desired force norm below threshold");
  const Vec3 b3 = F_d / f_norm;
  const Vec3 heading(std::cos(psi_d), std::sin(psi_d), 0.0);
  const Vec3 cross = b3.cross(heading);
  const double c_norm = cross.norm();
  if (!(c_norm > kMinHeadingCross))
    throw Error(ErrorKind::kGimbalDegenerate, "desired thrust axis parallel to heading vector");
  const Vec3 b2 = cross / c_norm;
  const Vec3 b1 = b2.cross(b3);
  DesiredAttitude out;
  out.R_d.col(0) = b1;
  out.R_d.col(1) = b2;
  out.R_d.col(2) = b3;
  out.thrust = kE3.dot(R.transpose() * F_d);
  return out;
}

ReferenceSample VtolReference::operator()(double t) const {
  return std::visit(
      Overloaded{
          [](const Hover& h) { return ReferenceSample{h.position, Vec3::Zero(), Vec3::Zero(), h.yaw}; },
          [t](const Circle& c) {
            const double w = c.rate;
            const double cw = std::cos(w * t), sw = std::sin(w * t);
            return ReferenceSample{Vec3(c.radius * cw, c.radius * sw, c.height),
                                   Vec3(-c.radius * w * sw, c.radius * w * cw, 0.0),
                                   Vec3(-c.radius * w * w * cw, -c.radius * w * w * sw, 0.0), c.yaw};
          },
          [t](const Lissajous& l) {
            ReferenceSample r;
            for (int i = 0; i < 3; ++i) {
              const double arg = l.frequency[i] * t + l.phase[i];
              r.p[i] = l.center[i] + l.amplitude[i] * std::sin(arg);
              r.v[i] = l.amplitude[i] * l.frequency[i] * std::cos(arg);
              r.a[i] = -l.amplitude[i] * l.frequency[i] * l.frequency[i] * std::sin(arg);
            }
            r.yaw = l.yaw;
            return r;
          },
      },
      repr_);
}

void VtolGains::validate() const {
  require_positive(omega, "controller.omega");
  require_positive(omega_f, "controller.omega_f");
  require_positive(omega_att, "controller.omega_att");
  require_positive(omega_tau, "controller.omega_tau");
}

VtolController::VtolController(const VtolParams& params, const VtolGains& gains, double dt)
    : mass_(params.mass), gravity_(params.gravity), inertia_(params.inertia), gains_(gains), dt_(dt) {
  params.validate();
  gains.validate();
  require_positive(dt, "sim.dt");
  fx_integral_.fill(RunningIntegral(gains.quadrature));
  taux_integral_.fill(RunningIntegral(gains.quadrature));
}

VtolController::Output VtolController::step(const RigidBodyState& x, const ReferenceSample& ref) {
  Output out;
  const double k0 = gains_.omega * gains_.omega;
  const double k1 = 2.0 * gains_.omega;

  out.p_err = x.p - ref.p;
  out.v_err = x.v - ref.v;
  const Vec3 F_x = -k0 * out.p_err - k1 * out.v_err;
  for (int i = 0; i < 3; ++i)
    out.d_hat_force[i] = gains_.omega_f * (out.v_err[i] - fx_integral_[i].update(F_x[i], dt_));
  out.F_d = -mass_ * (F_x - out.d_hat_force - gravity_ * kE3);

  const auto desired = desired_attitude(out.F_d, ref.yaw, x.R);
  out.R_d = desired.R_d;
  out.thrust = desired.thrust;
  out.omega_d = prev_R_d_ ? Vec3(vee_skew_part(prev_R_d_->transpose() * out.R_d) / dt_) : Vec3::Zero();
  prev_R_d_ = out.R_d;

  out.att = attitude_error(x.R, out.R_d, x.omega, out.omega_d);
  const double ka0 = gains_.omega_att * gains_.omega_att;
  const double ka1 = 2.0 * gains_.omega_att;
  const Vec3 tau_x = -ka0 * out.att.g_tilde - ka1 * out.att.g_tilde_dot;
  for (int i = 0; i < 3; ++i)
    out.d_hat_torque[i] = gains_.omega_tau * (out.att.g_tilde_dot[i] - taux_integral_[i].update(tau_x[i], dt_));
  out.tau = inertia_ * out.att.G.inverse() * (tau_x - out.d_hat_torque);
  return out;
}

Vec3 attitude_lump(const AttitudeError& e, const RigidBodyState& s, const Mat3& J, const Vec3& d_torque,
                   const Vec3& omega_d_dot) {
  const Vec3 inner = J.ldlt().solve(-s.omega.cross(J * s.omega) + d_torque) + e.omega_tilde.cross(s.omega) -
                     e.R_tilde.transpose() * omega_d_dot;
  const double gg = e.g_tilde.squaredNorm();
  return e.G * inner + 2.0 * e.g_tilde.dot(e.g_tilde_dot) * e.g_tilde_dot / (1.0 + gg);
}

SimTrace simulate_vtol(const VtolScenario& sc) {
  if (sc.decimation == 0) throw Error(ErrorKind::kInvalidConfig, "sim.decimation: must be >= 1");
  const std::size_t steps = step_count(sc.duration, sc.dt);
  VtolController controller(sc.params, sc.gains, sc.dt);

  RigidBodyState x;
  if (sc.initial) {
    x = *sc.initial;
  } else {
    const auto r0 = sc.reference(0.0);
    x.p = r0.p;
    x.v = r0.v;
  }

  std::vector<std::string> cols{"t", "px", "py", "pz", "vx", "vy", "vz"};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cols.push_back("R" + std::to_string(i) + std::to_string(j));
  for (const char* c : {"wx", "wy", "wz", "pdx", "pdy", "pdz", "thrust", "taux", "tauy", "tauz",
                        "df_lump_x", "df_lump_y", "df_lump_z", "df_hat_x", "df_hat_y", "df_hat_z",
                        "dtau_lump_x", "dtau_lump_y", "dtau_lump_z", "dtau_hat_x", "dtau_hat_y", "dtau_hat_z",
                        "err_norm", "obs_err", "orth_err", "det_R"})
    cols.emplace_back(c);
  SimTrace trace(cols);
  std::vector<double> row(cols.size());

  Vec3 prev_omega_d = Vec3::Zero();
  bool have_prev = false;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * sc.dt;
    const auto ref = sc.reference(t);

    RigidBodyState measured = x;
    for (int i = 0; i < 3; ++i) {
      measured.p[i] += gaussian_noise(sc.noise, static_cast<std::size_t>(i), k);
      measured.v[i] += gaussian_noise(sc.noise, static_cast<std::size_t>(3 + i), k);
    }
    const auto out = controller.step(measured, ref);

    if (k % sc.decimation == 0) {
      const Vec3 omega_d_dot = have_prev ? Vec3((out.omega_d - prev_omega_d) / sc.dt) : Vec3::Zero();
      const Vec3 df_lump = sc.params.d_force(t) / sc.params.mass - ref.a;
      const Vec3 dtau_lump = attitude_lump(out.att, x, sc.params.inertia, sc.params.d_torque(t), omega_d_dot);
      std::size_t c = 0;
      row[c++] = t;
      for (int i = 0; i < 3; ++i) row[c++] = x.p[i];
      for (int i = 0; i < 3; ++i) row[c++] = x.v[i];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) row[c++] = x.R(i, j);
      for (int i = 0; i < 3; ++i) row[c++] = x.omega[i];
      for (int i = 0; i < 3; ++i) row[c++] = ref.p[i];
      row[c++] = out.thrust;
      for (int i = 0; i < 3; ++i) row[c++] = out.tau[i];
      for (int i = 0; i < 3; ++i) row[c++] = df_lump[i];
      for (int i = 0; i < 3; ++i) row[c++] = out.d_hat_force[i];
      for (int i = 0; i < 3; ++i) row[c++] = dtau_lump[i];
      for (int i = 0; i < 3; ++i) row[c++] = out.d_hat_torque[i];
      row[c++] = (x.p - ref.p).norm();
      row[c++] = (df_lump - out.d_hat_force).norm();
      row[c++] = orthonormality_error(x.R);
      row[c++] = x.R.determinant();
      trace.append(row);
    }
    prev_omega_d = out.omega_d;
    have_prev = true;
    if (k == steps) break;

    x = vtol_step(x, out.thrust, out.tau, sc.params, t, sc.dt);
    const double flat[] = {x.p[0], x.p[1], x.p[2], x.v[0], x.v[1], x.v[2], x.omega[0], x.omega[1], x.omega[2]};
    check_state(flat, k + 1);
  }
  return trace;
}

}  // namespace lumped_pid
