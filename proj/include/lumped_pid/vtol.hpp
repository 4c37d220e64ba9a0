#pragma once

#include <array>
#include <optional>
#include <variant>

#include "lumped_pid/controller.hpp"
#include "lumped_pid/signals.hpp"
#include "lumped_pid/so3.hpp"
#include "lumped_pid/trace.hpp"

namespace lumped_pid {

/// e₃ points along gravity: m·v̇ = m·g·e₃ − f·R·e₃ + d_f.
struct RigidBodyState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Mat3 R = Mat3::Identity();
  Vec3 omega = Vec3::Zero();
};

struct RigidBodyDerivative {
  Vec3 p_dot;
  Vec3 v_dot;
  Mat3 R_dot;
  Vec3 omega_dot;

  double norm() const {
    return std::sqrt(p_dot.squaredNorm() + v_dot.squaredNorm() + R_dot.squaredNorm() + omega_dot.squaredNorm());
  }
};

struct VtolParams {
  double mass = 1.0;
  double gravity = 9.81;
  Mat3 inertia = Vec3(0.0820, 0.0845, 0.1377).asDiagonal();
  std::array<DisturbanceSignal, 3> force_disturbance;
  std::array<DisturbanceSignal, 3> torque_disturbance;

  void validate() const;
  Vec3 d_force(double t) const;
  Vec3 d_torque(double t) const;
};

RigidBodyDerivative vtol_derivative(const RigidBodyState& state, double thrust, const Vec3& tau,
                                    const VtolParams& params, double t);

/// RK4 on (p, v, ω) with the attitude advanced on SO(3): stage attitudes
/// are R·exp(c·dt·ω̂_stage), the final update is R·exp(dt·ω̄) with ω̄ the
/// RK4-weighted mean body rate, then Gram–Schmidt.
RigidBodyState vtol_step(const RigidBodyState& state, double thrust, const Vec3& tau,
                         const VtolParams& params, double t, double dt);

struct AttitudeError {
  Mat3 R_tilde;       // R_dᵀR
  Vec3 g_tilde;       // vee(R̃ − R̃ᵀ)/(tr R̃ + 1)
  Mat3 G;             // ½(I + ĝ + g gᵀ)
  Vec3 omega_tilde;   // ω − R̃ᵀω_d
  Vec3 g_tilde_dot;   // G·ω̃
};

/// Throws kSingularity when tr(R̃) + 1 < 1e-6.
AttitudeError attitude_error(const Mat3& R, const Mat3& R_d, const Vec3& omega, const Vec3& omega_d);

struct DesiredAttitude {
  Mat3 R_d;
  double thrust;  // e₃ᵀRᵀF_d with the current attitude R
};

inline constexpr double kMinThrustNorm = 1e-9;
inline constexpr double kMinHeadingCross = 1e-9;

/// R_d = [b₂d × b₃d, (b₃d × b_d)/‖b₃d × b_d‖, F_d/‖F_d‖] with
/// b_d = [cos ψ_d, sin ψ_d, 0].
DesiredAttitude desired_attitude(const Vec3& F_d, double psi_d, const Mat3& R);

struct ReferenceSample {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  double yaw = 0.0;
};

class VtolReference {
 public:
  struct Hover {
    Vec3 position = Vec3::Zero();
    double yaw = 0.0;
  };
  struct Circle {
    double radius = 1.0;
    double rate = 1.0;  // rad/s
    double height = 0.0;
    double yaw = 0.0;
  };
  struct Lissajous {
    Vec3 center = Vec3::Zero();
    Vec3 amplitude = Vec3::Ones();
    Vec3 frequency = Vec3::Ones();
    Vec3 phase = Vec3::Zero();
    double yaw = 0.0;
  };

  VtolReference() : repr_(Hover{}) {}
  VtolReference(Hover h) : repr_(h) {}
  VtolReference(Circle c) : repr_(c) {}
  VtolReference(Lissajous l) : repr_(l) {}

  ReferenceSample operator()(double t) const;

 private:
  std::variant<Hover, Circle, Lissajous> repr_;
};

/// Translational and attitude loops share the repeated-pole structure
/// k₀ = ω², k₁ = 2ω, each with its own ω.
struct VtolGains {
  double omega = 2.0;       // translational homogeneous bandwidth
  double omega_f = 10.0;    // translational observer bandwidth
  double omega_att = 10.0;  // attitude homogeneous bandwidth
  double omega_tau = 40.0;  // attitude observer bandwidth
  Quadrature quadrature = Quadrature::kRectangular;

  void validate() const;
};

class VtolController {
 public:
  struct Output {
    double thrust;
    Vec3 tau;
    Vec3 F_d;
    Mat3 R_d;
    Vec3 omega_d;
    Vec3 p_err;
    Vec3 v_err;
    Vec3 d_hat_force;   // estimate of d_f/m − p̈_d
    Vec3 d_hat_torque;  // estimate of the attitude-channel lump
    AttitudeError att;
  };

  VtolController(const VtolParams& params, const VtolGains& gains, double dt);

  /// ω_d comes from a backward difference of R_d between calls (zero on
  /// the first call).
  Output step(const RigidBodyState& measured, const ReferenceSample& ref);

 private:
  double mass_;
  double gravity_;
  Mat3 inertia_;
  VtolGains gains_;
  double dt_;
  std::array<RunningIntegral, 3> fx_integral_;
  std::array<RunningIntegral, 3> taux_integral_;
  std::optional<Mat3> prev_R_d_;
};

/// Attitude-channel lumped disturbance
/// G(J⁻¹(−ω×Jω + d_τ) + ω̃×ω − R̃ᵀω̇_d) + 2(g̃ᵀġ̃)ġ̃/(1 + g̃ᵀg̃).
Vec3 attitude_lump(const AttitudeError& err, const RigidBodyState& state, const Mat3& inertia,
                   const Vec3& d_torque, const Vec3& omega_d_dot);

struct VtolScenario {
  VtolParams params;
  VtolReference reference;
  VtolGains gains;
  std::optional<RigidBodyState> initial;  // default: on the reference, level, at rest
  NoiseSpec noise;                        // channels 0-2 position, 3-5 velocity
  double dt = 1e-3;
  double duration = 10.0;
  std::size_t decimation = 1;
};

/// Columns: t, p, v, R (row-major), ω, p_d, thrust, τ, translational lump
/// truth/estimate, attitude lump truth/estimate, err_norm, obs_err,
/// orth_err, det_R.
SimTrace simulate_vtol(const VtolScenario& scenario);

}  // namespace lumped_pid
