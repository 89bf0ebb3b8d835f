#pragma once

// Concrete controlled Hamiltonian systems on reduced spaces:
//
//   rigid_body          so(3)*                 Pi' = Pi x Omega
//   rigid_body_torque   so(3)*                 Pi' = Pi x Omega + u
//   rigid_body_rotors   so(3)* x R^3 x R^3     Pi' = Pi x Omega, alpha' = dh/dl, l' = u
//   heavy_top           se(3)*                 Pi' = Pi x Omega + mgh Gamma x chi,
//                                              Gamma' = Gamma x Omega
//   heavy_top_rotors    se(3)* x R^2 x R^2     as heavy_top, theta' = dh/dl, l' = u
//
// plus the unreduced rigid body on T*SO(3) ~ SO(3) x so(3)* (left trivialized).

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rch/algebra.hpp"
#include "rch/poisson.hpp"

namespace rch {

using Vec2 = Eigen::Vector2d;

enum class SystemKind { RigidBody, RigidBodyTorque, RigidBodyRotors, HeavyTop, HeavyTopRotors };

std::string_view to_string(SystemKind kind);

struct RigidBodyParams {
  Vec3 inertia = Vec3::Ones();
  /// Throws SingularInertia unless every I_i > 0 (and finite).
  void validate() const;
};

/// Rigid body with three rotors: locked inertias Ibar_i and rotor axial inertias J_i.
struct RigidBodyRotorParams {
  Vec3 ibar = Vec3::Ones();
  Vec3 jrotor = Vec3::Ones();
  void validate() const;
};

struct HeavyTopParams {
  Vec3 inertia = Vec3::Ones();
  double mgh = 0.0;
  Vec3 chi = Vec3::UnitZ();
  /// Also requires |chi| = 1 within 1e-12 and mgh >= 0.
  void validate() const;
};

/// Heavy top with two rotor pairs along the first two principal axes.
/// ibar holds (Ibar_1, Ibar_2, Ibar_3).
struct HeavyTopRotorParams {
  Vec3 ibar = Vec3::Ones();
  Vec2 jrotor = Vec2::Ones();
  double mgh = 0.0;
  Vec3 chi = Vec3::UnitZ();
  void validate() const;
};

struct RbState {
  Vec3 pi = Vec3::Zero();
};

struct RbRotorState {
  Vec3 pi = Vec3::Zero();
  Vec3 alpha = Vec3::Zero();
  Vec3 ell = Vec3::Zero();
};

struct HtState {
  Vec3 pi = Vec3::Zero();
  Vec3 gamma = Vec3::Zero();
};

struct HtRotorState {
  Vec3 pi = Vec3::Zero();
  Vec3 gamma = Vec3::Zero();
  Vec2 theta = Vec2::Zero();
  Vec2 ell = Vec2::Zero();
};

using ReducedState = std::variant<RbState, RbRotorState, HtState, HtRotorState>;

/// Flat coordinates in ProductPoint layout.
VecX flatten(const ReducedState& s);
ProductPoint to_point(const ReducedState& s);
/// Body momentum Pi of any variant.
Vec3 body_momentum(const ReducedState& s);

struct HamiltonianEval {
  double value = 0.0;
  Gradient grad;
};

/// 1/2 sum Pi_i^2 / I_i; dh/dPi = Omega.
HamiltonianEval rb_hamiltonian(const RigidBodyParams& params, const Vec3& pi);
/// 1/2 [sum (Pi_i - l_i)^2 / Ibar_i + sum l_i^2 / J_i].
HamiltonianEval rb_rotor_hamiltonian(const RigidBodyRotorParams& params, const Vec3& pi,
                                     const Vec3& ell);
/// 1/2 sum Pi_i^2 / I_i + mgh Gamma . chi.
HamiltonianEval ht_hamiltonian(const HeavyTopParams& params, const SE3CoalgebraPoint& p);
/// 1/2 [(Pi_1-l_1)^2/Ibar_1 + (Pi_2-l_2)^2/Ibar_2 + Pi_3^2/Ibar_3 + l_1^2/J_1 + l_2^2/J_2]
///   + mgh Gamma . chi.
HamiltonianEval ht_rotor_hamiltonian(const HeavyTopRotorParams& params, const SE3CoalgebraPoint& p,
                                     const Vec2& theta, const Vec2& ell);

/// A system together with its Hamiltonian, vector field and control subset.
class SystemDef {
 public:
  using Params = std::variant<RigidBodyParams, RigidBodyRotorParams, HeavyTopParams,
                              HeavyTopRotorParams>;

  static SystemDef rigid_body(const RigidBodyParams& params);
  static SystemDef rigid_body_torque(const RigidBodyParams& params);
  static SystemDef rigid_body_rotors(const RigidBodyRotorParams& params);
  static SystemDef heavy_top(const HeavyTopParams& params);
  static SystemDef heavy_top_rotors(const HeavyTopRotorParams& params);

  SystemKind kind() const { return kind_; }
  const Params& params() const { return params_; }
  Space space() const;
  std::size_t rotor_count() const;
  /// Dimension of the flat state.
  std::size_t dim() const;

  /// Throws VariantMismatch unless `s` is a state of this system.
  void check_state(const ReducedState& s) const;
  ReducedState state_from_flat(const VecX& x) const;
  ReducedState zero_state() const;

  HamiltonianEval evaluate(const ReducedState& s) const;
  double hamiltonian(const ReducedState& s) const { return evaluate(s).value; }
  /// The Hamiltonian as a function on ProductPoints of this system's shape.
  SmoothFn hamiltonian_fn() const;
  /// Body angular velocity Omega = dh/dPi.
  Vec3 angular_velocity(const ReducedState& s) const;
  std::vector<SmoothFn> casimirs() const { return rch::casimirs(space()); }

  /// Orthonormal basis (dim x m) of admissible control directions in flat
  /// coordinates. Empty (m = 0) for the uncontrolled systems.
  const MatX& control_channels() const { return channels_; }

  /// Maps a control given either in channel coordinates (size m) or in flat
  /// state coordinates (size dim) to a flat state-tangent vector. Throws
  /// ControlOutsideW if a flat control has components outside the channels
  /// beyond 1e-12, DimensionMismatch for any other size. An empty vector is
  /// the zero control.
  VecX lift_control(const VecX& u) const;

  /// Controlled vector field in flat coordinates.
  VecX vector_field(const ReducedState& s, const VecX& u = VecX()) const;

 private:
  SystemDef(SystemKind kind, Params params);

  SystemKind kind_;
  Params params_;
  MatX channels_;
};

/// Free-function form of SystemDef::vector_field.
inline VecX reduced_vf(const SystemDef& sys, const ReducedState& s, const VecX& u = VecX()) {
  return sys.vector_field(s, u);
}

// ---------------------------------------------------------------------------
// Unreduced rigid body on SO(3) x so(3)*.

struct FullState {
  Rotation3 attitude;
  Vec3 pi = Vec3::Zero();
};

struct FullDerivative {
  Mat3 attitude_dot = Mat3::Zero();
  Vec3 pi_dot = Vec3::Zero();
};

/// A' = A hat(Omega), Pi' = Pi x Omega + torque (body frame).
FullDerivative full_rb_vf(const RigidBodyParams& params, const FullState& s, const Vec3& torque);

/// Spatial angular momentum A Pi, the momentum map of the cotangent-lifted
/// left action.
inline Vec3 momentum_map_so3(const FullState& s) { return s.attitude * s.pi; }

// ---------------------------------------------------------------------------
// Legendre transforms.

/// Pi = I Omega.
Vec3 legendre(const RigidBodyParams& params, const Vec3& omega);
Vec3 legendre_inverse(const RigidBodyParams& params, const Vec3& pi);

struct RotorVelocities {
  Vec3 omega = Vec3::Zero();
  Vec3 alpha_dot = Vec3::Zero();
};

struct RotorMomenta {
  Vec3 pi = Vec3::Zero();
  Vec3 ell = Vec3::Zero();
};

/// l_i = J_i (Omega_i + alpha_dot_i), Pi_i = Ibar_i Omega_i + l_i.
RotorMomenta legendre(const RigidBodyRotorParams& params, const RotorVelocities& v);
RotorVelocities legendre_inverse(const RigidBodyRotorParams& params, const RotorMomenta& m);

struct HtRotorVelocities {
  Vec3 omega = Vec3::Zero();
  Vec2 theta_dot = Vec2::Zero();
};

struct HtRotorMomenta {
  Vec3 pi = Vec3::Zero();
  Vec2 ell = Vec2::Zero();
};

/// l_i = J_i (Omega_i + theta_dot_i) for i = 1, 2; Pi_i = Ibar_i Omega_i + l_i
/// for i = 1, 2 and Pi_3 = Ibar_3 Omega_3.
HtRotorMomenta legendre(const HeavyTopRotorParams& params, const HtRotorVelocities& v);
HtRotorVelocities legendre_inverse(const HeavyTopRotorParams& params, const HtRotorMomenta& m);

}  // namespace rch
