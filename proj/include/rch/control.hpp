#pragma once

// Feedback laws for the controlled systems, the affine state maps that relate
// closed loops, and the pullback residual that certifies two closed loops
// produce the same equations of motion.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rch/systems.hpp"

namespace rch {

enum class ControlKind { ConstantTorqueP, RotorGainK, HeavyTopRotorGainK, BlochLaw, Custom };

/// p x Omega
inline Vec3 torque_law_p(const Vec3& p, const Vec3& omega) { return p.cross(omega); }

/// k (Pi x Omega), applied to the rotor momenta. Along the closed loop
/// l - k Pi is a first integral.
inline Vec3 rotor_gain_law(double k, const Vec3& pi, const Vec3& omega) {
  return k * pi.cross(omega);
}

/// First two components of k (Gamma x Omega). Components 1 and 2 of
/// l - k Gamma are first integrals of the closed loop.
inline Vec2 ht_rotor_gain_law(double k, const Vec3& gamma, const Vec3& omega) {
  return (k * gamma.cross(omega)).head<2>();
}

/// (0, 0, -eps (I1 - I2) / (I1 I2) Pi1 Pi2)
Vec3 bloch_law(double eps, const Vec3& inertia, const Vec3& pi);

class ControlLaw {
 public:
  using CustomFn = std::function<VecX(const SystemDef&, const ReducedState&)>;

  static ControlLaw constant_torque_p(const Vec3& p);
  static ControlLaw rotor_gain(double k);
  static ControlLaw heavy_top_rotor_gain(double k);
  static ControlLaw bloch(double eps);
  /// `fn` returns the control in channel coordinates or flat coordinates.
  static ControlLaw custom(std::string name, std::vector<double> table, CustomFn fn);
  /// Custom law returning a fixed body torque (torque-channel systems).
  static ControlLaw constant_body_torque(const Vec3& tau);

  ControlKind kind() const { return kind_; }
  const Vec3& p() const { return p_; }
  double gain() const { return gain_; }
  const std::string& name() const { return name_; }
  const std::vector<double>& table() const { return table_; }

  bool admissible_for(SystemKind kind) const;

  /// Control for `sys` at `s` (channel or flat coordinates; see
  /// SystemDef::lift_control). Throws VariantMismatch if the law is not
  /// admissible for the system.
  VecX evaluate(const SystemDef& sys, const ReducedState& s) const;

 private:
  ControlKind kind_ = ControlKind::Custom;
  Vec3 p_ = Vec3::Zero();
  double gain_ = 0.0;
  std::string name_;
  std::vector<double> table_;
  CustomFn fn_;
};

/// Closed-loop vector field in flat coordinates.
VecX closed_loop_vf(const SystemDef& sys, const std::optional<ControlLaw>& law,
                    const ReducedState& s);

/// Affine map between flat state spaces.
struct EquivalenceMap {
  std::string description;
  std::size_t source_dim = 0;
  std::size_t target_dim = 0;
  MatX jacobian;  // target_dim x source_dim
  VecX offset;    // target_dim

  VecX forward(const VecX& x) const { return jacobian * x + offset; }
};

/// N = Pi - l from (Pi, alpha, l) to so(3)*. On l = k Pi + p this is
/// (1 - k) Pi - p. Throws DegenerateGain for k = 1.
EquivalenceMap equiv_map_rotor_to_torque(double k, const Vec3& p);

/// N = Pi + Gamma from se(3)* to so(3)*.
EquivalenceMap equiv_map_heavy_top();

/// N = Pi + Gamma - (l1, l2, 0) from se(3)* x R^2 x R^2 to so(3)*.
EquivalenceMap equiv_map_ht_rotor(double k, const Vec3& p0);

/// max over samples of | vf_target(map(x), u_target) - jacobian vf_source(x, u_source) |.
/// Throws DimensionMismatch if the map does not connect the two state spaces.
double matching_residual(const SystemDef& target, const std::optional<ControlLaw>& target_law,
                         const SystemDef& source, const std::optional<ControlLaw>& source_law,
                         const EquivalenceMap& map, std::span<const ReducedState> samples);

}  // namespace rch
