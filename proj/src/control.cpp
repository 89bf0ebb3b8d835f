#include "rch/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rch/errors.hpp"

namespace rch {

Vec3 bloch_law(double eps, const Vec3& inertia, const Vec3& pi) {
  if (inertia(0) <= 0.0 || inertia(1) <= 0.0) {
    throw Error(ErrorKind::SingularInertia, "bloch law needs I1, I2 > 0");
  }
  const double c = -eps * (inertia(0) - inertia(1)) / (inertia(0) * inertia(1));
  return {0.0, 0.0, c * pi(0) * pi(1)};
}

ControlLaw ControlLaw::constant_torque_p(const Vec3& p) {
  ControlLaw law;
  law.kind_ = ControlKind::ConstantTorqueP;
  law.p_ = p;
  law.name_ = "torque_p";
  return law;
}

ControlLaw ControlLaw::rotor_gain(double k) {
  ControlLaw law;
  law.kind_ = ControlKind::RotorGainK;
  law.gain_ = k;
  law.name_ = "rotor_gain";
  return law;
}

ControlLaw ControlLaw::heavy_top_rotor_gain(double k) {
  ControlLaw law;
  law.kind_ = ControlKind::HeavyTopRotorGainK;
  law.gain_ = k;
  law.name_ = "ht_rotor_gain";
  return law;
}

ControlLaw ControlLaw::bloch(double eps) {
  ControlLaw law;
  law.kind_ = ControlKind::BlochLaw;
  law.gain_ = eps;
  law.name_ = "bloch";
  return law;
}

ControlLaw ControlLaw::custom(std::string name, std::vector<double> table, CustomFn fn) {
  ControlLaw law;
  law.kind_ = ControlKind::Custom;
  law.name_ = std::move(name);
  law.table_ = std::move(table);
  law.fn_ = std::move(fn);
  return law;
}

ControlLaw ControlLaw::constant_body_torque(const Vec3& tau) {
  return custom("constant_torque", {tau(0), tau(1), tau(2)},
                [tau](const SystemDef&, const ReducedState&) { return VecX(tau); });
}

bool ControlLaw::admissible_for(SystemKind kind) const {
  switch (kind_) {
    case ControlKind::ConstantTorqueP: return kind == SystemKind::RigidBodyTorque;
    case ControlKind::RotorGainK:
    case ControlKind::BlochLaw: return kind == SystemKind::RigidBodyRotors;
    case ControlKind::HeavyTopRotorGainK: return kind == SystemKind::HeavyTopRotors;
    case ControlKind::Custom:
      return kind == SystemKind::RigidBodyTorque || kind == SystemKind::RigidBodyRotors ||
             kind == SystemKind::HeavyTopRotors;
  }
  return false;
}

VecX ControlLaw::evaluate(const SystemDef& sys, const ReducedState& s) const {
  if (!admissible_for(sys.kind())) {
    throw Error(ErrorKind::VariantMismatch, "control '" + name_ + "' not admissible for system '" +
                                                std::string(to_string(sys.kind())) + "'");
  }
  switch (kind_) {
    case ControlKind::ConstantTorqueP:
      return torque_law_p(p_, sys.angular_velocity(s));
    case ControlKind::RotorGainK:
      return rotor_gain_law(gain_, body_momentum(s), sys.angular_velocity(s));
    case ControlKind::HeavyTopRotorGainK:
      return ht_rotor_gain_law(gain_, std::get<HtRotorState>(s).gamma, sys.angular_velocity(s));
    case ControlKind::BlochLaw:
      return bloch_law(gain_, std::get<RigidBodyRotorParams>(sys.params()).ibar, body_momentum(s));
    case ControlKind::Custom:
      return fn_(sys, s);
  }
  return VecX();
}

VecX closed_loop_vf(const SystemDef& sys, const std::optional<ControlLaw>& law,
                    const ReducedState& s) {
  if (!law) return sys.vector_field(s);
  return sys.vector_field(s, law->evaluate(sys, s));
}

EquivalenceMap equiv_map_rotor_to_torque(double k, const Vec3& p) {
  if (k == 1.0) {
    throw Error(ErrorKind::DegenerateGain, "k = 1 collapses N = (1 - k) Pi - p to a constant");
  }
  EquivalenceMap m;
  m.description = "N = Pi - l  (= (1 - k) Pi - p on l = k Pi + p, k = " + std::to_string(k) +
                  ", p = [" + std::to_string(p(0)) + ", " + std::to_string(p(1)) + ", " +
                  std::to_string(p(2)) + "])";
  m.source_dim = 9;
  m.target_dim = 3;
  m.jacobian = MatX::Zero(3, 9);
  m.jacobian.leftCols(3) = MatX::Identity(3, 3);
  m.jacobian.rightCols(3) = -MatX::Identity(3, 3);
  m.offset = VecX::Zero(3);
  return m;
}

EquivalenceMap equiv_map_heavy_top() {
  EquivalenceMap m;
  m.description = "N = Pi + Gamma";
  m.source_dim = 6;
  m.target_dim = 3;
  m.jacobian = MatX::Zero(3, 6);
  m.jacobian.leftCols(3) = MatX::Identity(3, 3);
  m.jacobian.middleCols(3, 3) = MatX::Identity(3, 3);
  m.offset = VecX::Zero(3);
  return m;
}

EquivalenceMap equiv_map_ht_rotor(double k, const Vec3& p0) {
  EquivalenceMap m;
  m.description = "N = Pi + Gamma - (l1, l2, 0)  (= Pi + (1 - k) Gamma - p0 on lbar = k Gamma + p0, k = " +
                  std::to_string(k) + ", p0 = [" + std::to_string(p0(0)) + ", " +
                  std::to_string(p0(1)) + ", " + std::to_string(p0(2)) + "])";
  m.source_dim = 10;
  m.target_dim = 3;
  m.jacobian = MatX::Zero(3, 10);
  m.jacobian.leftCols(3) = MatX::Identity(3, 3);
  m.jacobian.middleCols(3, 3) = MatX::Identity(3, 3);
  m.jacobian(0, 8) = -1.0;
  m.jacobian(1, 9) = -1.0;
  m.offset = VecX::Zero(3);
  return m;
}

double matching_residual(const SystemDef& target, const std::optional<ControlLaw>& target_law,
                         const SystemDef& source, const std::optional<ControlLaw>& source_law,
                         const EquivalenceMap& map, std::span<const ReducedState> samples) {
  if (map.source_dim != source.dim() || map.target_dim != target.dim() ||
      static_cast<std::size_t>(map.jacobian.rows()) != map.target_dim ||
      static_cast<std::size_t>(map.jacobian.cols()) != map.source_dim) {
    throw Error(ErrorKind::DimensionMismatch, "equivalence map does not connect the two systems");
  }
  double worst = 0.0;
  for (const ReducedState& x : samples) {
    const VecX flat = flatten(x);
    const ReducedState y = target.state_from_flat(map.forward(flat));
    const VecX lhs = closed_loop_vf(target, target_law, y);
    const VecX rhs = map.jacobian * closed_loop_vf(source, source_law, x);
    const double r = (lhs - rhs).norm();
    if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace rch
