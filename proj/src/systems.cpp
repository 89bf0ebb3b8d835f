#include "rch/systems.hpp"

#include <cmath>

#include "rch/errors.hpp"

namespace rch {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <class Vec>
void require_positive(const Vec& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i)) || v(i) <= 0.0) {
      throw Error(ErrorKind::SingularInertia,
                  std::string(what) + " must be positive, component " + std::to_string(i + 1) +
                      " is " + std::to_string(v(i)));
    }
  }
}

void require_gravity(double mgh, const Vec3& chi) {
  if (!std::isfinite(mgh) || mgh < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "mgh must be finite and non-negative");
  }
  if (!chi.allFinite() || std::abs(chi.norm() - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "chi must be unit length");
  }
}

Gradient rotor_gradient(const Vec3& d_pi, const Vec3& d_gamma, const VecX& d_theta,
                        const VecX& d_ell) {
  Gradient g;
  g.d_pi = d_pi;
  g.d_gamma = d_gamma;
  g.d_theta = d_theta;
  g.d_ell = d_ell;
  return g;
}

}  // namespace

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::RigidBody: return "rigid_body";
    case SystemKind::RigidBodyTorque: return "rigid_body_torque";
    case SystemKind::RigidBodyRotors: return "rigid_body_rotors";
    case SystemKind::HeavyTop: return "heavy_top";
    case SystemKind::HeavyTopRotors: return "heavy_top_rotors";
  }
  return "unknown";
}

void RigidBodyParams::validate() const { require_positive(inertia, "inertia"); }

void RigidBodyRotorParams::validate() const {
  require_positive(ibar, "ibar");
  require_positive(jrotor, "jrotor");
}

void HeavyTopParams::validate() const {
  require_positive(inertia, "inertia");
  require_gravity(mgh, chi);
}

void HeavyTopRotorParams::validate() const {
  require_positive(ibar, "ibar");
  require_positive(jrotor, "jrotor");
  require_gravity(mgh, chi);
}

// ---------------------------------------------------------------------------

ProductPoint to_point(const ReducedState& s) {
  return std::visit(
      overloaded{
          [](const RbState& x) { return ProductPoint::so3(x.pi); },
          [](const RbRotorState& x) {
            return ProductPoint::with_rotors(ProductPoint::so3(x.pi), x.alpha, x.ell);
          },
          [](const HtState& x) { return ProductPoint::se3({x.pi, x.gamma}); },
          [](const HtRotorState& x) {
            return ProductPoint::with_rotors(ProductPoint::se3({x.pi, x.gamma}), x.theta, x.ell);
          },
      },
      s);
}

VecX flatten(const ReducedState& s) { return to_point(s).flat(); }

Vec3 body_momentum(const ReducedState& s) {
  return std::visit([](const auto& x) -> Vec3 { return x.pi; }, s);
}

// ---------------------------------------------------------------------------

HamiltonianEval rb_hamiltonian(const RigidBodyParams& params, const Vec3& pi) {
  const Vec3 omega = pi.cwiseQuotient(params.inertia);
  return {0.5 * pi.dot(omega), rotor_gradient(omega, Vec3::Zero(), VecX(), VecX())};
}

HamiltonianEval rb_rotor_hamiltonian(const RigidBodyRotorParams& params, const Vec3& pi,
                                     const Vec3& ell) {
  const Vec3 rel = pi - ell;
  const Vec3 omega = rel.cwiseQuotient(params.ibar);
  const Vec3 spin = ell.cwiseQuotient(params.jrotor);
  const double value = 0.5 * (rel.dot(omega) + ell.dot(spin));
  return {value, rotor_gradient(omega, Vec3::Zero(), VecX::Zero(3), VecX(spin - omega))};
}

HamiltonianEval ht_hamiltonian(const HeavyTopParams& params, const SE3CoalgebraPoint& p) {
  const Vec3 omega = p.pi.cwiseQuotient(params.inertia);
  const double value = 0.5 * p.pi.dot(omega) + params.mgh * p.gamma.dot(params.chi);
  return {value, rotor_gradient(omega, params.mgh * params.chi, VecX(), VecX())};
}

HamiltonianEval ht_rotor_hamiltonian(const HeavyTopRotorParams& params, const SE3CoalgebraPoint& p,
                                     const Vec2& /*theta*/, const Vec2& ell) {
  const Vec3 lbar(ell(0), ell(1), 0.0);
  const Vec3 rel = p.pi - lbar;
  const Vec3 omega = rel.cwiseQuotient(params.ibar);
  const Vec2 spin = ell.cwiseQuotient(params.jrotor);
  const double value =
      0.5 * (rel.dot(omega) + ell.dot(spin)) + params.mgh * p.gamma.dot(params.chi);
  const Vec2 d_ell = spin - omega.head<2>();
  return {value, rotor_gradient(omega, params.mgh * params.chi, VecX::Zero(2), VecX(d_ell))};
}

// ---------------------------------------------------------------------------

SystemDef::SystemDef(SystemKind kind, Params params) : kind_(kind), params_(std::move(params)) {
  const auto n = static_cast<Eigen::Index>(dim());
  switch (kind_) {
    case SystemKind::RigidBody:
    case SystemKind::HeavyTop:
      channels_ = MatX::Zero(n, 0);
      break;
    case SystemKind::RigidBodyTorque:
      channels_ = MatX::Identity(n, 3);
      break;
    case SystemKind::RigidBodyRotors:
      channels_ = MatX::Zero(n, 3);
      channels_.bottomRows(3) = MatX::Identity(3, 3);
      break;
    case SystemKind::HeavyTopRotors:
      channels_ = MatX::Zero(n, 2);
      channels_.bottomRows(2) = MatX::Identity(2, 2);
      break;
  }
}

SystemDef SystemDef::rigid_body(const RigidBodyParams& params) {
  params.validate();
  return SystemDef(SystemKind::RigidBody, params);
}

SystemDef SystemDef::rigid_body_torque(const RigidBodyParams& params) {
  params.validate();
  return SystemDef(SystemKind::RigidBodyTorque, params);
}

SystemDef SystemDef::rigid_body_rotors(const RigidBodyRotorParams& params) {
  params.validate();
  return SystemDef(SystemKind::RigidBodyRotors, params);
}

SystemDef SystemDef::heavy_top(const HeavyTopParams& params) {
  params.validate();
  return SystemDef(SystemKind::HeavyTop, params);
}

SystemDef SystemDef::heavy_top_rotors(const HeavyTopRotorParams& params) {
  params.validate();
  return SystemDef(SystemKind::HeavyTopRotors, params);
}

Space SystemDef::space() const {
  return (kind_ == SystemKind::HeavyTop || kind_ == SystemKind::HeavyTopRotors) ? Space::SE3Dual
                                                                                 : Space::SO3Dual;
}

std::size_t SystemDef::rotor_count() const {
  switch (kind_) {
    case SystemKind::RigidBodyRotors: return 3;
    case SystemKind::HeavyTopRotors: return 2;
    default: return 0;
  }
}

std::size_t SystemDef::dim() const {
  return (space() == Space::SO3Dual ? 3 : 6) + 2 * rotor_count();
}

void SystemDef::check_state(const ReducedState& s) const {
  bool ok = false;
  switch (kind_) {
    case SystemKind::RigidBody:
    case SystemKind::RigidBodyTorque: ok = std::holds_alternative<RbState>(s); break;
    case SystemKind::RigidBodyRotors: ok = std::holds_alternative<RbRotorState>(s); break;
    case SystemKind::HeavyTop: ok = std::holds_alternative<HtState>(s); break;
    case SystemKind::HeavyTopRotors: ok = std::holds_alternative<HtRotorState>(s); break;
  }
  if (!ok) {
    throw Error(ErrorKind::VariantMismatch,
                "state variant does not match system " + std::string(to_string(kind_)));
  }
}

ReducedState SystemDef::state_from_flat(const VecX& x) const {
  const ProductPoint p = ProductPoint::from_flat(space(), rotor_count(), x);
  switch (kind_) {
    case SystemKind::RigidBody:
    case SystemKind::RigidBodyTorque: return RbState{p.pi};
    case SystemKind::RigidBodyRotors: return RbRotorState{p.pi, p.theta, p.ell};
    case SystemKind::HeavyTop: return HtState{p.pi, p.gamma};
    case SystemKind::HeavyTopRotors: return HtRotorState{p.pi, p.gamma, p.theta, p.ell};
  }
  throw Error(ErrorKind::VariantMismatch, "unknown system kind");
}

ReducedState SystemDef::zero_state() const {
  return state_from_flat(VecX::Zero(static_cast<Eigen::Index>(dim())));
}

HamiltonianEval SystemDef::evaluate(const ReducedState& s) const {
  check_state(s);
  switch (kind_) {
    case SystemKind::RigidBody:
    case SystemKind::RigidBodyTorque:
      return rb_hamiltonian(std::get<RigidBodyParams>(params_), std::get<RbState>(s).pi);
    case SystemKind::RigidBodyRotors: {
      const auto& x = std::get<RbRotorState>(s);
      return rb_rotor_hamiltonian(std::get<RigidBodyRotorParams>(params_), x.pi, x.ell);
    }
    case SystemKind::HeavyTop: {
      const auto& x = std::get<HtState>(s);
      return ht_hamiltonian(std::get<HeavyTopParams>(params_), {x.pi, x.gamma});
    }
    case SystemKind::HeavyTopRotors: {
      const auto& x = std::get<HtRotorState>(s);
      return ht_rotor_hamiltonian(std::get<HeavyTopRotorParams>(params_), {x.pi, x.gamma},
                                  x.theta, x.ell);
    }
  }
  throw Error(ErrorKind::VariantMismatch, "unknown system kind");
}

SmoothFn SystemDef::hamiltonian_fn() const {
  const SystemDef self = *this;
  return {[self](const ProductPoint& p) {
            return self.evaluate(self.state_from_flat(p.flat())).value;
          },
          [self](const ProductPoint& p) {
            return self.evaluate(self.state_from_flat(p.flat())).grad;
          }};
}

Vec3 SystemDef::angular_velocity(const ReducedState& s) const { return evaluate(s).grad.d_pi; }

VecX SystemDef::lift_control(const VecX& u) const {
  const auto n = static_cast<Eigen::Index>(dim());
  if (u.size() == 0) return VecX::Zero(n);
  if (!u.allFinite()) throw Error(ErrorKind::NonFinite, "control has non-finite components");
  const auto m = channels_.cols();
  if (u.size() == m) return channels_ * u;
  if (u.size() == n) {
    const VecX inside = channels_ * (channels_.transpose() * u);
    const double outside = (u - inside).cwiseAbs().maxCoeff();
    if (outside > 1e-12) {
      throw Error(ErrorKind::ControlOutsideW,
                  "control has components outside the admissible channels of " +
                      std::string(to_string(kind_)));
    }
    return inside;
  }
  throw Error(ErrorKind::DimensionMismatch, "control vector has size " + std::to_string(u.size()));
}

VecX SystemDef::vector_field(const ReducedState& s, const VecX& u) const {
  const HamiltonianEval h = evaluate(s);
  const Vec3& omega = h.grad.d_pi;
  VecX out(static_cast<Eigen::Index>(dim()));
  switch (kind_) {
    case SystemKind::RigidBody:
    case SystemKind::RigidBodyTorque: {
      out = ham_vf_so3(omega, std::get<RbState>(s).pi);
      break;
    }
    case SystemKind::RigidBodyRotors: {
      const auto& x = std::get<RbRotorState>(s);
      out << ham_vf_so3(omega, x.pi), h.grad.d_ell, Vec3::Zero();
      break;
    }
    case SystemKind::HeavyTop: {
      const auto& x = std::get<HtState>(s);
      const SE3CoalgebraPoint d = ham_vf_se3(omega, h.grad.d_gamma, {x.pi, x.gamma});
      out << d.pi, d.gamma;
      break;
    }
    case SystemKind::HeavyTopRotors: {
      const auto& x = std::get<HtRotorState>(s);
      const SE3CoalgebraPoint d = ham_vf_se3(omega, h.grad.d_gamma, {x.pi, x.gamma});
      out << d.pi, d.gamma, h.grad.d_ell, Vec2::Zero();
      break;
    }
  }
  return out + lift_control(u);
}

// ---------------------------------------------------------------------------

FullDerivative full_rb_vf(const RigidBodyParams& params, const FullState& s, const Vec3& torque) {
  const Vec3 omega = s.pi.cwiseQuotient(params.inertia);
  return {s.attitude.matrix() * hat(omega), s.pi.cross(omega) + torque};
}

Vec3 legendre(const RigidBodyParams& params, const Vec3& omega) {
  params.validate();
  return params.inertia.cwiseProduct(omega);
}

Vec3 legendre_inverse(const RigidBodyParams& params, const Vec3& pi) {
  params.validate();
  return pi.cwiseQuotient(params.inertia);
}

RotorMomenta legendre(const RigidBodyRotorParams& params, const RotorVelocities& v) {
  params.validate();
  const Vec3 ell = params.jrotor.cwiseProduct(v.omega + v.alpha_dot);
  return {params.ibar.cwiseProduct(v.omega) + ell, ell};
}

RotorVelocities legendre_inverse(const RigidBodyRotorParams& params, const RotorMomenta& m) {
  params.validate();
  const Vec3 omega = (m.pi - m.ell).cwiseQuotient(params.ibar);
  return {omega, m.ell.cwiseQuotient(params.jrotor) - omega};
}

HtRotorMomenta legendre(const HeavyTopRotorParams& params, const HtRotorVelocities& v) {
  params.validate();
  const Vec2 ell = params.jrotor.cwiseProduct(v.omega.head<2>() + v.theta_dot);
  Vec3 pi = params.ibar.cwiseProduct(v.omega);
  pi.head<2>() += ell;
  return {pi, ell};
}

HtRotorVelocities legendre_inverse(const HeavyTopRotorParams& params, const HtRotorMomenta& m) {
  params.validate();
  const Vec3 lbar(m.ell(0), m.ell(1), 0.0);
  const Vec3 omega = (m.pi - lbar).cwiseQuotient(params.ibar);
  return {omega, m.ell.cwiseQuotient(params.jrotor) - omega.head<2>()};
}

}  // namespace rch
