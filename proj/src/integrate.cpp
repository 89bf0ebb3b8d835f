#include "rch/integrate.hpp"

#include <cmath>

namespace rch {

namespace {

using RowMat3 = Eigen::Matrix<double, 3, 3, Eigen::RowMajor>;

void require_finite(const VecX& x, const char* what) {
  if (!x.allFinite()) throw Error(ErrorKind::NonFinite, what);
}

struct Gravity {
  double mgh = 0.0;
  Vec3 chi = Vec3::Zero();
};

Gravity gravity_of(const SystemDef& sys) {
  if (const auto* p = std::get_if<HeavyTopParams>(&sys.params())) return {p->mgh, p->chi};
  if (const auto* p = std::get_if<HeavyTopRotorParams>(&sys.params())) return {p->mgh, p->chi};
  return {};
}

VecX control_of(const SystemDef& sys, const std::optional<ControlLaw>& law, const ReducedState& s) {
  if (!law) return VecX::Zero(static_cast<Eigen::Index>(sys.dim()));
  return sys.lift_control(law->evaluate(sys, s));
}

class ReducedRecorder {
 public:
  ReducedRecorder(const SystemDef& sys, const std::optional<ControlLaw>& law, ReducedTrajectory& traj)
      : sys_(sys), law_(law), traj_(traj), casimirs_(sys.casimirs()) {
    traj_.diagnostics.push_back({"energy", {}});
    for (std::size_t i = 0; i < casimirs_.size(); ++i) {
      traj_.diagnostics.push_back({"casimir_" + std::to_string(i + 1), {}});
    }
    traj_.diagnostics.push_back({"supplied_power", {}});
  }

  void record(double t, const ReducedState& s) {
    const HamiltonianEval h = sys_.evaluate(s);
    const ProductPoint p = to_point(s);
    const VecX u = control_of(sys_, law_, s);
    const double power = h.grad.flat(sys_.space()).dot(u);
    std::size_t col = 0;
    traj_.diagnostics[col++].values.push_back(h.value);
    for (const auto& c : casimirs_) traj_.diagnostics[col++].values.push_back(c(p));
    traj_.diagnostics[col].values.push_back(power);
    if (!std::isfinite(h.value) || !std::isfinite(power)) {
      throw Error(ErrorKind::NonFinite, "diagnostics are not finite", traj_.times.size());
    }
    traj_.times.push_back(t);
    traj_.states.push_back(s);
  }

 private:
  const SystemDef& sys_;
  const std::optional<ControlLaw>& law_;
  ReducedTrajectory& traj_;
  std::vector<SmoothFn> casimirs_;
};

VecX full_to_flat(const FullState& s) {
  VecX x(12);
  RowMat3 a = s.attitude.matrix();
  x.head<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(a.data());
  x.tail<3>() = s.pi;
  return x;
}

FullState full_from_flat(const VecX& x) {
  RowMat3 a;
  Eigen::Map<Eigen::Matrix<double, 9, 1>>(a.data()) = x.head<9>();
  return {Rotation3::unchecked(a), x.tail<3>()};
}

VecX full_derivative_flat(const FullDerivative& d) {
  VecX x(12);
  RowMat3 a = d.attitude_dot;
  x.head<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(a.data());
  x.tail<3>() = d.pi_dot;
  return x;
}

}  // namespace

std::string_view to_string(Method m) { return m == Method::RK4 ? "rk4" : "splitting"; }

void IntegratorSpec::validate() const {
  if (!(std::isfinite(step) && step > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "integrator.step must be > 0");
  }
  if (!(std::isfinite(t_final) && t_final > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "integrator.t_final must be > 0");
  }
  if (step > t_final) {
    throw Error(ErrorKind::InvalidArgument, "integrator.step must be <= integrator.t_final");
  }
  if (reorth_every <= 0) {
    throw Error(ErrorKind::InvalidArgument, "integrator.reorth_every must be > 0");
  }
}

std::size_t IntegratorSpec::steps() const {
  return static_cast<std::size_t>(std::floor(t_final / step * (1.0 + 1e-12)));
}

VecX rk4_step(const FlatField& f, const VecX& x, double h) {
  const VecX k1 = f(x);
  require_finite(k1, "RK4 stage 1 is not finite");
  const VecX k2 = f(x + 0.5 * h * k1);
  require_finite(k2, "RK4 stage 2 is not finite");
  const VecX k3 = f(x + 0.5 * h * k2);
  require_finite(k3, "RK4 stage 3 is not finite");
  const VecX k4 = f(x + h * k3);
  require_finite(k4, "RK4 stage 4 is not finite");
  VecX out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  require_finite(out, "RK4 update is not finite");
  return out;
}

ReducedState splitting_step(const SystemDef& sys, const ReducedState& x, double h) {
  sys.check_state(x);
  const Gravity g = gravity_of(sys);
  const bool se3 = sys.space() == Space::SE3Dual;
  ProductPoint p = to_point(x);

  auto kick = [&](double dt) {
    if (se3 && g.mgh != 0.0) p.pi += dt * g.mgh * p.gamma.cross(g.chi);
  };

  kick(0.5 * h);
  const HamiltonianEval e = sys.evaluate(sys.state_from_flat(p.flat()));
  const Rotation3 r = exp_so3(-h * e.grad.d_pi);
  p.pi = r * p.pi;
  if (se3) p.gamma = r * p.gamma;
  if (p.rotor_count() > 0) p.theta += h * e.grad.d_ell;
  kick(0.5 * h);

  const VecX out = p.flat();
  require_finite(out, "splitting step is not finite");
  return sys.state_from_flat(out);
}

ReducedTrajectory integrate(const SystemDef& sys, const std::optional<ControlLaw>& law,
                            const ReducedState& x0, const IntegratorSpec& spec) {
  spec.validate();
  sys.check_state(x0);
  if (law && !law->admissible_for(sys.kind())) {
    throw Error(ErrorKind::VariantMismatch, "control '" + law->name() +
                                                "' not admissible for system '" +
                                                std::string(to_string(sys.kind())) + "'");
  }
  const std::size_t n = spec.steps();
  const double h = spec.step;

  ReducedTrajectory traj;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  ReducedRecorder rec(sys, law, traj);

  const FlatField field = [&](const VecX& flat) {
    return closed_loop_vf(sys, law, sys.state_from_flat(flat));
  };

  ReducedState x = x0;
  if (!flatten(x).allFinite()) throw Error(ErrorKind::NonFinite, "initial state is not finite", 0);
  rec.record(0.0, x);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      if (spec.method == Method::RK4) {
        x = sys.state_from_flat(rk4_step(field, flatten(x), h));
      } else {
        x = splitting_step(sys, x, h);
        if (law) {
          VecX flat = flatten(x) + h * control_of(sys, law, x);
          require_finite(flat, "control kick is not finite");
          x = sys.state_from_flat(flat);
        }
      }
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::NonFinite && !err.step()) {
        throw Error(ErrorKind::NonFinite, err.detail(), i + 1);
      }
      throw;
    }
    rec.record(static_cast<double>(i + 1) * h, x);
  }
  return traj;
}

FullTrajectory integrate_full(const RigidBodyParams& params, const std::optional<ControlLaw>& law,
                              const FullState& x0, const IntegratorSpec& spec) {
  spec.validate();
  const SystemDef reduced = SystemDef::rigid_body_torque(params);
  if (law && !law->admissible_for(SystemKind::RigidBodyTorque)) {
    throw Error(ErrorKind::VariantMismatch,
                "control '" + law->name() + "' not admissible for system 'rigid_body_full'");
  }
  auto torque_at = [&](const Vec3& pi) -> Vec3 {
    if (!law) return Vec3::Zero();
    const ReducedState s = RbState{pi};
    return reduced.lift_control(law->evaluate(reduced, s));
  };

  const std::size_t n = spec.steps();
  const double h = spec.step;

  FullTrajectory traj;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  for (const char* name : {"energy", "casimir_1", "momentum_1", "momentum_2", "momentum_3",
                           "orthogonality_defect", "supplied_power"}) {
    traj.diagnostics.push_back({name, {}});
  }
  auto record = [&](double t, const FullState& s) {
    const HamiltonianEval e = rb_hamiltonian(params, s.pi);
    const Vec3 m = momentum_map_so3(s);
    const double power = e.grad.d_pi.dot(torque_at(s.pi));
    const double values[] = {e.value, s.pi.squaredNorm(), m(0), m(1), m(2),
                             s.attitude.orthogonality_defect(), power};
    for (std::size_t i = 0; i < traj.diagnostics.size(); ++i) {
      if (!std::isfinite(values[i])) {
        throw Error(ErrorKind::NonFinite, "diagnostic " + traj.diagnostics[i].name + " is not finite",
                    traj.times.size());
      }
      traj.diagnostics[i].values.push_back(values[i]);
    }
    traj.times.push_back(t);
    traj.states.push_back(s);
  };

  const FlatField field = [&](const VecX& flat) {
    const FullState s = full_from_flat(flat);
    return full_derivative_flat(full_rb_vf(params, s, torque_at(s.pi)));
  };

  FullState x = x0;
  if (!full_to_flat(x).allFinite()) throw Error(ErrorKind::NonFinite, "initial state is not finite", 0);
  record(0.0, x);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      if (spec.method == Method::RK4) {
        x = full_from_flat(rk4_step(field, full_to_flat(x), h));
      } else {
        const Vec3 omega = x.pi.cwiseQuotient(params.inertia);
        const Rotation3 r = exp_so3(-h * omega);
        x.pi = r * x.pi;
        x.attitude = x.attitude * r.inverse();
        if (law) x.pi += h * torque_at(x.pi);
        if (!full_to_flat(x).allFinite()) throw Error(ErrorKind::NonFinite, "splitting step is not finite");
      }
      if ((i + 1) % static_cast<std::size_t>(spec.reorth_every) == 0) {
        x.attitude = reorthonormalize(x.attitude);
      }
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::NonFinite && !err.step()) {
        throw Error(ErrorKind::NonFinite, err.detail(), i + 1);
      }
      throw;
    }
    record(static_cast<double>(i + 1) * h, x);
  }
  return traj;
}

}  // namespace rch
