#include "rch/verify.hpp"

#include <algorithm>
#include <sstream>

namespace rch {

namespace {

std::string fmt_vec(const Vec3& v) {
  std::ostringstream os;
  os.precision(6);
  os << "[" << v(0) << ", " << v(1) << ", " << v(2) << "]";
  return os.str();
}

std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::pair<Space, std::size_t> shape_of(BracketSpace s) {
  switch (s) {
    case BracketSpace::SO3Dual: return {Space::SO3Dual, 0};
    case BracketSpace::SE3Dual: return {Space::SE3Dual, 0};
    case BracketSpace::SO3WithRotors: return {Space::SO3Dual, 3};
    case BracketSpace::SE3WithRotors: return {Space::SE3Dual, 2};
  }
  return {Space::SO3Dual, 0};
}

std::size_t flat_dim(Space space, std::size_t rotors) {
  return (space == Space::SO3Dual ? 3 : 6) + 2 * rotors;
}

/// Random quadratic with O(1) values on the sampling box.
SmoothFn random_closure(Sampler& rng, std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  MatX a(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = rng.uniform(-1.0, 1.0) / static_cast<double>(n);
  return fn::quadratic(a, rng.box(n, 1.0) / static_cast<double>(n), rng.uniform(-1.0, 1.0));
}

SmoothFn random_linear(Sampler& rng, std::size_t n) { return fn::linear(rng.box(n, 1.0)); }

/// {F, K} for affine F, K is affine in the point; recover it as a linear
/// functional by evaluating the bracket at the origin and the unit vectors.
SmoothFn bracket_as_linear(const SmoothFn& f, const SmoothFn& k, Space space, std::size_t rotors) {
  const std::size_t n = flat_dim(space, rotors);
  const auto m = static_cast<Eigen::Index>(n);
  auto at = [&](const VecX& x) {
    return bracket_product(f, k, ProductPoint::from_flat(space, rotors, x), BracketSign::Minus);
  };
  const double offset = at(VecX::Zero(m));
  VecX coeff(m);
  for (Eigen::Index j = 0; j < m; ++j) coeff(j) = at(VecX::Unit(m, j)) - offset;
  return fn::linear(coeff, offset);
}

}  // namespace

CheckReport CheckReport::make(std::string name, double observed, double tolerance,
                              std::string context) {
  CheckReport r;
  r.name = std::move(name);
  r.observed = observed;
  r.tolerance = tolerance;
  r.passed = observed <= tolerance;
  r.context = std::move(context);
  return r;
}

Vec3 Sampler::box3(double half_width) {
  return {uniform(-half_width, half_width), uniform(-half_width, half_width),
          uniform(-half_width, half_width)};
}

VecX Sampler::box(std::size_t n, double half_width) {
  VecX x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = uniform(-half_width, half_width);
  return x;
}

ProductPoint Sampler::point(Space space, std::size_t rotors) {
  ProductPoint p;
  p.space = space;
  p.pi = box3();
  if (space == Space::SE3Dual) p.gamma = box3();
  const auto k = static_cast<Eigen::Index>(rotors);
  p.theta.resize(k);
  p.ell.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) p.theta(i) = angle();
  for (Eigen::Index i = 0; i < k; ++i) p.ell(i) = uniform(-2.0, 2.0);
  return p;
}

ReducedState Sampler::state(const SystemDef& sys) {
  return sys.state_from_flat(point(sys.space(), sys.rotor_count()).flat());
}

VecX fd_gradient(const std::function<double(const VecX&)>& f, const VecX& x, double step) {
  VecX g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    VecX xp = x;
    VecX xm = x;
    xp(i) += step;
    xm(i) -= step;
    g(i) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return g;
}

// ---------------------------------------------------------------------------

CheckReport check_reduction_consistency(const RigidBodyParams& params, const FullState& x0_full,
                                        const Vec3& reduced_pi0, const IntegratorSpec& spec,
                                        const std::optional<ControlLaw>& law, double tol) {
  const FullTrajectory full = integrate_full(params, law, x0_full, spec);
  const SystemDef sys =
      law ? SystemDef::rigid_body_torque(params) : SystemDef::rigid_body(params);
  const ReducedTrajectory reduced = integrate(sys, law, RbState{reduced_pi0}, spec);
  double worst = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    detail::update_worst(worst, (full.states[i].pi - body_momentum(reduced.states[i])).norm());
  }
  return CheckReport::make(
      "reduction_consistency", worst, tol,
      "full T*SO(3) vs reduced so(3)*, method " + std::string(to_string(spec.method)) + ", step " +
          fmt_num(spec.step) + ", t_final " + fmt_num(spec.t_final) +
          (law ? ", control " + law->name() : std::string()) + ", initial |dPi| " +
          fmt_num((x0_full.pi - reduced_pi0).norm()));
}

CheckReport check_gradients(const SmoothFn& f, Space space, std::size_t rotors, std::size_t samples,
                            double tol, std::string name, std::uint64_t seed) {
  Sampler rng(seed);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const ProductPoint p = rng.point(space, rotors);
    const VecX analytic = f.grad(p).flat(space);
    const VecX numeric = fd_gradient(
        [&](const VecX& x) { return f(ProductPoint::from_flat(space, rotors, x)); }, p.flat());
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
      const double rel = std::abs(analytic(i) - numeric(i)) / std::max(1.0, std::abs(analytic(i)));
      detail::update_worst(worst, rel);
    }
  }
  return CheckReport::make(std::move(name), worst, tol,
                           "central differences, step 1e-6, " + std::to_string(samples) +
                               " samples, seed " + std::to_string(seed));
}

CheckReport check_gradients(const SystemDef& sys, std::size_t samples, double tol,
                            std::uint64_t seed) {
  return check_gradients(sys.hamiltonian_fn(), sys.space(), sys.rotor_count(), samples, tol,
                         "gradients_" + std::string(to_string(sys.kind())), seed);
}

std::string_view to_string(BracketSpace s) {
  switch (s) {
    case BracketSpace::SO3Dual: return "so3_dual";
    case BracketSpace::SE3Dual: return "se3_dual";
    case BracketSpace::SO3WithRotors: return "so3_dual_x_rotors3";
    case BracketSpace::SE3WithRotors: return "se3_dual_x_rotors2";
  }
  return "unknown";
}

CheckReport check_bracket_axioms(BracketSpace which, std::size_t samples, double tol,
                                 std::uint64_t seed) {
  const auto [space, rotors] = shape_of(which);
  const std::size_t n = flat_dim(space, rotors);
  Sampler rng(seed);
  double anti = 0.0;
  double leibniz = 0.0;
  double jacobi = 0.0;
  const auto br = [](const SmoothFn& a, const SmoothFn& b, const ProductPoint& p) {
    return bracket_product(a, b, p, BracketSign::Minus);
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const SmoothFn f = random_closure(rng, n);
    const SmoothFn g = random_closure(rng, n);
    const SmoothFn k = random_closure(rng, n);
    const ProductPoint p = rng.point(space, rotors);

    detail::update_worst(anti, std::abs(br(f, k, p) + br(k, f, p)));

    const double lhs = br(fn::product(f, g), k, p);
    const double rhs = f(p) * br(g, k, p) + g(p) * br(f, k, p);
    detail::update_worst(leibniz, std::abs(lhs - rhs));

    const SmoothFn a = random_linear(rng, n);
    const SmoothFn b = random_linear(rng, n);
    const SmoothFn c = random_linear(rng, n);
    const double cyc = br(a, bracket_as_linear(b, c, space, rotors), p) +
                       br(b, bracket_as_linear(c, a, space, rotors), p) +
                       br(c, bracket_as_linear(a, b, space, rotors), p);
    detail::update_worst(jacobi, std::abs(cyc));
  }
  double worst = anti;
  detail::update_worst(worst, leibniz);
  detail::update_worst(worst, jacobi);
  return CheckReport::make("bracket_axioms_" + std::string(to_string(which)), worst, tol,
                           "antisymmetry " + fmt_num(anti) + ", leibniz " + fmt_num(leibniz) +
                               ", jacobi " + fmt_num(jacobi) + "; " + std::to_string(samples) +
                               " samples, seed " + std::to_string(seed));
}

CheckReport check_derivation_chain(const SystemDef& sys, std::size_t samples, double tol,
                                   std::uint64_t seed) {
  Sampler rng(seed);
  const SmoothFn h = sys.hamiltonian_fn();
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const ReducedState x = rng.state(sys);
    const VecX hand = sys.vector_field(x);
    const VecX derived = bracket_vector_field(h, to_point(x));
    detail::update_worst(worst, (hand - derived).cwiseAbs().maxCoeff());
  }
  return CheckReport::make("derivation_chain_" + std::string(to_string(sys.kind())), worst, tol,
                           "hand-coded field vs {x_j, h}_-, " + std::to_string(samples) +
                               " samples, seed " + std::to_string(seed));
}

CheckReport check_casimir_tangency(const SystemDef& sys, std::size_t samples, double tol,
                                   std::uint64_t seed) {
  Sampler rng(seed);
  const auto cs = sys.casimirs();
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const ReducedState x = rng.state(sys);
    const ProductPoint p = to_point(x);
    const VecX vf = sys.vector_field(x);
    for (const SmoothFn& c : cs) {
      detail::update_worst(worst, std::abs(c.grad(p).flat(sys.space()).dot(vf)));
    }
  }
  return CheckReport::make("casimir_tangency_" + std::string(to_string(sys.kind())), worst, tol,
                           std::to_string(cs.size()) + " Casimirs, " + std::to_string(samples) +
                               " samples, seed " + std::to_string(seed));
}

// ---------------------------------------------------------------------------

std::string_view to_string(Pairing p) {
  switch (p) {
    case Pairing::RbTorqueVsRotor: return "rb_torque_vs_rotor";
    case Pairing::RotorVsHeavyTop: return "rotor_vs_ht";
    case Pairing::HtRotorVsRotor: return "ht_rotor_vs_rotor";
  }
  return "unknown";
}

std::optional<Pairing> pairing_from_string(std::string_view s) {
  for (Pairing p : {Pairing::RbTorqueVsRotor, Pairing::RotorVsHeavyTop, Pairing::HtRotorVsRotor}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

Vec3 EquivalenceCase::matched_p() const {
  switch (pairing) {
    case Pairing::RbTorqueVsRotor: return p;
    case Pairing::RotorVsHeavyTop: return -mgh * lambda * chi;
    case Pairing::HtRotorVsRotor: return p0 - mgh * lambda * chi;
  }
  return p;
}

EquivalenceSetup make_equivalence(const EquivalenceCase& c) {
  const Vec3 torque_p = c.target_p.value_or(c.matched_p());
  const ControlLaw target_law = ControlLaw::constant_torque_p(torque_p);
  switch (c.pairing) {
    case Pairing::RbTorqueVsRotor: {
      EquivalenceMap map = equiv_map_rotor_to_torque(c.k, c.p);
      return {SystemDef::rigid_body_torque({c.inertia}),
              target_law,
              SystemDef::rigid_body_rotors({c.inertia, c.jrotor}),
              ControlLaw::rotor_gain(c.k),
              std::move(map),
              "l = k Pi + p"};
    }
    case Pairing::RotorVsHeavyTop: {
      return {SystemDef::rigid_body_torque({c.inertia + Vec3::Constant(c.lambda)}),
              target_law,
              SystemDef::heavy_top({c.inertia, c.mgh, c.chi}),
              std::nullopt,
              equiv_map_heavy_top(),
              "Gamma = lambda Omega, p = -mgh lambda chi"};
    }
    case Pairing::HtRotorVsRotor: {
      return {SystemDef::rigid_body_torque({c.inertia + Vec3::Constant(c.lambda)}),
              target_law,
              SystemDef::heavy_top_rotors({c.inertia, c.jrotor.head<2>(), c.mgh, c.chi}),
              ControlLaw::heavy_top_rotor_gain(c.k),
              equiv_map_ht_rotor(c.k, c.p0),
              "lbar = k Gamma + p0 with lbar_3 = 0, Gamma = lambda Omega, p = p0 - mgh lambda chi"};
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown pairing");
}

std::vector<ReducedState> sample_equivalence_set(const EquivalenceCase& c, Sampler& rng,
                                                 std::size_t n) {
  std::vector<ReducedState> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    switch (c.pairing) {
      case Pairing::RbTorqueVsRotor: {
        RbRotorState x;
        x.pi = rng.box3();
        x.alpha = Vec3(rng.angle(), rng.angle(), rng.angle());
        x.ell = c.k * x.pi + c.p;
        out.push_back(x);
        break;
      }
      case Pairing::RotorVsHeavyTop: {
        const Vec3 omega = rng.box3();
        out.push_back(HtState{c.inertia.cwiseProduct(omega), c.lambda * omega});
        break;
      }
      case Pairing::HtRotorVsRotor: {
        // The third component of lbar - k Gamma = p0 reads -k lambda Omega_3 = p0_3.
        const double kl = c.k * c.lambda;
        Vec3 omega = rng.box3();
        if (kl != 0.0) {
          omega(2) = -c.p0(2) / kl;
        } else if (c.p0(2) != 0.0) {
          throw Error(ErrorKind::InvalidArgument,
                      "invariant set is empty: k lambda = 0 requires p0_3 = 0");
        }
        HtRotorState x;
        x.gamma = c.lambda * omega;
        x.ell = c.k * x.gamma.head<2>() + c.p0.head<2>();
        x.pi = c.inertia.cwiseProduct(omega) + Vec3(x.ell(0), x.ell(1), 0.0);
        x.theta = Vec2(rng.angle(), rng.angle());
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

CheckReport check_equivalence(const EquivalenceCase& c, std::size_t samples, double tol,
                              std::uint64_t seed) {
  const EquivalenceSetup setup = make_equivalence(c);
  Sampler rng(seed);
  const std::vector<ReducedState> on_set = sample_equivalence_set(c, rng, samples);
  std::vector<ReducedState> off_set;
  off_set.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) off_set.push_back(rng.state(setup.source));

  const double on = matching_residual(setup.target, setup.target_law, setup.source,
                                      setup.source_law, setup.map, on_set);
  const double off = matching_residual(setup.target, setup.target_law, setup.source,
                                       setup.source_law, setup.map, off_set);
  const Vec3 torque_p = c.target_p.value_or(c.matched_p());
  std::string ctx = std::string(to_string(setup.source.kind())) + " -> " +
                    std::string(to_string(setup.target.kind())) + " with torque law p x Omega, p = " +
                    fmt_vec(torque_p) + "; map " + setup.map.description + "; restricted to " +
                    setup.restriction + "; " + std::to_string(samples) + " samples, seed " +
                    std::to_string(seed) + "; off-set residual " + fmt_num(off);
  if (c.target_p) ctx += "; target p overridden (matched p = " + fmt_vec(c.matched_p()) + ")";
  return CheckReport::make("equivalence_" + std::string(to_string(c.pairing)), on, tol, ctx);
}

// ---------------------------------------------------------------------------

VecX interior_product(const VecX& y) {
  const Eigen::Index n = y.size() / 2;
  VecX out(y.size());
  out.head(n) = -y.tail(n);
  out.tail(n) = y.head(n);
  return out;
}

VecX hamiltonian_flow(const CanonicalModel& m, const VecX& z) {
  const VecX g = m.gradient(z);
  const auto n = static_cast<Eigen::Index>(m.dof);
  VecX out(2 * n);
  out.head(n) = g.tail(n);
  out.tail(n) = -g.head(n);
  return out;
}

PortSpec trivial_port(const CanonicalModel& m) {
  return {[m](const VecX& z) { return hamiltonian_flow(m, z); },
          [m](const VecX& z) { return m.gradient(z); },
          [m](const VecX&) { return MatX::Identity(static_cast<Eigen::Index>(m.dof),
                                                   static_cast<Eigen::Index>(m.dof)); }};
}

PortSpec force_controlled_port(std::size_t dof, std::function<MatX(const VecX&)> channels,
                               std::function<VecX(const VecX&)> input) {
  const auto n = static_cast<Eigen::Index>(dof);
  auto flow = [n, channels, input](const VecX& z) {
    VecX y = VecX::Zero(2 * n);
    y.tail(n) = channels(z.head(n)) * input(z);
    return y;
  };
  return {flow, [flow](const VecX& z) { return interior_product(flow(z)); }, channels};
}

CanonicalModel rotor_chart(const SystemDef& sys, const ReducedState& frozen) {
  sys.check_state(frozen);
  const std::size_t k = sys.rotor_count();
  if (k == 0) {
    throw Error(ErrorKind::VariantMismatch,
                std::string(to_string(sys.kind())) + " has no rotor factor");
  }
  const ProductPoint base = to_point(frozen);
  const auto n = static_cast<Eigen::Index>(k);
  auto state_at = [sys, base, n](const VecX& z) {
    ProductPoint p = base;
    p.theta = z.head(n);
    p.ell = z.tail(n);
    return sys.state_from_flat(p.flat());
  };
  return {k, [sys, state_at](const VecX& z) { return sys.hamiltonian(state_at(z)); },
          [sys, state_at, n](const VecX& z) {
            const HamiltonianEval e = sys.evaluate(state_at(z));
            VecX g(2 * n);
            g.head(n) = e.grad.d_theta;
            g.tail(n) = e.grad.d_ell;
            return g;
          }};
}

CheckReport check_port_condition(const PortSpec& port, const CanonicalModel& model,
                                 std::size_t samples, double tol, std::string name,
                                 std::uint64_t seed) {
  Sampler rng(seed);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const VecX z = rng.box(2 * model.dof);
    const VecX r = port.effort(z) - interior_product(port.flow(z));
    detail::update_worst(worst, r.cwiseAbs().maxCoeff());
  }
  return CheckReport::make(std::move(name), worst, tol,
                           "alpha vs i_Y omega on a " + std::to_string(model.dof) +
                               "-dof canonical chart, " + std::to_string(samples) +
                               " samples, seed " + std::to_string(seed));
}

}  // namespace rch
