#include <gtest/gtest.h>

#include <cmath>

#include "rch/verify.hpp"

using namespace rch;

namespace {

template <class F>
void expect_kind(ErrorKind kind, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

// H = 1/2 (p^2 + q^2) per degree of freedom.
CanonicalModel oscillator(std::size_t dof) {
  return {dof, [](const VecX& z) { return 0.5 * z.squaredNorm(); }, [](const VecX& z) { return z; }};
}

}  // namespace

TEST(CheckReport, PassedIffWithinTolerance) {
  EXPECT_TRUE(CheckReport::make("a", 1.0, 1.0, "").passed);
  EXPECT_FALSE(CheckReport::make("a", 1.0 + 1e-15, 1.0, "").passed);
  EXPECT_FALSE(CheckReport::make("a", std::nan(""), 1.0, "").passed);
  double w = 0.0;
  detail::update_worst(w, std::nan(""));
  detail::update_worst(w, 5.0);
  EXPECT_TRUE(std::isnan(w));
}

TEST(CheckConservation, ConstantAndEmpty) {
  const auto t = integrate(SystemDef::rigid_body({Vec3(1, 2, 3)}), std::nullopt, RbState{Vec3(1, 1, 1)},
                           {Method::RK4, 0.1, 1.0});
  const std::function<double(const ReducedState&)> one = [](const ReducedState&) { return 1.0; };
  EXPECT_EQ(check_conservation(t, one, 0.0, "const").observed, 0.0);
  ReducedTrajectory empty;
  expect_kind(ErrorKind::EmptyTrajectory, [&] { check_conservation(empty, one, 0.0, "const"); });
  expect_kind(ErrorKind::MissingDiagnostic, [&] { check_diagnostic_drift(t, "momentum_1", 1.0); });
}

TEST(CheckConservation, FreeRigidBodyEnergy) {
  const SystemDef sys = SystemDef::rigid_body({Vec3(1, 2, 3)});
  const auto t = integrate(sys, std::nullopt, RbState{Vec3(1, 1, 1)}, {Method::RK4, 1e-3, 10.0});
  const std::function<double(const ReducedState&)> h = [&](const ReducedState& s) {
    return sys.hamiltonian(s);
  };
  const CheckReport r = check_conservation(t, h, 1e-10, "energy", DriftMode::Relative);
  EXPECT_TRUE(r.passed) << r.observed;
}

TEST(CheckBracketAxioms, AllSpaces) {
  EXPECT_TRUE(check_bracket_axioms(BracketSpace::SO3Dual, 1000, 1e-13).passed);
  EXPECT_TRUE(check_bracket_axioms(BracketSpace::SE3Dual, 1000, 1e-13).passed);
  EXPECT_TRUE(check_bracket_axioms(BracketSpace::SO3WithRotors, 1000, 1e-12).passed);
  EXPECT_TRUE(check_bracket_axioms(BracketSpace::SE3WithRotors, 1000, 1e-12).passed);
}

TEST(CheckGradients, LinearAndDetector) {
  Sampler rng(51);
  const VecX c = rng.box(6);
  EXPECT_TRUE(check_gradients(fn::linear(c), Space::SE3Dual, 0, 100, 1e-8, "linear").passed);
  SmoothFn wrong = fn::linear(c);
  wrong.grad = [c](const ProductPoint& p) {
    return Gradient::from_flat(p.space, p.rotor_count(), c + VecX::Constant(c.size(), 1e-3));
  };
  EXPECT_FALSE(check_gradients(wrong, Space::SE3Dual, 0, 100, 1e-6, "wrong").passed);
}

TEST(CheckEquivalence, AllPairingsOnTheirSets) {
  for (Pairing p : {Pairing::RbTorqueVsRotor, Pairing::RotorVsHeavyTop, Pairing::HtRotorVsRotor}) {
    EquivalenceCase c;
    c.pairing = p;
    const CheckReport r = check_equivalence(c, 1000, 1e-12);
    EXPECT_TRUE(r.passed) << r.name << " " << r.observed;
    EXPECT_NE(r.context.find("restricted to"), std::string::npos);
    EXPECT_NE(r.context.find("off-set residual"), std::string::npos);
    EXPECT_NE(r.context.find("1000 samples"), std::string::npos);

    c.target_p = c.matched_p() + Vec3::Constant(1e-3);
    const CheckReport d = check_equivalence(c, 1000, 1e-12);
    EXPECT_FALSE(d.passed);
    EXPECT_GT(d.observed, 1e-4) << d.name;
  }
}

TEST(CheckEquivalence, SourceGainPerturbationIsDetected) {
  EquivalenceCase c;
  c.pairing = Pairing::RbTorqueVsRotor;
  c.target_p = c.p;
  c.p += Vec3::Constant(1e-3);  // set sampled with a different offset than the target law
  EXPECT_FALSE(check_equivalence(c, 200, 1e-12).passed);
}

TEST(CheckEquivalence, OffSetResidualIsLarge) {
  EquivalenceCase c;
  const EquivalenceSetup s = make_equivalence(c);
  Sampler rng(52);
  std::vector<ReducedState> xs;
  for (int i = 0; i < 100; ++i) xs.push_back(rng.state(s.source));
  EXPECT_GT(matching_residual(s.target, s.target_law, s.source, s.source_law, s.map, xs), 1e-3);
}

TEST(CheckEquivalence, Reproducible) {
  EquivalenceCase c;
  c.pairing = Pairing::HtRotorVsRotor;
  c.target_p = c.matched_p() + Vec3(1e-3, 0, 0);
  EXPECT_EQ(check_equivalence(c, 300, 1e-12, 7).observed, check_equivalence(c, 300, 1e-12, 7).observed);
}

TEST(CheckEquivalence, ErrorPaths) {
  EquivalenceCase c;
  c.k = 1.0;
  expect_kind(ErrorKind::DegenerateGain, [&] { check_equivalence(c, 10, 1e-12); });
  EquivalenceCase h;
  h.pairing = Pairing::HtRotorVsRotor;
  h.k = 0.0;
  expect_kind(ErrorKind::InvalidArgument, [&] { check_equivalence(h, 10, 1e-12); });
  h.p0(2) = 0.0;
  EXPECT_TRUE(check_equivalence(h, 100, 1e-12).passed);
  EXPECT_EQ(pairing_from_string("rotor_vs_ht"), Pairing::RotorVsHeavyTop);
  EXPECT_FALSE(pairing_from_string("nope").has_value());
}

TEST(SampleEquivalenceSet, PointsSatisfyRestriction) {
  EquivalenceCase c;
  c.pairing = Pairing::HtRotorVsRotor;
  Sampler rng(53);
  for (const ReducedState& s : sample_equivalence_set(c, rng, 50)) {
    const auto& x = std::get<HtRotorState>(s);
    const Vec3 lbar(x.ell(0), x.ell(1), 0.0);
    const Vec3 omega = (x.pi - lbar).cwiseQuotient(c.inertia);
    EXPECT_LT((x.gamma - c.lambda * omega).norm(), 1e-14);
    EXPECT_LT((lbar - c.k * x.gamma - c.p0).norm(), 1e-14);
  }
}

TEST(PortCondition, TrivialAndForceControlledPorts) {
  const CanonicalModel osc = oscillator(2);
  EXPECT_LT(check_port_condition(trivial_port(osc), osc, 1000, 1e-13).observed, 1e-13);
  const PortSpec forced = force_controlled_port(
      2, [](const VecX&) { return MatX::Identity(2, 2); }, [](const VecX& z) { return VecX(-z.tail(2)); });
  EXPECT_EQ(check_port_condition(forced, osc, 500, 0.0).observed, 0.0);

  PortSpec perturbed = trivial_port(osc);
  perturbed.effort = [osc](const VecX& z) { return VecX(osc.gradient(z) + VecX::Constant(4, 1e-3)); };
  const CheckReport r = check_port_condition(perturbed, osc, 100, 1e-13);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.observed, 0.0);
}

TEST(PortCondition, RotorCharts) {
  for (const SystemDef& sys :
       {SystemDef::rigid_body_rotors({Vec3(2, 3, 4), Vec3(0.5, 0.7, 0.9)}),
        SystemDef::heavy_top_rotors({Vec3(2, 3, 4), Vec2(0.5, 0.7), 1.0, Vec3::UnitX()})}) {
    Sampler rng(54);
    const CanonicalModel chart = rotor_chart(sys, rng.state(sys));
    EXPECT_TRUE(check_port_condition(trivial_port(chart), chart, 1000, 1e-13).passed);
    // The chart gradient matches finite differences of the chart energy.
    const VecX z = rng.box(2 * chart.dof);
    EXPECT_LT((fd_gradient(chart.energy, z) - chart.gradient(z)).cwiseAbs().maxCoeff(), 1e-8);
  }
  const SystemDef rb = SystemDef::rigid_body({Vec3(1, 2, 3)});
  expect_kind(ErrorKind::VariantMismatch, [&] { rotor_chart(rb, RbState{}); });
}

TEST(PortBalance, ConservativeAndControlled) {
  const SystemDef free = SystemDef::rigid_body({Vec3(1, 2, 3)});
  const auto t = integrate(free, std::nullopt, RbState{Vec3(1, 1, 1)}, {Method::RK4, 1e-3, 2.0});
  EXPECT_TRUE(check_port_balance(t, 1e-9).passed);

  const SystemDef torque = SystemDef::rigid_body_torque({Vec3(1, 2, 3)});
  const auto law = ControlLaw::constant_body_torque(Vec3(0.1, 0.2, 0.3));
  auto residual = [&](double h) {
    return port_balance_residual(integrate(torque, law, RbState{Vec3(1, 1, 1)}, {Method::RK4, h, 1.0}));
  };
  const double order = std::log(residual(1e-3) / residual(5e-4)) / std::log(2.0);
  EXPECT_GE(order, 1.8);
  EXPECT_LE(order, 2.2);
}

TEST(PortBalance, ErrorPaths) {
  ReducedTrajectory t;
  t.times = {0.0, 1.0};
  t.states = {RbState{}, RbState{}};
  expect_kind(ErrorKind::EmptyTrajectory, [&] { port_balance_residual(t); });
  t.times.push_back(2.0);
  t.states.push_back(RbState{});
  t.diagnostics.push_back({"energy", {0.0, 0.0, 0.0}});
  expect_kind(ErrorKind::MissingDiagnostic, [&] { port_balance_residual(t); });
}

TEST(CheckReductionConsistency, DetectsMismatch) {
  const FullState x0{Rotation3::identity(), Vec3(1, 1, 1)};
  EXPECT_TRUE(check_reduction_consistency({Vec3(1, 2, 3)}, x0, x0.pi, {Method::RK4, 1e-3, 10.0}).passed);
  EXPECT_FALSE(
      check_reduction_consistency({Vec3(1, 2, 3)}, x0, Vec3(1, 1, 1.001), {Method::RK4, 1e-3, 1.0}).passed);
}
