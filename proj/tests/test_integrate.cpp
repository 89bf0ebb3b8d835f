#include <gtest/gtest.h>

#include <cmath>

#include "rch/integrate.hpp"
#include "rch/verify.hpp"

using namespace rch;

namespace {

const RigidBodyParams kRb{Vec3(1, 2, 3)};
const RbState kRb0{Vec3(1, 1, 1)};

Vec3 final_pi(const ReducedTrajectory& t) { return body_momentum(t.states.back()); }

}  // namespace

TEST(Rk4Step, ZeroFieldAndDecay) {
  const VecX x = VecX::Constant(3, 2.5);
  EXPECT_EQ(rk4_step([](const VecX& y) { return VecX::Zero(y.size()); }, x, 0.1), x);
  const VecX one = VecX::Ones(1);
  const double y = rk4_step([](const VecX& v) { return VecX(-v); }, one, 0.1)(0);
  EXPECT_NEAR(y, 0.9048375, 5e-8);
  EXPECT_NEAR(y, std::exp(-0.1), 1e-6);
}

TEST(Rk4Step, NonFiniteStage) {
  const FlatField bad = [](const VecX& v) { return VecX::Constant(v.size(), std::nan("")); };
  try {
    rk4_step(bad, VecX::Ones(2), 0.1);
    FAIL() << "expected NonFinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
  }
}

TEST(IntegratorSpec, Validation) {
  EXPECT_THROW((IntegratorSpec{Method::RK4, -0.1, 1.0}.validate()), Error);
  EXPECT_THROW((IntegratorSpec{Method::RK4, 0.0, 1.0}.validate()), Error);
  EXPECT_THROW((IntegratorSpec{Method::RK4, 2.0, 1.0}.validate()), Error);
  EXPECT_THROW((IntegratorSpec{Method::RK4, 0.1, 1.0, 0}.validate()), Error);
  try {
    IntegratorSpec{Method::RK4, -0.1, 1.0}.validate();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    EXPECT_EQ(e.detail(), "integrator.step must be > 0");
  }
  EXPECT_EQ((IntegratorSpec{Method::RK4, 1e-3, 10.0}.steps()), 10000u);
  EXPECT_EQ((IntegratorSpec{Method::RK4, 0.1, 0.3}.steps()), 3u);
}

TEST(Integrate, SingleStepGivesTwoSamples) {
  const auto t = integrate(SystemDef::rigid_body(kRb), std::nullopt, kRb0, {Method::RK4, 0.5, 0.5});
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.times.back(), 0.5);
  EXPECT_EQ(t.diagnostic("energy").size(), 2u);
  EXPECT_THROW(t.diagnostic("nope"), Error);
}

TEST(Integrate, VariantMismatch) {
  try {
    integrate(SystemDef::rigid_body(kRb), std::nullopt, HtState{}, {Method::RK4, 0.1, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::VariantMismatch);
  }
  EXPECT_THROW(splitting_step(SystemDef::rigid_body(kRb), HtState{}, 0.1), Error);
  EXPECT_THROW(integrate(SystemDef::rigid_body(kRb), ControlLaw::rotor_gain(1.0), kRb0,
                         {Method::RK4, 0.1, 1.0}),
               Error);
}

TEST(Integrate, NonFiniteCarriesStepIndex) {
  const SystemDef sys = SystemDef::rigid_body(kRb);
  try {
    integrate(sys, std::nullopt, RbState{Vec3(1e154, -1e154, 1e154)}, {Method::RK4, 1.0, 10.0});
    FAIL() << "expected NonFinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
    ASSERT_TRUE(e.step().has_value());
  }
}

TEST(Integrate, FreeRigidBodyConservation) {
  const SystemDef sys = SystemDef::rigid_body(kRb);
  const auto rk = integrate(sys, std::nullopt, kRb0, {Method::RK4, 1e-3, 10.0});
  EXPECT_EQ(rk.size(), 10001u);
  EXPECT_TRUE(check_diagnostic_drift(rk, "energy", 1e-10, DriftMode::Relative).passed);
  EXPECT_TRUE(check_diagnostic_drift(rk, "casimir_1", 1e-9).passed);
  const auto sp = integrate(sys, std::nullopt, kRb0, {Method::Splitting, 1e-3, 10.0});
  const CheckReport c = check_diagnostic_drift(sp, "casimir_1", 1e-12);
  EXPECT_TRUE(c.passed) << c.observed;
}

TEST(Integrate, HeavyTopSplittingCasimirs) {
  const SystemDef sys = SystemDef::heavy_top({Vec3(1, 2, 3), 1.5, Vec3(0, 0.6, 0.8)});
  const HtState x0{Vec3(0.3, 1, -0.5), Vec3(0.1, 0.2, 0.97)};
  const auto t = integrate(sys, std::nullopt, x0, {Method::Splitting, 1e-3, 10.0});
  EXPECT_EQ(t.size(), 10001u);
  EXPECT_TRUE(check_diagnostic_drift(t, "casimir_1", 1e-12).passed);
  EXPECT_TRUE(check_diagnostic_drift(t, "casimir_2", 1e-12).passed);
}

TEST(Integrate, SplittingWithRotorControlKeepsCasimir) {
  const SystemDef sys = SystemDef::rigid_body_rotors({Vec3(2, 3, 4), Vec3(1, 1, 1)});
  const RbRotorState x0{Vec3(1, 0.5, -0.5), Vec3::Zero(), Vec3(0.6, 0.25, -0.25)};
  const auto t = integrate(sys, ControlLaw::rotor_gain(0.5), x0, {Method::Splitting, 1e-3, 10.0});
  EXPECT_TRUE(check_diagnostic_drift(t, "casimir_1", 1e-12).passed);
}

TEST(SplittingStep, ConsistentWithVectorField) {
  const SystemDef sys = SystemDef::heavy_top_rotors({Vec3(2, 3, 4), Vec2(0.5, 0.7), 1.5, Vec3(0, 0.6, 0.8)});
  Sampler rng(41);
  const ReducedState x = rng.state(sys);
  const VecX vf = sys.vector_field(x);
  double err[2];
  const double hs[2] = {1e-3, 1e-4};
  for (int i = 0; i < 2; ++i) {
    const VecX fd = (flatten(splitting_step(sys, x, hs[i])) - flatten(x)) / hs[i];
    err[i] = (fd - vf).norm();
  }
  EXPECT_LT(err[0], 10.0 * hs[0]);
  EXPECT_LT(err[1], 10.0 * hs[1]);
  EXPECT_NEAR(err[0] / err[1], 10.0, 1.0);
}

TEST(Integrate, Rk4ObservedOrder) {
  const SystemDef sys = SystemDef::rigid_body(kRb);
  const Vec3 ref = final_pi(integrate(sys, std::nullopt, kRb0, {Method::RK4, 1e-4, 1.0}));
  const double e1 = (final_pi(integrate(sys, std::nullopt, kRb0, {Method::RK4, 0.02, 1.0})) - ref).norm();
  const double e2 = (final_pi(integrate(sys, std::nullopt, kRb0, {Method::RK4, 0.01, 1.0})) - ref).norm();
  const double order = std::log2(e1 / e2);
  EXPECT_GE(order, 3.8);
  EXPECT_LE(order, 4.2);
}

TEST(Integrate, Deterministic) {
  const SystemDef sys = SystemDef::heavy_top({Vec3(1, 2, 3), 1.5, Vec3(0, 0.6, 0.8)});
  const HtState x0{Vec3(0.3, 1, -0.5), Vec3(0.1, 0.2, 0.97)};
  const auto a = integrate(sys, std::nullopt, x0, {Method::RK4, 1e-2, 2.0});
  const auto b = integrate(sys, std::nullopt, x0, {Method::RK4, 1e-2, 2.0});
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(flatten(a.states[i]), flatten(b.states[i]));
}

TEST(IntegrateFull, MomentumMapAndOrthogonality) {
  const FullState x0{Rotation3::identity(), Vec3(1, 1, 1)};
  const auto t = integrate_full(kRb, std::nullopt, x0, {Method::RK4, 1e-3, 10.0});
  for (const char* m : {"momentum_1", "momentum_2", "momentum_3"}) {
    EXPECT_TRUE(check_diagnostic_drift(t, m, 1e-9).passed) << m;
  }
  const std::function<double(const FullState&)> spatial_x = [](const FullState& s) {
    return momentum_map_so3(s)(0);
  };
  EXPECT_TRUE(check_conservation(t, spatial_x, 1e-9, "spatial_momentum_x").passed);
}

TEST(IntegrateFull, OrthogonalityOverLongRun) {
  const FullState x0{exp_so3(Vec3(0.3, -0.2, 0.1)), Vec3(1, 1, 1)};
  const auto t = integrate_full(kRb, std::nullopt, x0, {Method::RK4, 1e-3, 100.0, 100});
  EXPECT_EQ(t.size(), 100001u);
  const auto& d = t.diagnostic("orthogonality_defect");
  EXPECT_LT(*std::max_element(d.begin(), d.end()), 1e-9);
}

TEST(IntegrateFull, ReductionConsistency) {
  const FullState x0{exp_so3(Vec3(0.5, 0.1, -0.3)), Vec3(1, 1, 1)};
  for (Method m : {Method::RK4, Method::Splitting}) {
    const IntegratorSpec spec{m, 1e-3, 10.0};
    EXPECT_TRUE(check_reduction_consistency(kRb, x0, x0.pi, spec).passed);
    EXPECT_TRUE(check_reduction_consistency(kRb, x0, x0.pi, spec,
                                            ControlLaw::constant_body_torque(Vec3(0.1, -0.2, 0.05)))
                    .passed);
  }
  const CheckReport bad = check_reduction_consistency(kRb, x0, x0.pi + Vec3(1e-3, 0, 0),
                                                      {Method::RK4, 1e-3, 1.0});
  EXPECT_FALSE(bad.passed);
  EXPECT_GE(bad.observed, 1e-4);
}
