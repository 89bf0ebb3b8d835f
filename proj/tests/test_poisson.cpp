#include <gtest/gtest.h>

#include <random>

#include "rch/poisson.hpp"
#include "rch/verify.hpp"

using namespace rch;

namespace {

constexpr BracketSign kMinus = BracketSign::Minus;

SmoothFn random_quadratic(Sampler& rng, std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  MatX a(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = rng.uniform(-1, 1) / static_cast<double>(n);
  return fn::quadratic(a, rng.box(n, 1.0) / static_cast<double>(n), rng.uniform(-1, 1));
}

}  // namespace

TEST(LpBracketSo3, CoordinateFunctions) {
  const double a = 0.7, b = -1.3, c = 2.1;
  EXPECT_DOUBLE_EQ(lp_bracket_so3(fn::pi_component(0), fn::pi_component(1), Vec3(a, b, c), kMinus), -c);
  EXPECT_DOUBLE_EQ(lp_bracket_so3(fn::pi_component(0), fn::pi_component(1), Vec3(a, b, c),
                                  BracketSign::Plus),
                   c);
  const SmoothFn f = fn::pi_component(2);
  EXPECT_EQ(lp_bracket_so3(f, f, Vec3(a, b, c), kMinus), 0.0);
}

TEST(LpBracketSo3, CasimirCommutes) {
  Sampler rng(11);
  const SmoothFn c = casimirs(Space::SO3Dual).front();
  for (int i = 0; i < 200; ++i) {
    const SmoothFn k = random_quadratic(rng, 3);
    EXPECT_LT(std::abs(lp_bracket_so3(c, k, rng.box3(), kMinus)), 1e-13);
  }
}

TEST(LpBracketSe3, CasimirsCommute) {
  Sampler rng(12);
  const auto cs = casimirs(Space::SE3Dual);
  ASSERT_EQ(cs.size(), 2u);
  for (int i = 0; i < 200; ++i) {
    const SmoothFn k = random_quadratic(rng, 6);
    const SE3CoalgebraPoint p{rng.box3(), rng.box3()};
    for (const auto& c : cs) EXPECT_LT(std::abs(lp_bracket_se3(c, k, p, kMinus)), 1e-13);
  }
}

TEST(LpBracketSe3, HandEvaluation) {
  const SE3CoalgebraPoint p{Vec3::Zero(), Vec3::UnitZ()};
  EXPECT_DOUBLE_EQ(lp_bracket_se3(fn::pi_component(0), fn::gamma_component(1), p, kMinus), -1.0);
}

TEST(BracketRotor, CanonicalPairs) {
  const VecX theta = Vec2(1, 2);
  const VecX ell = Vec2(3, 4);
  EXPECT_EQ(bracket_rotor(fn::rotor_angle(0), fn::rotor_momentum(0), theta, ell), 1.0);
  EXPECT_EQ(bracket_rotor(fn::rotor_angle(0), fn::rotor_angle(1), theta, ell), 0.0);
  const SmoothFn f = fn::product(fn::rotor_angle(0), fn::rotor_momentum(1));
  const SmoothFn k = fn::product(fn::rotor_angle(1), fn::rotor_momentum(0));
  EXPECT_DOUBLE_EQ(bracket_rotor(f, k, theta, ell), 5.0);
}

TEST(BracketProduct, FactorSeparationAndAdditivity) {
  const ProductPoint p = ProductPoint::with_rotors(ProductPoint::so3(Vec3(0.7, -1.3, 2.1)),
                                                   Vec2(1, 2), Vec2(3, 4));
  EXPECT_EQ(bracket_product(fn::pi_component(0), fn::rotor_momentum(1), p, kMinus), 0.0);
  EXPECT_EQ(bracket_product(fn::rotor_angle(0), fn::pi_component(2), p, kMinus), 0.0);

  const SmoothFn lp_f = fn::pi_component(0);
  const SmoothFn lp_k = fn::pi_component(1);
  const SmoothFn rot_f = fn::product(fn::rotor_angle(0), fn::rotor_momentum(1));
  const SmoothFn rot_k = fn::product(fn::rotor_angle(1), fn::rotor_momentum(0));
  const double combined = bracket_product(fn::sum(lp_f, rot_f), fn::sum(lp_k, rot_k), p, kMinus);
  EXPECT_DOUBLE_EQ(combined, -2.1 + 5.0);
}

TEST(HamVfSo3, Examples) {
  const Vec3 inertia(1, 2, 3);
  const Vec3 pi1(1, 0, 0);
  EXPECT_EQ(ham_vf_so3(pi1.cwiseQuotient(inertia), pi1), Vec3::Zero());
  const Vec3 pi(1, 1, 1);
  const Vec3 v = ham_vf_so3(Vec3(1, 0.5, 1.0 / 3.0), pi);
  EXPECT_NEAR((v - Vec3(-1.0 / 6.0, 2.0 / 3.0, -0.5)).norm(), 0.0, 1e-15);
}

TEST(HamVfSe3, Examples) {
  // Upright equilibrium: Gamma = chi, Pi = 0.
  const Vec3 chi = Vec3::UnitX();
  SE3CoalgebraPoint d = ham_vf_se3(Vec3::Zero(), chi, {Vec3::Zero(), chi});
  EXPECT_EQ(d.pi, Vec3::Zero());
  EXPECT_EQ(d.gamma, Vec3::Zero());
  // dh/dGamma = mgh chi with mgh = 1, Gamma = e3.
  d = ham_vf_se3(Vec3::Zero(), chi, {Vec3::Zero(), Vec3::UnitZ()});
  EXPECT_EQ(d.pi, Vec3::UnitY());
  EXPECT_EQ(d.gamma, Vec3::Zero());
}

TEST(KksForm, Examples) {
  EXPECT_EQ(kks_form(Vec3::UnitZ(), Vec3::UnitX(), Vec3::UnitY()), -1.0);
  EXPECT_EQ(kks_form(Vec3(1, 2, 3), Vec3(0.5, 0.1, 2), Vec3(0.5, 0.1, 2)), 0.0);
}

TEST(KksForm, AgreesWithBracketOfLinearFunctionals) {
  // {F_xi, F_eta}_-(nu) = -nu . (xi x eta)
  Sampler rng(13);
  for (int i = 0; i < 100; ++i) {
    const Vec3 nu = rng.box3(), xi = rng.box3(), eta = rng.box3();
    const double b = lp_bracket_so3(fn::linear(xi), fn::linear(eta), nu, kMinus);
    EXPECT_NEAR(kks_form(nu, xi, eta), b, 1e-13);
  }
}

TEST(Casimirs, Values) {
  const auto so3 = casimirs(Space::SO3Dual);
  ASSERT_EQ(so3.size(), 1u);
  EXPECT_EQ(so3[0](ProductPoint::so3(Vec3(3, 4, 0))), 25.0);
  const auto se3 = casimirs(Space::SE3Dual);
  const ProductPoint p = ProductPoint::se3({Vec3::UnitX(), Vec3::UnitY()});
  EXPECT_EQ(se3[0](p), 1.0);
  EXPECT_EQ(se3[1](p), 0.0);
}

TEST(ProductPoint, FlatRoundTrip) {
  Sampler rng(14);
  for (Space s : {Space::SO3Dual, Space::SE3Dual}) {
    for (std::size_t k : {0u, 2u, 3u}) {
      const ProductPoint p = rng.point(s, k);
      const VecX x = p.flat();
      EXPECT_EQ(static_cast<std::size_t>(x.size()), p.dim());
      EXPECT_EQ(ProductPoint::from_flat(s, k, x).flat(), x);
    }
  }
}

TEST(SmoothFn, GradientsMatchFiniteDifferences) {
  Sampler rng(15);
  const SmoothFn q = random_quadratic(rng, 8);
  const SmoothFn l = fn::linear(rng.box(8));
  EXPECT_TRUE(check_gradients(q, Space::SE3Dual, 1, 100, 1e-8, "quadratic").passed);
  const CheckReport lin = check_gradients(l, Space::SE3Dual, 1, 100, 1e-8, "linear");
  EXPECT_TRUE(lin.passed) << lin.observed;
  EXPECT_TRUE(check_gradients(fn::product(q, l), Space::SE3Dual, 1, 100, 1e-7, "product").passed);
}

TEST(BracketVectorField, RigidBodyMatchesCrossProduct) {
  const Vec3 inertia(1, 2, 3);
  MatX a = MatX::Zero(3, 3);
  a.diagonal() = inertia.cwiseInverse();
  const SmoothFn h = fn::quadratic(a, VecX::Zero(3));
  const Vec3 pi(1, 1, 1);
  const VecX vf = bracket_vector_field(h, ProductPoint::so3(pi));
  EXPECT_NEAR((vf - VecX(pi.cross(pi.cwiseQuotient(inertia)))).norm(), 0.0, 1e-15);
}
