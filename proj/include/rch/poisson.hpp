#pragma once

// Lie-Poisson brackets on so(3)* and se(3)*, the canonical bracket on rotor
// factors (theta, l), their sum on product spaces, the KKS orbit form, and
// Casimirs.
//
// Every point is a ProductPoint whose flat coordinate layout is
//   [Pi (3), Gamma (3, se(3)* only), theta (K), l (K)].

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "rch/algebra.hpp"

namespace rch {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

enum class Space { SO3Dual, SE3Dual };

enum class BracketSign { Minus, Plus };

inline double sign_value(BracketSign s) { return s == BracketSign::Minus ? -1.0 : 1.0; }

struct ProductPoint {
  Space space = Space::SO3Dual;
  Vec3 pi = Vec3::Zero();
  Vec3 gamma = Vec3::Zero();  // unused on so(3)*
  VecX theta;                 // rotor angles, size K
  VecX ell;                   // rotor momenta, size K

  static ProductPoint so3(const Vec3& pi);
  static ProductPoint se3(const SE3CoalgebraPoint& p);
  static ProductPoint with_rotors(ProductPoint base, const VecX& theta, const VecX& ell);

  std::size_t lie_dim() const { return space == Space::SO3Dual ? 3 : 6; }
  std::size_t rotor_count() const { return static_cast<std::size_t>(theta.size()); }
  std::size_t dim() const { return lie_dim() + 2 * rotor_count(); }

  VecX flat() const;
  /// Inverse of flat(); `rotors` is K.
  static ProductPoint from_flat(Space space, std::size_t rotors, const VecX& x);
};

/// Partial derivatives of a function on a ProductPoint, slot by slot.
struct Gradient {
  Vec3 d_pi = Vec3::Zero();
  Vec3 d_gamma = Vec3::Zero();
  VecX d_theta;
  VecX d_ell;

  /// Zero gradient shaped like `p`.
  static Gradient zero_like(const ProductPoint& p);
  VecX flat(Space space) const;
  static Gradient from_flat(Space space, std::size_t rotors, const VecX& g);
};

/// A smooth function together with its analytic gradient.
struct SmoothFn {
  std::function<double(const ProductPoint&)> eval;
  std::function<Gradient(const ProductPoint&)> grad;

  double operator()(const ProductPoint& p) const { return eval(p); }
};

namespace fn {

/// j-th flat coordinate function x_j.
SmoothFn coordinate(std::size_t j);
SmoothFn pi_component(int i);
SmoothFn gamma_component(int i);
SmoothFn rotor_angle(int i);
SmoothFn rotor_momentum(int i);

/// x -> c^T x + offset in flat coordinates.
SmoothFn linear(const VecX& c, double offset = 0.0);
/// x -> 1/2 x^T A x + b^T x + c in flat coordinates (A symmetrized).
SmoothFn quadratic(const MatX& a, const VecX& b, double c = 0.0);
SmoothFn constant(double c);
SmoothFn product(const SmoothFn& f, const SmoothFn& g);
SmoothFn sum(const SmoothFn& f, const SmoothFn& g);

}  // namespace fn

/// {F,K}(Pi) = +-Pi . (grad F x grad K)
double lp_bracket_so3(const SmoothFn& f, const SmoothFn& k, const Vec3& pi, BracketSign sign);

/// Semidirect-product bracket on se(3)*. For the minus sign:
///   -Pi.(dF/dPi x dK/dPi) - Gamma.(dF/dPi x dK/dGamma - dK/dPi x dF/dGamma)
double lp_bracket_se3(const SmoothFn& f, const SmoothFn& k, const SE3CoalgebraPoint& p,
                      BracketSign sign);

/// Canonical bracket sum_i (dF/dtheta_i dK/dl_i - dK/dtheta_i dF/dl_i),
/// evaluated at (Pi = 0, theta, l).
double bracket_rotor(const SmoothFn& f, const SmoothFn& k, const VecX& theta, const VecX& ell);

/// Lie-Poisson factor bracket plus rotor factor bracket.
double bracket_product(const SmoothFn& f, const SmoothFn& k, const ProductPoint& p,
                       BracketSign sign);

/// Bracket built from precomputed gradients.
double bracket_from_gradients(const ProductPoint& p, const Gradient& df, const Gradient& dk,
                              BracketSign sign);

/// Bracket-derived Hamiltonian vector field: component j is {x_j, h}_-(p).
VecX bracket_vector_field(const SmoothFn& h, const ProductPoint& p);

/// Pi x dh/dPi.
inline Vec3 ham_vf_so3(const Vec3& grad_h, const Vec3& pi) { return pi.cross(grad_h); }

/// (Pi x dh/dPi + Gamma x dh/dGamma, Gamma x dh/dPi).
SE3CoalgebraPoint ham_vf_se3(const Vec3& grad_pi, const Vec3& grad_gamma,
                             const SE3CoalgebraPoint& p);

/// Minus KKS form on the orbit through nu, evaluated on the tangent vectors
/// ad*_xi nu and ad*_eta nu: -nu . (xi x eta).
inline double kks_form(const Vec3& nu, const Vec3& xi, const Vec3& eta) {
  return -nu.dot(xi.cross(eta));
}

/// so(3)*: [|Pi|^2];  se(3)*: [|Gamma|^2, Pi . Gamma]
std::vector<SmoothFn> casimirs(Space space);

}  // namespace rch
