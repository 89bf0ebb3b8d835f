#pragma once

// so(3), SO(3), se(3), SE(3) kernel.
//
// Conventions: vectors are body-frame column vectors, hat(v) * w = v x w, and
// the infinitesimal coadjoint action is ad*_xi(nu) = nu x xi so that
// <ad*_xi nu, eta> = <nu, [xi, eta]>.

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace rch {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Tolerance used when validating rotation matrices.
inline constexpr double kOrthogonalityTol = 1e-10;
/// Below this angle exp_so3 switches to Taylor coefficients.
inline constexpr double kSmallAngle = 1e-6;

/// Element of SO(3). Constructed through `from_matrix` (validated) or the
/// group operations, which preserve the invariant up to roundoff.
class Rotation3 {
 public:
  Rotation3() : m_(Mat3::Identity()) {}

  static Rotation3 identity() { return Rotation3(); }

  /// Throws NotRotation unless m^T m = I and det m = 1 within `tol`.
  static Rotation3 from_matrix(const Mat3& m, double tol = kOrthogonalityTol);

  /// Wraps `m` without validation. Integrators use this for intermediate
  /// states and restore the invariant with `reorthonormalize`.
  static Rotation3 unchecked(const Mat3& m) {
    Rotation3 r;
    r.m_ = m;
    return r;
  }

  const Mat3& matrix() const { return m_; }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation3 operator*(const Rotation3& other) const { return unchecked(m_ * other.m_); }
  Rotation3 inverse() const { return unchecked(m_.transpose()); }

  /// max |m^T m - I|
  double orthogonality_defect() const;

 private:
  Mat3 m_;
};

/// Skew matrix with hat(v) * w = v x w.
Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws NotSkew if |m + m^T|_max > 1e-10.
Vec3 vee(const Mat3& m);

/// Group exponential (Rodrigues).
Rotation3 exp_so3(const Vec3& v);

/// Lie bracket on so(3): the cross product.
inline Vec3 bracket_so3(const Vec3& a, const Vec3& b) { return a.cross(b); }

/// ad*_xi(nu) = nu x xi.
inline Vec3 coad_so3(const Vec3& xi, const Vec3& nu) { return nu.cross(xi); }

/// Nearest rotation in the Frobenius sense (polar factor).
/// Throws Degenerate when `r` is rank deficient or its polar factor is a
/// reflection.
Rotation3 reorthonormalize(const Mat3& r);
inline Rotation3 reorthonormalize(const Rotation3& r) { return reorthonormalize(r.matrix()); }

// ---------------------------------------------------------------------------
// SE(3) = SO(3) x| R^3 with the standard action of SO(3) on R^3.

struct SE3Element {
  Rotation3 rot;
  Vec3 trans = Vec3::Zero();

  static SE3Element identity() { return {}; }
};

/// (A1, v1)(A2, v2) = (A1 A2, v1 + A1 v2)
SE3Element compose_se3(const SE3Element& g1, const SE3Element& g2);

struct SE3AlgebraElement {
  Vec3 omega = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
};

/// [(xi1, v1), (xi2, v2)] = (xi1 x xi2, xi1 x v2 - xi2 x v1)
SE3AlgebraElement bracket_se3(const SE3AlgebraElement& a, const SE3AlgebraElement& b);

/// Point (Pi, Gamma) of se(3)*.
struct SE3CoalgebraPoint {
  Vec3 pi = Vec3::Zero();
  Vec3 gamma = Vec3::Zero();
};

bool all_finite(const Vec3& v);

}  // namespace rch
