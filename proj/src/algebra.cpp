#include "rch/algebra.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "rch/errors.hpp"

namespace rch {

bool all_finite(const Vec3& v) { return v.allFinite(); }

Rotation3 Rotation3::from_matrix(const Mat3& m, double tol) {
  if (!m.allFinite()) throw Error(ErrorKind::NotRotation, "matrix has non-finite entries");
  Rotation3 r = unchecked(m);
  const double defect = r.orthogonality_defect();
  if (defect > tol) {
    throw Error(ErrorKind::NotRotation,
                "orthogonality defect " + std::to_string(defect) + " exceeds tolerance");
  }
  if (std::abs(m.determinant() - 1.0) > tol) {
    throw Error(ErrorKind::NotRotation, "determinant is not +1");
  }
  return r;
}

double Rotation3::orthogonality_defect() const {
  return (m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  // clang-format off
  m <<  0.0,   -v.z(),  v.y(),
        v.z(),  0.0,   -v.x(),
       -v.y(),  v.x(),  0.0;
  // clang-format on
  return m;
}

Vec3 vee(const Mat3& m) {
  if ((m + m.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorKind::NotSkew, "matrix is not skew-symmetric");
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Rotation3 exp_so3(const Vec3& v) {
  const double theta2 = v.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a;  // sin(theta) / theta
  double b;  // (1 - cos(theta)) / theta^2
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 k = hat(v);
  return Rotation3::unchecked(Mat3::Identity() + a * k + b * (k * k));
}

Rotation3 reorthonormalize(const Mat3& r) {
  if (!r.allFinite()) throw Error(ErrorKind::Degenerate, "matrix has non-finite entries");
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 s = svd.singularValues();
  if (s(0) == 0.0 || s(2) <= 1e-12 * s(0)) {
    throw Error(ErrorKind::Degenerate, "matrix is rank deficient");
  }
  const Mat3 q = svd.matrixU() * svd.matrixV().transpose();
  if (q.determinant() < 0.0) {
    throw Error(ErrorKind::Degenerate, "nearest orthogonal matrix is a reflection");
  }
  return Rotation3::unchecked(q);
}

SE3Element compose_se3(const SE3Element& g1, const SE3Element& g2) {
  return {g1.rot * g2.rot, g1.trans + g1.rot * g2.trans};
}

SE3AlgebraElement bracket_se3(const SE3AlgebraElement& a, const SE3AlgebraElement& b) {
  return {a.omega.cross(b.omega), a.omega.cross(b.vel) - b.omega.cross(a.vel)};
}

}  // namespace rch
