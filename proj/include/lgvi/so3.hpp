#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "lgvi/errors.hpp"

namespace lgvi {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kSkewTolerance = 1e-9;
inline constexpr double kRotationTolerance = 1e-9;

inline bool is_finite(const Vec3& v) { return v.allFinite(); }

/// Element of so(3). Only the three independent entries are stored, so
/// S = -S^T holds exactly.
class SkewMat3 {
 public:
  SkewMat3() : axial_(Vec3::Zero()) {}

  /// Builds from a general matrix: rejects it if ||S + S^T||_F > tol, and
  /// otherwise keeps the skew part (S - S^T) / 2.
  static SkewMat3 from_matrix(const Mat3& m, double tol = kSkewTolerance) {
    const double defect = (m + m.transpose()).norm();
    if (!(defect <= tol)) throw SkewViolation(defect);
    const Mat3 s = 0.5 * (m - m.transpose());
    return SkewMat3(Vec3(s(2, 1), s(0, 2), s(1, 0)));
  }

  Mat3 matrix() const {
    Mat3 m;
    m << 0.0, -axial_.z(), axial_.y(),
         axial_.z(), 0.0, -axial_.x(),
         -axial_.y(), axial_.x(), 0.0;
    return m;
  }

  const Vec3& axial() const { return axial_; }

 private:
  explicit SkewMat3(const Vec3& axial) : axial_(axial) {}
  friend SkewMat3 hat(const Vec3& w);

  Vec3 axial_;
};

/// w -> [0, -w3, w2; w3, 0, -w1; -w2, w1, 0], so that hat(w) v = w x v.
inline SkewMat3 hat(const Vec3& w) { return SkewMat3(w); }

inline Mat3 hat_matrix(const Vec3& w) { return hat(w).matrix(); }

inline Vec3 vee(const SkewMat3& s) { return s.axial(); }

/// Inverse of hat on a general 3x3 matrix. Throws SkewViolation when the
/// input is further than tol (Frobenius) from so(3).
inline Vec3 vee(const Mat3& m, double tol = kSkewTolerance) {
  return SkewMat3::from_matrix(m, tol).axial();
}

struct RotationCheck {
  bool valid = false;
  double orthogonality_defect = 0.0;  // ||R^T R - I||_F
  double determinant = 0.0;
};

/// Reports rather than throws.
inline RotationCheck validate_rotation(const Mat3& r, double tol = kRotationTolerance) {
  if (!(tol > 0.0)) throw InvalidArgument("validate_rotation: tolerance must be positive");
  RotationCheck check;
  check.orthogonality_defect = (r.transpose() * r - Mat3::Identity()).norm();
  check.determinant = r.determinant();
  check.valid = r.allFinite() && check.orthogonality_defect <= tol && check.determinant > 0.0;
  return check;
}

/// Element of SO(3). Constructed from exp_so3, by validated conversion, or by
/// group operations; never re-orthonormalized behind the caller's back.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Mat3::Identity()) {}

  static RotationMatrix identity() { return RotationMatrix(); }

  static RotationMatrix from_matrix(const Mat3& m, double tol = kRotationTolerance) {
    const RotationCheck check = validate_rotation(m, tol);
    if (!check.valid) {
      throw InvalidArgument("matrix is not a rotation (orthogonality defect " +
                            std::to_string(check.orthogonality_defect) + ", det " +
                            std::to_string(check.determinant) + ")");
    }
    return RotationMatrix(m);
  }

  /// Nearest rotation in the Frobenius sense (polar factor U V^T).
  static RotationMatrix project(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3 v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
    return RotationMatrix(u * v.transpose());
  }

  const Mat3& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  RotationMatrix transpose() const { return RotationMatrix(m_.transpose()); }

  friend RotationMatrix operator*(const RotationMatrix& a, const RotationMatrix& b) {
    return RotationMatrix(a.m_ * b.m_);
  }
  friend Vec3 operator*(const RotationMatrix& a, const Vec3& v) { return a.m_ * v; }

 private:
  explicit RotationMatrix(const Mat3& m) : m_(m) {}
  friend RotationMatrix exp_so3(const Vec3& w);

  Mat3 m_;
};

/// exp(hat(w)) by the Rodrigues formula
///   I + (sin t / t) W + ((1 - cos t) / t^2) W^2,   t = |w|,
/// switching to 4th-order Taylor coefficients below t = 1e-4.
inline RotationMatrix exp_so3(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a;
  double b;
  if (theta < 1e-4) {
    const double theta4 = theta2 * theta2;
    a = 1.0 - theta2 / 6.0 + theta4 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta4 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 wh = hat_matrix(w);
  return RotationMatrix(Mat3::Identity() + a * wh + b * (wh * wh));
}

/// Right Jacobian of exp on SO(3):
///   d/ds exp(hat(w + s v)) |_{s=0} = exp(hat w) hat(right_jacobian_so3(w) v).
/// J_r(w) = I - ((1 - cos t) / t^2) W + ((t - sin t) / t^3) W^2.
inline Mat3 right_jacobian_so3(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  double b;
  double c;
  if (theta < 1e-4) {
    const double theta4 = theta2 * theta2;
    b = 0.5 - theta2 / 24.0 + theta4 / 720.0;
    c = 1.0 / 6.0 - theta2 / 120.0 + theta4 / 5040.0;
  } else {
    b = (1.0 - std::cos(theta)) / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }
  const Mat3 wh = hat_matrix(w);
  return Mat3::Identity() - b * wh + c * (wh * wh);
}

}  // namespace lgvi
