#pragma once

#include <limits>
#include <string>

#include <Eigen/Dense>

#include "lgvi/errors.hpp"
#include "lgvi/so3.hpp"

namespace lgvi {

inline constexpr double kSymmetryTolerance = 1e-9;
inline constexpr double kMaxInertiaCondition = 1e12;

namespace detail {

inline double asymmetry(const Mat3& m) { return (m - m.transpose()).norm(); }

inline void require_symmetric(const Mat3& m, const char* what) {
  if (!m.allFinite()) throw InvalidInertia(std::string(what) + " has non-finite entries");
  const double defect = asymmetry(m);
  if (!(defect <= kSymmetryTolerance)) {
    throw InvalidInertia(std::string(what) + " is not symmetric (||M - M^T||_F = " +
                         std::to_string(defect) + ")");
  }
}

inline double condition_number(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m);
  const Vec3& s = svd.singularValues();
  if (s(2) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(2);
}

}  // namespace detail

/// J = tr(J_d) I - J_d
inline Mat3 j_from_jd(const Mat3& jd) {
  detail::require_symmetric(jd, "J_d");
  return jd.trace() * Mat3::Identity() - jd;
}

/// J_d = tr(J)/2 I - J. Rejects inertias whose J_d has a negative eigenvalue
/// (principal moments violating the triangle inequality).
inline Mat3 jd_from_j(const Mat3& j) {
  detail::require_symmetric(j, "J");
  const Mat3 jd = 0.5 * j.trace() * Mat3::Identity() - j;
  Eigen::SelfAdjointEigenSolver<Mat3> eig(0.5 * (jd + jd.transpose()), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw InvalidInertia("J_d has a negative eigenvalue; principal moments of J violate the "
                         "triangle inequality");
  }
  return jd;
}

/// Body inertia J with its companion J_d = 1/2 int rho X X^T.
class InertiaPair {
 public:
  /// Validates J: symmetric, positive definite, triangle inequality on the
  /// principal moments, and condition number at most 1e12.
  static InertiaPair from_j(const Mat3& j) {
    detail::require_symmetric(j, "J");
    const Mat3 sym = 0.5 * (j + j.transpose());
    Eigen::SelfAdjointEigenSolver<Mat3> eig(sym, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
      throw InvalidInertia("J is not positive definite");
    }
    if (eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff() > kMaxInertiaCondition) {
      throw InvalidInertia("J is near-singular (condition number above 1e12)");
    }
    return InertiaPair(sym, jd_from_j(sym));
  }

  static InertiaPair from_jd(const Mat3& jd) { return from_j(j_from_jd(jd)); }

  static InertiaPair principal(double j1, double j2, double j3) {
    return from_j(Vec3(j1, j2, j3).asDiagonal().toDenseMatrix());
  }

  const Mat3& j() const { return j_; }
  const Mat3& jd() const { return jd_; }
  const Mat3& j_inverse() const { return j_inv_; }

 private:
  InertiaPair(const Mat3& j, const Mat3& jd) : j_(j), jd_(jd), j_inv_(j.inverse()) {}

  Mat3 j_;
  Mat3 jd_;
  Mat3 j_inv_;
};

/// 1/2 Omega^T J Omega
inline double kinetic_energy(const Mat3& j, const Vec3& omega) {
  return 0.5 * omega.dot(j * omega);
}

inline Vec3 momentum_from_velocity(const Mat3& j, const Vec3& omega) { return j * omega; }

/// Omega = J^{-1} Pi; rejects J with condition number above 1e12.
inline Vec3 velocity_from_momentum(const Mat3& j, const Vec3& pi) {
  if (!j.allFinite() || detail::condition_number(j) > kMaxInertiaCondition) {
    throw InvalidInertia("J is near-singular (condition number above 1e12)");
  }
  return j.partialPivLu().solve(pi);
}

inline Vec3 velocity_from_momentum(const InertiaPair& inertia, const Vec3& pi) {
  return inertia.j_inverse() * pi;
}

inline double kinetic_energy_from_momentum(const InertiaPair& inertia, const Vec3& pi) {
  return kinetic_energy(inertia.j(), velocity_from_momentum(inertia, pi));
}

/// Orientation (body to inertial) and body-frame angular momentum at time t.
struct AttitudeState {
  RotationMatrix R;
  Vec3 Pi = Vec3::Zero();
  double t = 0.0;

  static AttitudeState from_velocity(const RotationMatrix& r, const InertiaPair& inertia,
                                     const Vec3& omega, double t = 0.0) {
    return {r, momentum_from_velocity(inertia.j(), omega), t};
  }

  /// Inertial-frame angular momentum R Pi.
  Vec3 spatial_momentum() const { return R * Pi; }
};

}  // namespace lgvi
