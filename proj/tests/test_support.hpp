#pragma once

// Independent oracles and random generators shared by the test suites. Nothing
// here calls into the code paths it is used to check.

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace lgvi::testing {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

  Vec3 vec(double lo = -1.0, double hi = 1.0) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }

  /// Uniformly distributed direction scaled to a norm drawn from [0, max_norm].
  Vec3 ball(double max_norm) {
    Vec3 d;
    do {
      d = vec();
    } while (d.norm() < 1e-3 || d.norm() > 1.0);
    return d.normalized() * uniform(0.0, max_norm);
  }

  /// Haar-random rotation through a normalized Gaussian quaternion.
  Mat3 rotation() {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Quaterniond q(n(gen_), n(gen_), n(gen_), n(gen_));
    q.normalize();
    return q.toRotationMatrix();
  }

  /// Symmetric positive-definite J whose principal moments obey the triangle
  /// inequality, in a random body frame.
  Mat3 inertia(double lo = 0.5, double hi = 3.0) {
    double a, b, c;
    do {
      a = uniform(lo, hi);
      b = uniform(lo, hi);
      c = uniform(lo, hi);
    } while (a + b < c || a + c < b || b + c < a);
    const Mat3 q = rotation();
    Mat3 j = q * Vec3(a, b, c).asDiagonal() * q.transpose();
    return 0.5 * (j + j.transpose());
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// w x v from the cofactor expansion of det[e; w; v].
inline Vec3 cross_oracle(const Vec3& w, const Vec3& v) {
  return {w(1) * v(2) - w(2) * v(1), w(2) * v(0) - w(0) * v(2), w(0) * v(1) - w(1) * v(0)};
}

/// Skew matrix written out entry by entry.
inline Mat3 skew_oracle(const Vec3& w) {
  Mat3 m;
  m(0, 0) = 0.0;
  m(0, 1) = -w(2);
  m(0, 2) = w(1);
  m(1, 0) = w(2);
  m(1, 1) = 0.0;
  m(1, 2) = -w(0);
  m(2, 0) = -w(1);
  m(2, 1) = w(0);
  m(2, 2) = 0.0;
  return m;
}

/// sum_{n=0}^{terms} W^n / n!
inline Mat3 exp_series_oracle(const Vec3& w, int terms = 20) {
  const Mat3 wh = skew_oracle(w);
  Mat3 sum = Mat3::Identity();
  Mat3 term = Mat3::Identity();
  for (int n = 1; n <= terms; ++n) {
    term = term * wh / static_cast<double>(n);
    sum += term;
  }
  return sum;
}

/// 1/2 tr(hat(Omega) J_d hat(Omega)^T) with J_d = tr(J)/2 I - J.
inline double energy_trace_oracle(const Mat3& j, const Vec3& omega) {
  const Mat3 jd = 0.5 * j.trace() * Mat3::Identity() - j;
  const Mat3 w = skew_oracle(omega);
  return 0.5 * (w * jd * w.transpose()).trace();
}

/// Central finite-difference Jacobian, column i = d f / d x_i.
inline Mat3 fd_jacobian(const std::function<Vec3(const Vec3&)>& f, const Vec3& x, double step) {
  Mat3 jac;
  for (int i = 0; i < 3; ++i) {
    Vec3 dx = Vec3::Zero();
    dx(i) = step;
    jac.col(i) = (f(x + dx) - f(x - dx)) / (2.0 * step);
  }
  return jac;
}

/// General-purpose Newton root finder with a finite-difference Jacobian and
/// full-pivot LU. Returns the final iterate.
inline Vec3 fd_newton_root(const std::function<Vec3(const Vec3&)>& f, Vec3 x, double tol,
                           int max_iters = 100) {
  for (int k = 0; k < max_iters; ++k) {
    const Vec3 r = f(x);
    if (r.norm() <= tol) break;
    const Mat3 jac = fd_jacobian(f, x, 1e-7);
    x -= jac.fullPivLu().solve(r);
  }
  return x;
}

/// Residual F J_d - J_d F^T - hat(h Pi) written out independently.
inline Mat3 residual_oracle(const Mat3& f, const Mat3& jd, double h, const Vec3& pi) {
  return f * jd - jd * f.transpose() - skew_oracle(h * pi);
}

}  // namespace lgvi::testing
