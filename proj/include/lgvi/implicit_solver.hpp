#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "lgvi/errors.hpp"
#include "lgvi/rigid_body.hpp"
#include "lgvi/so3.hpp"

namespace lgvi {

enum class InitialGuess {
  zero,            // w0 = 0
  momentum_guess,  // w0 = h J^{-1} Pi
};

// Which derivative of f(w) drives the Newton update.
enum class NewtonJacobian {
  exact,        // jacobian(w) * right_jacobian_so3(w); quadratic convergence
  first_order,  // jacobian(w) alone; exact only at w = 0, converges linearly
};

struct SolverOptions {
  double alpha = 1.0;  // Newton step scale, in (0, 1]
  double tol = 1e-12;  // absolute bound on ||f(w)||_2
  int max_iters = 50;
  InitialGuess w0_strategy = InitialGuess::momentum_guess;
  NewtonJacobian jacobian = NewtonJacobian::exact;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("solver alpha must be in (0, 1]");
    if (!(tol > 0.0)) throw InvalidArgument("solver tol must be positive");
    if (max_iters < 1) throw InvalidArgument("solver max_iters must be at least 1");
  }
};

struct SolveResult {
  Vec3 w = Vec3::Zero();
  RotationMatrix F;
  int iterations = 0;
  double residual_norm = 0.0;
};

inline constexpr double kMaxJacobianCondition = 1e14;

namespace detail {

inline void require_positive_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("h must be positive");
}

// F J_d - J_d F^T - hat(h Pi) as a raw matrix. Skew up to roundoff.
inline Mat3 residual_raw(const Mat3& f, const Mat3& jd, double h, const Vec3& pi) {
  return f * jd - jd * f.transpose() - hat_matrix(h * pi);
}

// Roundoff in F J_d - J_d F^T scales with |J_d|, so the skew check does too.
inline double residual_skew_tolerance(const Mat3& jd) {
  return kSkewTolerance * std::max(1.0, jd.norm());
}

}  // namespace detail

/// g(F) = F J_d - J_d F^T - hat(h Pi); zero exactly when F solves the
/// discrete momentum equation.
inline SkewMat3 residual_matrix(const RotationMatrix& f, const Mat3& jd, double h,
                                const Vec3& pi) {
  detail::require_positive_step(h);
  return SkewMat3::from_matrix(detail::residual_raw(f.matrix(), jd, h, pi),
                               detail::residual_skew_tolerance(jd));
}

/// f(w) = vee(g(exp(hat w)))
inline Vec3 residual_vec(const Vec3& w, const Mat3& jd, double h, const Vec3& pi) {
  return vee(residual_matrix(exp_so3(w), jd, h, pi));
}

/// Newton matrix whose column i is
///   vee( exp(hat w) hat(e_i) J_d + J_d hat(e_i) exp(hat w)^T ).
/// This differentiates exp(hat w) as exp(hat w) hat(e_i), which is exact at
/// w = 0 and first-order accurate elsewhere.
inline Mat3 jacobian(const Vec3& w, const Mat3& jd) {
  const Mat3 e = exp_so3(w).matrix();
  Mat3 out;
  for (int i = 0; i < 3; ++i) {
    const Mat3 ei = hat_matrix(Vec3::Unit(i));
    const Mat3 d = e * ei * jd + jd * ei * e.transpose();
    out.col(i) = vee(d, detail::residual_skew_tolerance(jd));
  }
  return out;
}

/// True derivative of residual_vec: the first-order matrix above composed
/// with the right Jacobian of exp.
inline Mat3 exact_jacobian(const Vec3& w, const Mat3& jd) {
  return jacobian(w, jd) * right_jacobian_so3(w);
}

namespace detail {

inline SolveResult newton_iterate(Vec3 w, const Mat3& jd, double h, const Vec3& pi,
                                  const SolverOptions& opts) {
  constexpr int kMaxHalvings = 5;
  Vec3 r = residual_vec(w, jd, h, pi);
  double rnorm = r.norm();
  int n = 0;
  while (!(rnorm <= opts.tol)) {
    if (n >= opts.max_iters || !std::isfinite(rnorm)) throw NonConvergence(n, rnorm);

    const Eigen::PartialPivLU<Mat3> lu(opts.jacobian == NewtonJacobian::exact
                                           ? exact_jacobian(w, jd)
                                           : jacobian(w, jd));
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > kMaxJacobianCondition) {
      throw SingularJacobian(rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity(),
                             rnorm);
    }
    const Vec3 dw = lu.solve(r);

    // Stay inside the injectivity radius of exp.
    double alpha = opts.alpha;
    Vec3 next = w - alpha * dw;
    for (int k = 0; k < kMaxHalvings && next.norm() >= std::numbers::pi; ++k) {
      alpha *= 0.5;
      next = w - alpha * dw;
    }
    w = next;
    r = residual_vec(w, jd, h, pi);
    rnorm = r.norm();
    ++n;
  }
  return {w, exp_so3(w), n, rnorm};
}

}  // namespace detail

/// Solves hat(h Pi) = F J_d - J_d F^T for F = exp(hat w) by damped Newton
/// iteration on w. Throws NonConvergence or SingularJacobian.
inline SolveResult newton_solve(const InertiaPair& inertia, double h, const Vec3& pi,
                                const SolverOptions& opts = {}) {
  detail::require_positive_step(h);
  opts.validate();
  const Vec3 w0 = opts.w0_strategy == InitialGuess::momentum_guess
                      ? Vec3(h * (inertia.j_inverse() * pi))
                      : Vec3(Vec3::Zero());
  return detail::newton_iterate(w0, inertia.jd(), h, pi, opts);
}

inline SolveResult newton_solve(const Mat3& jd, double h, const Vec3& pi,
                                const SolverOptions& opts = {}) {
  detail::require_positive_step(h);
  opts.validate();
  Vec3 w0 = Vec3::Zero();
  if (opts.w0_strategy == InitialGuess::momentum_guess) {
    w0 = h * velocity_from_momentum(j_from_jd(jd), pi);
  }
  return detail::newton_iterate(w0, jd, h, pi, opts);
}

}  // namespace lgvi
