#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lgvi {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (h <= 0, bad tolerance, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Input to vee() was not skew-symmetric within tolerance.
class SkewViolation : public Error {
 public:
  SkewViolation(double defect)
      : Error("matrix is not skew-symmetric (||S + S^T||_F = " + std::to_string(defect) + ")"),
        defect_(defect) {}

  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

// Inertia tensor that does not describe a physical rigid body.
class InvalidInertia : public Error {
 public:
  using Error::Error;
};

// Newton iteration hit max_iters without meeting the residual tolerance.
class NonConvergence : public Error {
 public:
  NonConvergence(int iterations, double residual_norm)
      : Error("newton solve did not converge after " + std::to_string(iterations) +
              " iterations (residual " + std::to_string(residual_norm) + ")"),
        iterations_(iterations),
        residual_norm_(residual_norm) {}

  int iterations() const noexcept { return iterations_; }
  double residual_norm() const noexcept { return residual_norm_; }

 private:
  int iterations_;
  double residual_norm_;
};

// The 3x3 Newton system was too ill-conditioned to solve.
class SingularJacobian : public Error {
 public:
  SingularJacobian(double condition_number, double residual_norm)
      : Error("jacobian is singular (condition number " + std::to_string(condition_number) + ")"),
        condition_number_(condition_number),
        residual_norm_(residual_norm) {}

  double condition_number() const noexcept { return condition_number_; }
  double residual_norm() const noexcept { return residual_norm_; }

 private:
  double condition_number_;
  double residual_norm_;
};

// A propagation step failed; wraps the solver error with the step index.
class StepFailure : public Error {
 public:
  StepFailure(std::size_t step, double residual_norm, const std::string& what)
      : Error("step " + std::to_string(step) + " failed: " + what),
        step_(step),
        residual_norm_(residual_norm) {}

  std::size_t step() const noexcept { return step_; }
  double residual_norm() const noexcept { return residual_norm_; }

 private:
  std::size_t step_;
  double residual_norm_;
};

}  // namespace lgvi
