#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lgvi/errors.hpp"
#include "lgvi/implicit_solver.hpp"
#include "lgvi/rigid_body.hpp"
#include "lgvi/so3.hpp"

namespace lgvi {

/// Body-frame control torque u(t) in N m.
class TorqueSchedule {
 public:
  enum class Kind { zero, constant, sinusoidal, tabulated };

  TorqueSchedule() = default;

  static TorqueSchedule zero() { return {}; }

  static TorqueSchedule constant(const Vec3& u) {
    TorqueSchedule s;
    s.kind_ = Kind::constant;
    s.value_ = u;
    return s;
  }

  /// u_i(t) = amplitude_i * sin(frequency_i * t + phase_i), frequency in rad/s.
  static TorqueSchedule sinusoidal(const Vec3& amplitude, const Vec3& frequency,
                                   const Vec3& phase) {
    TorqueSchedule s;
    s.kind_ = Kind::sinusoidal;
    s.value_ = amplitude;
    s.frequency_ = frequency;
    s.phase_ = phase;
    return s;
  }

  /// Zero-order hold over strictly increasing sample times.
  static TorqueSchedule tabulated(std::vector<double> times, std::vector<Vec3> values) {
    if (times.empty() || times.size() != values.size()) {
      throw InvalidArgument("tabulated torque needs matching, nonempty times and values");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) {
        throw InvalidArgument("tabulated torque times must be strictly increasing");
      }
    }
    TorqueSchedule s;
    s.kind_ = Kind::tabulated;
    s.times_ = std::move(times);
    s.values_ = std::move(values);
    return s;
  }

  Kind kind() const { return kind_; }

  Vec3 at(double t) const {
    switch (kind_) {
      case Kind::zero:
        return Vec3::Zero();
      case Kind::constant:
        return value_;
      case Kind::sinusoidal:
        return {value_.x() * std::sin(frequency_.x() * t + phase_.x()),
                value_.y() * std::sin(frequency_.y() * t + phase_.y()),
                value_.z() * std::sin(frequency_.z() * t + phase_.z())};
      case Kind::tabulated: {
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        if (it == times_.begin()) return values_.front();
        return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
      }
    }
    return Vec3::Zero();
  }

  /// Tabulated schedules must span [t0, t1]; other kinds always do.
  bool covers(double t0, double t1) const {
    if (kind_ != Kind::tabulated) return true;
    return times_.front() <= t0 && times_.back() >= t1;
  }

 private:
  Kind kind_ = Kind::zero;
  Vec3 value_ = Vec3::Zero();
  Vec3 frequency_ = Vec3::Zero();
  Vec3 phase_ = Vec3::Zero();
  std::vector<double> times_;
  std::vector<Vec3> values_;
};

struct StepRecord {
  std::size_t step = 0;
  AttitudeState state;
  int newton_iterations = 0;
  double newton_residual = 0.0;
  RotationMatrix F;  // R_k^T R_{k+1}; identity for the initial record
};

struct SolverStats {
  long long total_iterations = 0;
  int max_iterations = 0;
  double max_residual = 0.0;
};

struct Trajectory {
  double h = 0.0;
  std::size_t steps = 0;  // N; records.size() == N + 1 when decimation is 1
  std::vector<StepRecord> records;
  SolverStats solver;
};

/// One step of the discrete Hamilton equations:
///   hat(h Pi_k) = F_k J_d - J_d F_k^T,  R_{k+1} = R_k F_k,
///   Pi_{k+1} = F_k^T Pi_k + h u_k.
/// Throws whatever newton_solve throws.
inline StepRecord step(const AttitudeState& state, const Vec3& u, double h,
                       const InertiaPair& inertia, const SolverOptions& opts = {}) {
  const SolveResult sol = newton_solve(inertia, h, state.Pi, opts);
  StepRecord rec;
  rec.state.R = state.R * sol.F;
  rec.state.Pi = sol.F.transpose() * state.Pi + h * u;
  rec.state.t = state.t + h;
  rec.newton_iterations = sol.iterations;
  rec.newton_residual = sol.residual_norm;
  rec.F = sol.F;
  return rec;
}

/// Runs N fixed steps from `initial`. Torque is sampled at the left end of
/// each step. Every `decimation`-th record is kept, plus the last one.
/// Throws StepFailure carrying the index of the step that failed.
inline Trajectory propagate(const AttitudeState& initial, const TorqueSchedule& schedule, double h,
                            std::size_t n, const InertiaPair& inertia,
                            const SolverOptions& opts = {}, std::size_t decimation = 1) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("h must be positive");
  if (n < 1) throw InvalidArgument("number of steps must be at least 1");
  if (decimation < 1) throw InvalidArgument("decimation must be at least 1");
  opts.validate();
  if (!validate_rotation(initial.R.matrix(), kRotationTolerance).valid) {
    throw InvalidArgument("initial attitude is not a rotation matrix");
  }
  const double t0 = initial.t;
  if (!schedule.covers(t0, t0 + static_cast<double>(n) * h)) {
    throw InvalidArgument("torque table does not cover the simulation horizon");
  }

  Trajectory traj;
  traj.h = h;
  traj.steps = n;
  traj.records.reserve(n / decimation + 2);
  traj.records.push_back(StepRecord{0, initial, 0, 0.0, RotationMatrix::identity()});

  AttitudeState current = initial;
  for (std::size_t k = 0; k < n; ++k) {
    const double tk = t0 + static_cast<double>(k) * h;
    StepRecord rec;
    try {
      rec = step(current, schedule.at(tk), h, inertia, opts);
    } catch (const NonConvergence& e) {
      throw StepFailure(k, e.residual_norm(), e.what());
    } catch (const SingularJacobian& e) {
      throw StepFailure(k, e.residual_norm(), e.what());
    }
    rec.step = k + 1;
    rec.state.t = t0 + static_cast<double>(k + 1) * h;
    current = rec.state;

    traj.solver.total_iterations += rec.newton_iterations;
    traj.solver.max_iterations = std::max(traj.solver.max_iterations, rec.newton_iterations);
    traj.solver.max_residual = std::max(traj.solver.max_residual, rec.newton_residual);

    if ((k + 1) % decimation == 0 || k + 1 == n) traj.records.push_back(rec);
  }
  return traj;
}

}  // namespace lgvi
