#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "lgvi/errors.hpp"
#include "lgvi/rigid_body.hpp"
#include "lgvi/so3.hpp"
#include "lgvi/variational_integrator.hpp"

namespace lgvi {

// ---------------------------------------------------------------------------
// Reference integrator: classical RK4 on
//   dR/dt = R hat(Omega),   dPi/dt = Pi x Omega + u,   Omega = J^{-1} Pi,
// with R treated as nine unconstrained reals.
// ---------------------------------------------------------------------------

struct BaselineState {
  Mat3 R = Mat3::Identity();
  Vec3 Pi = Vec3::Zero();
};

struct BaselineSample {
  std::size_t step = 0;
  double t = 0.0;
  BaselineState state;
};

struct BaselineTrajectory {
  double h = 0.0;
  std::size_t steps = 0;
  bool projected = false;
  std::vector<BaselineSample> samples;
};

inline std::pair<Mat3, Vec3> continuous_rhs(const Mat3& r, const Vec3& pi, const Vec3& u,
                                            const InertiaPair& inertia) {
  const Vec3 omega = inertia.j_inverse() * pi;
  return {r * hat_matrix(omega), pi.cross(omega) + u};
}

/// Same vector field for a bare J; rejects near-singular J.
inline std::pair<Mat3, Vec3> continuous_rhs(const Mat3& r, const Vec3& pi, const Vec3& u,
                                            const Mat3& j) {
  const Vec3 omega = velocity_from_momentum(j, pi);
  return {r * hat_matrix(omega), pi.cross(omega) + u};
}

/// One classical RK4 step with u held constant over the step. No projection.
inline BaselineState rk4_step(const BaselineState& s, const Vec3& u, double h,
                              const InertiaPair& inertia) {
  if (!(h > 0.0)) throw InvalidArgument("h must be positive");
  const auto [dr1, dp1] = continuous_rhs(s.R, s.Pi, u, inertia);
  const auto [dr2, dp2] = continuous_rhs(s.R + 0.5 * h * dr1, s.Pi + 0.5 * h * dp1, u, inertia);
  const auto [dr3, dp3] = continuous_rhs(s.R + 0.5 * h * dr2, s.Pi + 0.5 * h * dp2, u, inertia);
  const auto [dr4, dp4] = continuous_rhs(s.R + h * dr3, s.Pi + h * dp3, u, inertia);
  BaselineState out;
  out.R = s.R + (h / 6.0) * (dr1 + 2.0 * dr2 + 2.0 * dr3 + dr4);
  out.Pi = s.Pi + (h / 6.0) * (dp1 + 2.0 * dp2 + 2.0 * dp3 + dp4);
  return out;
}

/// RK4 over N steps with torque sampled at the left end of each step. With
/// `project`, R is replaced by its polar factor after every step.
inline BaselineTrajectory rk4_propagate(const BaselineState& initial, double t0,
                                        const TorqueSchedule& schedule, double h, std::size_t n,
                                        const InertiaPair& inertia, bool project = false,
                                        std::size_t decimation = 1) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("h must be positive");
  if (n < 1) throw InvalidArgument("number of steps must be at least 1");
  if (decimation < 1) throw InvalidArgument("decimation must be at least 1");
  if (!schedule.covers(t0, t0 + static_cast<double>(n) * h)) {
    throw InvalidArgument("torque table does not cover the simulation horizon");
  }
  BaselineTrajectory traj;
  traj.h = h;
  traj.steps = n;
  traj.projected = project;
  traj.samples.reserve(n / decimation + 2);
  traj.samples.push_back({0, t0, initial});

  BaselineState s = initial;
  for (std::size_t k = 0; k < n; ++k) {
    s = rk4_step(s, schedule.at(t0 + static_cast<double>(k) * h), h, inertia);
    if (project) s.R = RotationMatrix::project(s.R).matrix();
    if ((k + 1) % decimation == 0 || k + 1 == n) {
      traj.samples.push_back({k + 1, t0 + static_cast<double>(k + 1) * h, s});
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Conservation diagnostics
// ---------------------------------------------------------------------------

struct DiagnosticsSeries {
  std::vector<std::size_t> step;
  std::vector<double> time;
  std::vector<double> energy;
  std::vector<double> momentum_norm;
  std::vector<Vec3> spatial_momentum;
  std::vector<double> orthogonality_defect;
  std::vector<double> determinant_defect;
  // Empty for the baseline.
  std::vector<int> newton_iterations;
  std::vector<double> newton_residual;

  std::size_t size() const { return time.size(); }
};

namespace detail {

inline void append_sample(DiagnosticsSeries& d, std::size_t step, double t, const Mat3& r,
                          const Vec3& pi, const InertiaPair& inertia) {
  d.step.push_back(step);
  d.time.push_back(t);
  d.energy.push_back(kinetic_energy_from_momentum(inertia, pi));
  d.momentum_norm.push_back(pi.norm());
  d.spatial_momentum.push_back(r * pi);
  const RotationCheck check = validate_rotation(r, kRotationTolerance);
  d.orthogonality_defect.push_back(check.orthogonality_defect);
  d.determinant_defect.push_back(std::abs(check.determinant - 1.0));
}

}  // namespace detail

inline DiagnosticsSeries compute_diagnostics(const Trajectory& traj, const InertiaPair& inertia) {
  if (traj.records.empty()) throw InvalidArgument("trajectory is empty");
  DiagnosticsSeries d;
  for (const StepRecord& rec : traj.records) {
    detail::append_sample(d, rec.step, rec.state.t, rec.state.R.matrix(), rec.state.Pi, inertia);
    d.newton_iterations.push_back(rec.newton_iterations);
    d.newton_residual.push_back(rec.newton_residual);
  }
  return d;
}

inline DiagnosticsSeries compute_diagnostics(const BaselineTrajectory& traj,
                                             const InertiaPair& inertia) {
  if (traj.samples.empty()) throw InvalidArgument("trajectory is empty");
  DiagnosticsSeries d;
  for (const BaselineSample& s : traj.samples) {
    detail::append_sample(d, s.step, s.t, s.state.R, s.state.Pi, inertia);
  }
  return d;
}

/// Worst-case drift of each monitored quantity relative to the first sample.
/// Energy and momentum drifts are relative to their initial magnitude, or
/// absolute when that magnitude is zero.
struct DriftSummary {
  double max_energy_drift = 0.0;
  double max_momentum_norm_drift = 0.0;
  double max_spatial_momentum_drift = 0.0;
  double max_orthogonality_defect = 0.0;
  double max_determinant_defect = 0.0;
};

inline DriftSummary summarize(const DiagnosticsSeries& d) {
  DriftSummary s;
  if (d.size() == 0) return s;
  const auto scale = [](double v) { return v > 0.0 ? v : 1.0; };
  const double e0 = d.energy.front();
  const double p0 = d.momentum_norm.front();
  const Vec3 m0 = d.spatial_momentum.front();
  for (std::size_t k = 0; k < d.size(); ++k) {
    s.max_energy_drift = std::max(s.max_energy_drift, std::abs(d.energy[k] - e0) / scale(e0));
    s.max_momentum_norm_drift =
        std::max(s.max_momentum_norm_drift, std::abs(d.momentum_norm[k] - p0) / scale(p0));
    s.max_spatial_momentum_drift =
        std::max(s.max_spatial_momentum_drift, (d.spatial_momentum[k] - m0).norm() / scale(p0));
    s.max_orthogonality_defect = std::max(s.max_orthogonality_defect, d.orthogonality_defect[k]);
    s.max_determinant_defect = std::max(s.max_determinant_defect, d.determinant_defect[k]);
  }
  return s;
}

/// Least-squares line through (t_k, y_k) and the peak-to-peak spread of
/// what is left after removing it.
struct TrendFit {
  double slope = 0.0;
  double intercept = 0.0;
  double detrended_peak_to_peak = 0.0;
  double span = 0.0;  // t_last - t_first

  /// Change attributable to the linear trend over the whole record.
  double trend_contribution() const { return std::abs(slope) * span; }
};

inline TrendFit fit_trend(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) {
    throw InvalidArgument("trend fit needs at least two paired samples");
  }
  const double n = static_cast<double>(t.size());
  double tm = 0.0;
  double ym = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    tm += t[i];
    ym += y[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
  }
  TrendFit fit;
  fit.slope = stt > 0.0 ? sty / stt : 0.0;
  fit.intercept = ym - fit.slope * tm;
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * t[i]);
    if (i == 0 || r < lo) lo = r;
    if (i == 0 || r > hi) hi = r;
  }
  fit.detrended_peak_to_peak = hi - lo;
  fit.span = t.back() - t.front();
  return fit;
}

}  // namespace lgvi
