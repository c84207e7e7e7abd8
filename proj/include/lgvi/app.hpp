#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "lgvi/config.hpp"
#include "lgvi/diagnostics.hpp"
#include "lgvi/errors.hpp"
#include "lgvi/implicit_solver.hpp"
#include "lgvi/variational_integrator.hpp"

// Batch front end: the simulate / compare / solve commands behind tools/lgvi.

namespace lgvi::app {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kSolverFailure = 3,
  kIoError = 4,
};

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

using json = nlohmann::json;

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open '" + path + "' for writing");
  }

  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out_ << ',';
      out_ << cols[i];
    }
    out_ << '\n';
    first_ = true;
  }

  CsvWriter& operator<<(double v) {
    sep();
    out_ << format_number(v);
    return *this;
  }
  CsvWriter& operator<<(std::size_t v) {
    sep();
    out_ << v;
    return *this;
  }
  CsvWriter& operator<<(int v) {
    sep();
    out_ << v;
    return *this;
  }

  void end_row() {
    out_ << '\n';
    first_ = true;
  }

  void close() {
    out_.close();
    if (!out_) throw IoError("failed writing '" + path_ + "'");
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }

  std::string path_;
  std::ofstream out_;
  bool first_ = true;
};

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json to_json(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return rows;
}

inline json to_json(const DriftSummary& s) {
  return {{"max_energy_drift", s.max_energy_drift},
          {"max_momentum_norm_drift", s.max_momentum_norm_drift},
          {"max_spatial_momentum_drift", s.max_spatial_momentum_drift},
          {"max_orthogonality_defect", s.max_orthogonality_defect},
          {"max_determinant_defect", s.max_determinant_defect}};
}

inline void report_error(std::ostream& err, const char* category, const std::string& message,
                         json extra = json::object()) {
  extra["error"] = category;
  extra["message"] = message;
  err << extra.dump() << '\n';
}

// Maps library exceptions onto exit codes and one-line JSON errors.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    report_error(err, "config", e.what(), {{"path", e.path()}});
    return kConfigError;
  } catch (const StepFailure& e) {
    report_error(err, "solver", e.what(),
                 {{"step", e.step()}, {"residual_norm", e.residual_norm()}});
    return kSolverFailure;
  } catch (const NonConvergence& e) {
    report_error(err, "solver", e.what(),
                 {{"iterations", e.iterations()}, {"residual_norm", e.residual_norm()}});
    return kSolverFailure;
  } catch (const SingularJacobian& e) {
    report_error(err, "solver", e.what(), {{"residual_norm", e.residual_norm()}});
    return kSolverFailure;
  } catch (const IoError& e) {
    report_error(err, "io", e.what());
    return kIoError;
  } catch (const InvalidInertia& e) {
    report_error(err, "config", e.what());
    return kConfigError;
  } catch (const InvalidArgument& e) {
    report_error(err, "config", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return 1;
  }
}

}  // namespace detail

inline const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols = {
      "step",  "t",     "r11",   "r12",   "r13",          "r21",        "r22",
      "r23",   "r31",   "r32",   "r33",   "pi_x",         "pi_y",       "pi_z",
      "energy", "ortho_defect", "det_defect", "spm_x", "spm_y", "spm_z", "newton_iters",
      "newton_residual"};
  return cols;
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                                 const DiagnosticsSeries& diag) {
  detail::CsvWriter csv(path);
  csv.header(trajectory_columns());
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const StepRecord& rec = traj.records[k];
    csv << rec.step << rec.state.t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) csv << rec.state.R(i, j);
    csv << rec.state.Pi.x() << rec.state.Pi.y() << rec.state.Pi.z();
    csv << diag.energy[k] << diag.orthogonality_defect[k] << diag.determinant_defect[k];
    const Vec3& m = diag.spatial_momentum[k];
    csv << m.x() << m.y() << m.z();
    csv << rec.newton_iterations << rec.newton_residual;
    csv.end_row();
  }
  csv.close();
}

/// Runs the variational integrator, writes the trajectory CSV to `out_path`
/// and a JSON summary line to `out`.
inline int run_simulate(const SimConfig& cfg, const std::string& out_path, std::ostream& out,
                        std::ostream& err) {
  return detail::guarded(err, [&] {
    const Trajectory traj = propagate(cfg.initial_state(), cfg.torque, cfg.h, cfg.steps,
                                      cfg.inertia, cfg.solver, cfg.decimation);
    const DiagnosticsSeries diag = compute_diagnostics(traj, cfg.inertia);
    write_trajectory_csv(out_path, traj, diag);

    const StepRecord& last = traj.records.back();
    detail::json summary = {
        {"command", "simulate"},
        {"output", out_path},
        {"h", cfg.h},
        {"steps", cfg.steps},
        {"rows", traj.records.size()},
        {"final",
         {{"t", last.state.t},
          {"R", detail::to_json(last.state.R.matrix())},
          {"pi", detail::to_json(last.state.Pi)}}},
        {"diagnostics", detail::to_json(summarize(diag))},
        {"solver",
         {{"total_iterations", traj.solver.total_iterations},
          {"max_iterations", traj.solver.max_iterations},
          {"mean_iterations",
           static_cast<double>(traj.solver.total_iterations) / static_cast<double>(cfg.steps)},
          {"max_residual", traj.solver.max_residual}}},
    };
    out << summary.dump() << '\n';
    return static_cast<int>(kSuccess);
  });
}

/// Runs the variational integrator and the RK4 baseline (and, with
/// `project`, a polar-projected RK4) from the same initial condition.
inline int run_compare(const SimConfig& cfg, const std::string& out_path, bool project,
                       std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const Trajectory var = propagate(cfg.initial_state(), cfg.torque, cfg.h, cfg.steps,
                                     cfg.inertia, cfg.solver, cfg.decimation);
    const BaselineState b0{cfg.attitude0.matrix(), cfg.pi0};
    std::vector<DiagnosticsSeries> series;
    std::vector<std::string> names = {"var", "rk4"};
    series.push_back(compute_diagnostics(var, cfg.inertia));
    series.push_back(compute_diagnostics(
        rk4_propagate(b0, 0.0, cfg.torque, cfg.h, cfg.steps, cfg.inertia, false, cfg.decimation),
        cfg.inertia));
    if (project) {
      names.push_back("rk4p");
      series.push_back(compute_diagnostics(
          rk4_propagate(b0, 0.0, cfg.torque, cfg.h, cfg.steps, cfg.inertia, true, cfg.decimation),
          cfg.inertia));
    }

    std::vector<std::string> cols = {"step", "t"};
    for (const std::string& n : names) {
      for (const char* c : {"energy", "momentum_norm", "spm_x", "spm_y", "spm_z", "ortho_defect",
                            "det_defect"}) {
        cols.push_back(n + "_" + c);
      }
      if (n == "var") cols.push_back("var_newton_iters");
    }

    detail::CsvWriter csv(out_path);
    csv.header(cols);
    const DiagnosticsSeries& ref = series.front();
    for (std::size_t k = 0; k < ref.size(); ++k) {
      csv << ref.step[k] << ref.time[k];
      for (std::size_t s = 0; s < series.size(); ++s) {
        const DiagnosticsSeries& d = series[s];
        const Vec3& m = d.spatial_momentum[k];
        csv << d.energy[k] << d.momentum_norm[k] << m.x() << m.y() << m.z()
            << d.orthogonality_defect[k] << d.determinant_defect[k];
        if (s == 0) csv << d.newton_iterations[k];
      }
      csv.end_row();
    }
    csv.close();

    detail::json methods = detail::json::object();
    std::vector<DriftSummary> sums;
    for (std::size_t s = 0; s < series.size(); ++s) {
      sums.push_back(summarize(series[s]));
      methods[names[s]] = detail::to_json(sums.back());
    }
    const auto ratio = [](double base, double var) {
      return var > 0.0 ? base / var : (base > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    };
    detail::json summary = {
        {"command", "compare"},
        {"output", out_path},
        {"h", cfg.h},
        {"steps", cfg.steps},
        {"rows", ref.size()},
        {"methods", methods},
        {"baseline_over_variational",
         {{"orthogonality_defect",
           ratio(sums[1].max_orthogonality_defect, sums[0].max_orthogonality_defect)},
          {"spatial_momentum_drift",
           ratio(sums[1].max_spatial_momentum_drift, sums[0].max_spatial_momentum_drift)},
          {"energy_drift", ratio(sums[1].max_energy_drift, sums[0].max_energy_drift)}}},
        {"variational_better",
         {{"orthogonality_defect",
           sums[0].max_orthogonality_defect <= sums[1].max_orthogonality_defect},
          {"spatial_momentum_drift",
           sums[0].max_spatial_momentum_drift <= sums[1].max_spatial_momentum_drift}}},
    };
    out << summary.dump() << '\n';
    return static_cast<int>(kSuccess);
  });
}

/// One Newton solve; prints {w, F, iterations, residual_norm} as JSON.
inline int run_solve(const InertiaPair& inertia, double h, const Vec3& pi,
                     const SolverOptions& opts, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    try {
      const SolveResult r = newton_solve(inertia, h, pi, opts);
      detail::json j = {{"converged", true},
                        {"w", detail::to_json(r.w)},
                        {"F", detail::to_json(r.F.matrix())},
                        {"iterations", r.iterations},
                        {"residual_norm", r.residual_norm}};
      out << j.dump() << '\n';
      return static_cast<int>(kSuccess);
    } catch (const NonConvergence& e) {
      out << detail::json{{"converged", false},
                          {"iterations", e.iterations()},
                          {"residual_norm", e.residual_norm()}}
                 .dump()
          << '\n';
      throw;
    } catch (const SingularJacobian& e) {
      out << detail::json{{"converged", false}, {"residual_norm", e.residual_norm()}}.dump()
          << '\n';
      throw;
    }
  });
}

/// Parses "a,b,c" style lists of reals.
inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    double v = 0.0;
    const char* first = item.data();
    const char* last = item.data() + item.size();
    while (first < last && *first == ' ') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
      throw ConfigError("", "cannot parse '" + item + "' as a real number");
    }
    values.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

/// "j1,j2,j3" principal moments or nine row-major entries.
inline InertiaPair parse_inertia_spec(const std::string& text) {
  const std::vector<double> v = parse_list(text);
  Mat3 j = Mat3::Zero();
  if (v.size() == 3) {
    j.diagonal() << v[0], v[1], v[2];
  } else if (v.size() == 9) {
    j << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  } else {
    throw ConfigError("--inertia", "expected 3 principal moments or 9 row-major entries");
  }
  try {
    return InertiaPair::from_j(j);
  } catch (const InvalidInertia& e) {
    throw ConfigError("--inertia", e.what());
  }
}

inline Vec3 parse_vec3_spec(const std::string& text, const std::string& flag) {
  const std::vector<double> v = parse_list(text);
  if (v.size() != 3) throw ConfigError(flag, "expected three comma-separated reals");
  return {v[0], v[1], v[2]};
}

}  // namespace lgvi::app
