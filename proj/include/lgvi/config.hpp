#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lgvi/errors.hpp"
#include "lgvi/implicit_solver.hpp"
#include "lgvi/rigid_body.hpp"
#include "lgvi/so3.hpp"
#include "lgvi/variational_integrator.hpp"

namespace lgvi {

/// Malformed or invalid simulation config. `path` names the offending field
/// as a JSON pointer-like path, e.g. "/solver/alpha".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error((path.empty() ? std::string("/") : path) + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct SimConfig {
  InertiaPair inertia = InertiaPair::principal(1.0, 1.0, 1.0);
  RotationMatrix attitude0;
  Vec3 pi0 = Vec3::Zero();
  double h = 0.0;
  std::size_t steps = 0;
  TorqueSchedule torque;
  SolverOptions solver;
  std::size_t decimation = 1;

  AttitudeState initial_state() const { return {attitude0, pi0, 0.0}; }
};

namespace detail {

using json = nlohmann::json;

inline double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

inline Vec3 read_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected an array of 3 numbers");
  return {read_number(j[0], path + "/0"), read_number(j[1], path + "/1"),
          read_number(j[2], path + "/2")};
}

inline Mat3 read_mat3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected a 3x3 nested array");
  Mat3 m;
  for (int i = 0; i < 3; ++i) m.row(i) = read_vec3(j[i], path + "/" + std::to_string(i));
  return m;
}

inline void reject_unknown_keys(const json& obj, const std::string& path,
                                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(path + "/" + key, "unknown key");
  }
}

inline const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

inline InertiaPair read_inertia(const json& j) {
  const std::string path = "/inertia";
  Mat3 m;
  if (j.is_array() && j.size() == 3 && j[0].is_number()) {
    m = read_vec3(j, path).asDiagonal();
  } else if (j.is_array() && j.size() == 3) {
    m = read_mat3(j, path);
  } else {
    throw ConfigError(path, "expected 3 principal moments or a symmetric 3x3 matrix");
  }
  try {
    return InertiaPair::from_j(m);
  } catch (const InvalidInertia& e) {
    throw ConfigError(path, e.what());
  }
}

inline RotationMatrix read_attitude(const json& j) {
  const std::string path = "/attitude0";
  Mat3 m;
  if (j.is_object()) {
    reject_unknown_keys(j, path, {"axis", "angle"});
    if (!j.contains("axis") || !j.contains("angle")) {
      throw ConfigError(path, "axis-angle attitude needs both 'axis' and 'angle'");
    }
    const Vec3 axis = read_vec3(j["axis"], path + "/axis");
    const double angle = read_number(j["angle"], path + "/angle");
    if (!(axis.norm() > 0.0)) throw ConfigError(path + "/axis", "axis must be nonzero");
    m = exp_so3(angle * axis.normalized()).matrix();
  } else {
    m = read_mat3(j, path);
  }
  if (!validate_rotation(m, 1e-6).valid) {
    throw ConfigError(path, "initial attitude is not a rotation matrix (tolerance 1e-6)");
  }
  return RotationMatrix::project(m);
}

inline TorqueSchedule read_torque(const json& j) {
  const std::string path = "/torque";
  require_object(j, path);
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError(path + "/kind", "expected one of zero, constant, sinusoidal, tabulated");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "zero") {
    reject_unknown_keys(j, path, {"kind"});
    return TorqueSchedule::zero();
  }
  if (kind == "constant") {
    reject_unknown_keys(j, path, {"kind", "value"});
    if (!j.contains("value")) throw ConfigError(path + "/value", "missing");
    return TorqueSchedule::constant(read_vec3(j["value"], path + "/value"));
  }
  if (kind == "sinusoidal") {
    reject_unknown_keys(j, path, {"kind", "amplitude", "frequency", "phase"});
    if (!j.contains("amplitude")) throw ConfigError(path + "/amplitude", "missing");
    if (!j.contains("frequency")) throw ConfigError(path + "/frequency", "missing");
    const Vec3 phase = j.contains("phase") ? read_vec3(j["phase"], path + "/phase") : Vec3::Zero();
    return TorqueSchedule::sinusoidal(read_vec3(j["amplitude"], path + "/amplitude"),
                                      read_vec3(j["frequency"], path + "/frequency"), phase);
  }
  if (kind == "tabulated") {
    reject_unknown_keys(j, path, {"kind", "times", "values"});
    if (!j.contains("times") || !j["times"].is_array()) {
      throw ConfigError(path + "/times", "expected an array of numbers");
    }
    if (!j.contains("values") || !j["values"].is_array()) {
      throw ConfigError(path + "/values", "expected an array of 3-vectors");
    }
    std::vector<double> times;
    std::vector<Vec3> values;
    for (std::size_t i = 0; i < j["times"].size(); ++i) {
      times.push_back(read_number(j["times"][i], path + "/times/" + std::to_string(i)));
    }
    for (std::size_t i = 0; i < j["values"].size(); ++i) {
      values.push_back(read_vec3(j["values"][i], path + "/values/" + std::to_string(i)));
    }
    try {
      return TorqueSchedule::tabulated(std::move(times), std::move(values));
    } catch (const InvalidArgument& e) {
      throw ConfigError(path, e.what());
    }
  }
  throw ConfigError(path + "/kind", "unknown torque kind '" + kind + "'");
}

inline SolverOptions read_solver(const json& j) {
  const std::string path = "/solver";
  require_object(j, path);
  reject_unknown_keys(j, path, {"alpha", "tol", "max_iters", "w0", "jacobian"});
  SolverOptions opts;
  if (j.contains("alpha")) opts.alpha = read_number(j["alpha"], path + "/alpha");
  if (j.contains("tol")) opts.tol = read_number(j["tol"], path + "/tol");
  if (j.contains("max_iters")) {
    if (!j["max_iters"].is_number_integer()) {
      throw ConfigError(path + "/max_iters", "expected an integer");
    }
    opts.max_iters = j["max_iters"].get<int>();
  }
  if (j.contains("w0")) {
    const json& w0 = j["w0"];
    if (w0 == "zero") {
      opts.w0_strategy = InitialGuess::zero;
    } else if (w0 == "momentum_guess") {
      opts.w0_strategy = InitialGuess::momentum_guess;
    } else {
      throw ConfigError(path + "/w0", "expected 'zero' or 'momentum_guess'");
    }
  }
  if (j.contains("jacobian")) {
    const json& jac = j["jacobian"];
    if (jac == "exact") {
      opts.jacobian = NewtonJacobian::exact;
    } else if (jac == "first_order") {
      opts.jacobian = NewtonJacobian::first_order;
    } else {
      throw ConfigError(path + "/jacobian", "expected 'exact' or 'first_order'");
    }
  }
  if (!(opts.alpha > 0.0 && opts.alpha <= 1.0)) {
    throw ConfigError(path + "/alpha", "alpha must be in (0, 1]");
  }
  if (!(opts.tol > 0.0)) throw ConfigError(path + "/tol", "tol must be positive");
  if (opts.max_iters < 1) throw ConfigError(path + "/max_iters", "max_iters must be at least 1");
  return opts;
}

inline std::size_t read_count(const json& j, const std::string& path, const char* what) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  const long long v = j.get<long long>();
  if (v < 1) throw ConfigError(path, std::string(what) + " must be at least 1");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

/// Parses and validates a JSON simulation config. Throws ConfigError.
///
/// Keys: inertia (3 principal moments or 3x3), attitude0 (3x3 or
/// {axis, angle}; default identity), exactly one of omega0 / pi0, h, steps,
/// torque ({kind: zero|constant|sinusoidal|tabulated, ...}; default zero),
/// solver ({alpha, tol, max_iters, w0, jacobian}), output ({decimation}).
inline SimConfig parse_config(const std::string& text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  detail::require_object(doc, "");
  detail::reject_unknown_keys(doc, "",
                              {"inertia", "attitude0", "omega0", "pi0", "h", "steps", "torque",
                               "solver", "output"});

  SimConfig cfg;
  if (!doc.contains("inertia")) throw ConfigError("/inertia", "missing");
  cfg.inertia = detail::read_inertia(doc["inertia"]);

  if (doc.contains("attitude0")) cfg.attitude0 = detail::read_attitude(doc["attitude0"]);

  const bool has_omega = doc.contains("omega0");
  const bool has_pi = doc.contains("pi0");
  if (has_omega == has_pi) {
    throw ConfigError("/omega0", "exactly one of 'omega0' or 'pi0' is required");
  }
  cfg.pi0 = has_omega ? momentum_from_velocity(cfg.inertia.j(),
                                               detail::read_vec3(doc["omega0"], "/omega0"))
                      : detail::read_vec3(doc["pi0"], "/pi0");

  if (!doc.contains("h")) throw ConfigError("/h", "missing");
  cfg.h = detail::read_number(doc["h"], "/h");
  if (!(cfg.h > 0.0)) throw ConfigError("/h", "h must be positive");

  if (!doc.contains("steps")) throw ConfigError("/steps", "missing");
  cfg.steps = detail::read_count(doc["steps"], "/steps", "steps");

  if (doc.contains("torque")) cfg.torque = detail::read_torque(doc["torque"]);
  if (!cfg.torque.covers(0.0, static_cast<double>(cfg.steps) * cfg.h)) {
    throw ConfigError("/torque/times", "tabulated torque must cover [0, steps * h]");
  }

  if (doc.contains("solver")) cfg.solver = detail::read_solver(doc["solver"]);

  if (doc.contains("output")) {
    const json& out = detail::require_object(doc["output"], "/output");
    detail::reject_unknown_keys(out, "/output", {"decimation"});
    if (out.contains("decimation")) {
      cfg.decimation = detail::read_count(out["decimation"], "/output/decimation", "decimation");
    }
  }
  return cfg;
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace lgvi
