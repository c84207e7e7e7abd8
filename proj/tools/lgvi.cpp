#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lgvi/app.hpp"

namespace {

int load_and_run(const std::string& config_path,
                 const std::function<int(const lgvi::SimConfig&)>& run) {
  lgvi::SimConfig cfg;
  const int rc = lgvi::app::detail::guarded(std::cerr, [&] {
    cfg = lgvi::load_config(config_path);
    return 0;
  });
  return rc != 0 ? rc : run(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigid-body attitude simulator built on a Lie group variational integrator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  bool project = false;

  auto* simulate = app.add_subcommand("simulate", "Propagate a config and write a trajectory CSV");
  simulate->add_option("--config", config_path, "JSON simulation config")->required();
  simulate->add_option("--out", out_path, "Trajectory CSV path")->required();

  auto* compare = app.add_subcommand("compare", "Run the variational integrator against RK4");
  compare->add_option("--config", config_path, "JSON simulation config")->required();
  compare->add_option("--out", out_path, "Joined diagnostics CSV path")->required();
  compare->add_flag("--project", project, "Also run RK4 with per-step polar projection");

  std::string inertia_spec;
  std::string pi_spec;
  double h = 0.0;
  lgvi::SolverOptions opts;
  std::string w0 = "momentum_guess";
  std::string jacobian = "exact";
  auto* solve = app.add_subcommand("solve", "Solve the discrete momentum equation once");
  solve->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  solve->add_option("--inertia", inertia_spec, "j1,j2,j3 or nine row-major entries")->required();
  solve->add_option("--h", h, "Time step (s)")->required();
  solve->add_option("--pi", pi_spec, "Body angular momentum x,y,z")->required();
  solve->add_option("--alpha", opts.alpha, "Newton step scale in (0, 1]");
  solve->add_option("--tol", opts.tol, "Residual tolerance on ||f(w)||_2");
  solve->add_option("--max-iters", opts.max_iters, "Newton iteration cap");
  solve->add_option("--w0", w0, "Initial guess")
      ->check(CLI::IsMember({"zero", "momentum_guess"}));
  solve->add_option("--jacobian", jacobian, "Newton derivative")
      ->check(CLI::IsMember({"exact", "first_order"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    lgvi::app::detail::report_error(std::cerr, "usage", e.what());
    return lgvi::app::kConfigError;
  }

  if (*simulate) {
    return load_and_run(config_path, [&](const lgvi::SimConfig& cfg) {
      return lgvi::app::run_simulate(cfg, out_path, std::cout, std::cerr);
    });
  }
  if (*compare) {
    return load_and_run(config_path, [&](const lgvi::SimConfig& cfg) {
      return lgvi::app::run_compare(cfg, out_path, project, std::cout, std::cerr);
    });
  }

  lgvi::InertiaPair inertia = lgvi::InertiaPair::principal(1.0, 1.0, 1.0);
  lgvi::Vec3 pi = lgvi::Vec3::Zero();
  const int rc = lgvi::app::detail::guarded(std::cerr, [&] {
    inertia = lgvi::app::parse_inertia_spec(inertia_spec);
    pi = lgvi::app::parse_vec3_spec(pi_spec, "--pi");
    if (!(h > 0.0)) throw lgvi::ConfigError("--h", "h must be positive");
    opts.w0_strategy =
        w0 == "zero" ? lgvi::InitialGuess::zero : lgvi::InitialGuess::momentum_guess;
    opts.jacobian =
        jacobian == "exact" ? lgvi::NewtonJacobian::exact : lgvi::NewtonJacobian::first_order;
    try {
      opts.validate();
    } catch (const lgvi::InvalidArgument& e) {
      throw lgvi::ConfigError("solver", e.what());
    }
    return 0;
  });
  if (rc != 0) return rc;
  return lgvi::app::run_solve(inertia, h, pi, opts, std::cout, std::cerr);
}
