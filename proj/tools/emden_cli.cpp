#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emden/acceptance.hpp"
#include "emden/classifier.hpp"
#include "emden/integrator.hpp"
#include "emden/run_config.hpp"
#include "emden/serialize.hpp"
#include "emden/shooting.hpp"
#include "emden/sweep.hpp"
#include "emden/trajectory_io.hpp"

using namespace emden;

namespace {

// Usage problems that CLI11 cannot see (bad parameter combinations, config errors).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParamFlags {
  std::optional<int> n;
  std::optional<double> p, q, l1, l2, k1, k2;

  void attach(CLI::App* cmd) {
    cmd->add_option("--n", n, "dimension");
    cmd->add_option("--p", p, "exponent of the first term");
    cmd->add_option("--q", q, "exponent of the second term");
    cmd->add_option("--l1", l1, "weight exponent of the first term");
    cmd->add_option("--l2", l2, "weight exponent of the second term");
    cmd->add_option("--k1", k1, "coefficient of the first term (0 or 1)");
    cmd->add_option("--k2", k2, "coefficient of the second term (0 or 1)");
  }

  void apply(ProblemParams& params) const {
    if (n) params.n = *n;
    if (p) params.p = *p;
    if (q) params.q = *q;
    if (l1) params.l1 = *l1;
    if (l2) params.l2 = *l2;
    if (k1) params.k1 = *k1;
    if (k2) params.k2 = *k2;
  }
};

struct Common {
  std::string config_path;
  ParamFlags flags;

  void attach(CLI::App* cmd, bool config_required = false) {
    auto* opt = cmd->add_option("--config", config_path, "run configuration file")
                    ->check(CLI::ExistingFile);
    if (config_required) {
      opt->required();
    }
    flags.attach(cmd);
  }

  RunConfig load() const {
    RunConfig cfg;
    try {
      if (!config_path.empty()) {
        cfg = load_run_config(config_path);
      }
      flags.apply(cfg.params);
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

void print_json(const json& j) {
  std::cout << j.dump(2) << '\n';
}

int run_solve(const RunConfig& cfg, const std::string& output) {
  const DerivedConstants dc = derive_constants(cfg.params);
  Trajectory traj;
  if (cfg.solve.mode == "regular") {
    const Frame frame = seed_frame(End::Infinity, dc);
    const State start = regular_series_start(cfg.solve.a, cfg.solve.r0, cfg.params, frame);
    traj = integrate(start, frame, cfg.solve.t_end.value_or(14.0), cfg.params, cfg.integrator);
  } else {
    const double sign = cfg.solve.end == End::Infinity ? 1.0 : -1.0;
    const double t0 = cfg.solve.t_start.value_or(14.0 * sign);
    const State start = singular_seed_start(cfg.solve.end, cfg.solve.eps, t0, cfg.params, dc);
    traj = integrate(start, seed_frame(cfg.solve.end, dc), cfg.solve.t_end.value_or(-14.0 * sign),
                     cfg.params, cfg.integrator);
  }
  if (output.empty() || output == "-") {
    write_trajectory_csv(std::cout, traj);
  } else {
    write_trajectory_file(output, traj);
  }
  std::cerr << "termination: " << to_string(traj.termination.cause) << " at t=" << traj.termination.t
            << " (" << traj.size() << " samples)\n";
  return 0;
}

int run_verify(const std::vector<std::string>& perturb, const std::vector<int>& only) {
  acceptance::Tolerances tol = acceptance::default_tolerances();
  for (const std::string& key : perturb) {
    try {
      tol = acceptance::perturbed(tol, key);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  std::vector<int> ids = only.empty() ? acceptance::criterion_ids() : only;
  for (int id : ids) {
    try {
      static_cast<void>(acceptance::criterion_title(id));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  bool ok = true;
  for (int id : ids) {
    const acceptance::CriterionResult r = acceptance::run_criterion(id, tol);
    std::cout << acceptance::format_result(r) << std::endl;
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the double-power Emden-Fowler radial equation"};
  app.require_subcommand(1);

  auto* exponents = app.add_subcommand("exponents", "derived constants and regime flags as JSON");
  ParamFlags exp_flags;
  exp_flags.attach(exponents);
  double eps_crit = kDefaultEpsCrit;
  exponents->add_option("--eps-crit", eps_crit, "tolerance for critical exponents");

  auto* solve = app.add_subcommand("solve", "integrate one trajectory and write CSV");
  Common solve_opts;
  solve_opts.attach(solve, true);
  std::string solve_out;
  solve->add_option("-o,--output", solve_out, "CSV path (default standard output)");

  auto* classify = app.add_subcommand("classify", "classify one end of a trajectory CSV");
  Common classify_opts;
  classify_opts.attach(classify);
  std::string classify_in;
  std::string classify_end_name = "infinity";
  classify->add_option("input", classify_in, "trajectory CSV")->required()->check(CLI::ExistingFile);
  classify->add_option("--end", classify_end_name, "origin or infinity")
      ->check(CLI::IsMember({"origin", "infinity"}));

  auto* shoot_cmd = app.add_subcommand("shoot", "regular shot u(0)=a classified at infinity");
  Common shoot_opts;
  shoot_opts.attach(shoot_cmd);
  double shoot_a = 0.0;
  std::optional<double> shoot_t_far;
  std::string shoot_csv;
  shoot_cmd->add_option("--a", shoot_a, "initial height")->required();
  shoot_cmd->add_option("--t-far", shoot_t_far, "end of the integration in t = ln r");
  shoot_cmd->add_option("--trajectory", shoot_csv, "also write the trajectory CSV here");

  auto* scan = app.add_subcommand("scan", "threshold scan over a log-spaced a grid");
  Common scan_opts;
  scan_opts.attach(scan);
  std::optional<int> scan_points;
  std::optional<double> scan_lo, scan_hi;
  unsigned scan_jobs = default_jobs();
  scan->add_option("--points", scan_points, "grid size");
  scan->add_option("--a-min", scan_lo, "smallest a");
  scan->add_option("--a-max", scan_hi, "largest a");
  scan->add_option("-j,--jobs", scan_jobs, "worker threads (default EMDEN_JOBS or 1)");

  auto* connect = app.add_subcommand("connect", "singular connecting orbit seeded at one end");
  Common connect_opts;
  connect_opts.attach(connect);
  std::optional<std::string> connect_from;
  std::optional<double> connect_eps;
  std::string connect_csv;
  connect->add_option("--from", connect_from, "origin or infinity")
      ->check(CLI::IsMember({"origin", "infinity"}));
  connect->add_option("--eps", connect_eps, "seed offset from lambda");
  connect->add_option("--trajectory", connect_csv, "also write the trajectory CSV here");

  auto* sweep = app.add_subcommand("sweep", "parameter grid run with manifest");
  Common sweep_opts;
  sweep_opts.attach(sweep, true);
  unsigned sweep_jobs = default_jobs();
  std::string sweep_out;
  bool sweep_force = false;
  sweep->add_option("-j,--jobs", sweep_jobs, "worker threads (default EMDEN_JOBS or 1)");
  sweep->add_option("--out", sweep_out, "output root (default [output] dir)");
  sweep->add_flag("--force", sweep_force, "recompute even if the manifest exists");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  std::string suite = "acceptance";
  std::vector<std::string> perturb;
  std::vector<int> criteria;
  verify->add_option("--suite", suite, "suite name")->check(CLI::IsMember({"acceptance"}));
  verify->add_option("--perturb", perturb, "tolerance key to move out of reach (repeatable)");
  verify->add_option("--criterion", criteria, "run only these criteria (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*exponents) {
      ProblemParams params{5, 1.9, 1.95, 0.0, -0.5};
      exp_flags.apply(params);
      try {
        print_json(exponents_json(params, eps_crit));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      return 0;
    }
    if (*solve) {
      return run_solve(solve_opts.load(), solve_out);
    }
    if (*classify) {
      const RunConfig cfg = classify_opts.load();
      const DerivedConstants dc = derive_constants(cfg.params);
      Trajectory traj;
      try {
        traj = read_trajectory_file(classify_in, cfg.params, cfg.integrator);
      } catch (const CsvParseError& e) {
        throw UsageError(classify_in + ": " + e.what());
      }
      print_json(classify_end(traj, dc, end_from_string(classify_end_name), cfg.classifier));
      return 0;
    }
    if (*shoot_cmd) {
      const RunConfig cfg = shoot_opts.load();
      ShootingConfig sc = cfg.shooting_config();
      if (shoot_t_far) {
        sc.t_far = *shoot_t_far;
      }
      if (!(shoot_a > 0.0)) {
        throw UsageError("--a must be positive");
      }
      const ShotResult shot = shoot(shoot_a, cfg.params, sc);
      if (!shoot_csv.empty()) {
        write_trajectory_file(shoot_csv, shot.trajectory);
      }
      print_json(shot);
      return shot.error.empty() ? 0 : 1;
    }
    if (*scan) {
      RunConfig cfg = scan_opts.load();
      if (scan_points) cfg.shoot.points = *scan_points;
      if (scan_lo) cfg.shoot.a_min = *scan_lo;
      if (scan_hi) cfg.shoot.a_max = *scan_hi;
      std::vector<double> grid;
      try {
        cfg.validate();
        grid = log_grid(cfg.shoot.a_min, cfg.shoot.a_max, static_cast<std::size_t>(cfg.shoot.points));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      if (grid.size() < 16) {
        throw UsageError("scan needs at least 16 grid points");
      }
      print_json(scan_thresholds(grid, cfg.params, cfg.shooting_config(std::max(1u, scan_jobs))));
      return 0;
    }
    if (*connect) {
      RunConfig cfg = connect_opts.load();
      if (connect_from) cfg.connect.from = end_from_string(*connect_from);
      if (connect_eps) cfg.connect.eps = *connect_eps;
      const DerivedConstants dc = derive_constants(cfg.params);
      ConnectingOrbit orbit;
      try {
        orbit = connecting_orbit(cfg.params, dc, cfg.connect.from, cfg.connect.eps,
                                 cfg.connect_config(cfg.connect.from));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      if (!connect_csv.empty()) {
        write_trajectory_file(connect_csv, orbit.trajectory);
      }
      print_json(orbit);
      return 0;
    }
    if (*sweep) {
      const RunConfig cfg = sweep_opts.load();
      const SweepResult result = run_sweep(cfg, std::max(1u, sweep_jobs),
                                           sweep_out.empty() ? cfg.output_dir : sweep_out, sweep_force);
      std::cout << (result.dir / "manifest.json").string() << '\n';
      std::cerr << result.manifest.at("cells").size() << " cells, " << result.failed_cells
                << " failed" << (result.reused ? " (existing run reused)" : "") << '\n';
      return 0;
    }
    if (*verify) {
      return run_verify(perturb, criteria);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
