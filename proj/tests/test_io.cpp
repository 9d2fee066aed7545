#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "emden/integrator.hpp"
#include "emden/run_config.hpp"
#include "emden/serialize.hpp"
#include "emden/trajectory_io.hpp"

using namespace emden;

namespace {
const ProblemParams kA{5, 1.9, 1.95, 0.0, -0.5};

RunConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_run_config(is);
}

std::size_t error_line(const std::string& text) {
  try {
    static_cast<void>(parse(text));
  } catch (const ConfigError& e) {
    return e.line();
  }
  return 0;
}

std::size_t csv_error_line(const std::string& text) {
  std::istringstream is(text);
  try {
    static_cast<void>(read_trajectory_csv(is, kA));
  } catch (const CsvParseError& e) {
    return e.line();
  }
  return 0;
}
}  // namespace

TEST_CASE("doubles print with 17 significant digits") {
  CHECK(format_double(std::sqrt(2.0)) == "1.4142135623730951");
  CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("trajectory csv round trip is bit exact") {
  const Trajectory traj =
      integrate(regular_series_start(0.7, 1e-4, kA), Frame{2.0 / 0.9}, 5.0, kA);
  const std::string text = trajectory_csv(traj);
  CHECK(text.rfind(std::string(kTrajectoryCsvHeader) + "\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  std::istringstream is(text);
  const Trajectory back = read_trajectory_csv(is, kA);
  REQUIRE(back.size() == traj.size());
  CHECK(back.frame.alpha == traj.frame.alpha);
  CHECK(back.termination.cause == traj.termination.cause);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(back.samples[i].t == traj.samples[i].t);
    CHECK(back.samples[i].v == traj.samples[i].v);
    CHECK(back.samples[i].vdot == traj.samples[i].vdot);
  }
  CHECK(trajectory_csv(back) == text);
}

TEST_CASE("csv errors carry the line number") {
  const std::string header = std::string(kTrajectoryCsvHeader) + "\n";
  const std::string row = "0,1,1,0,1,0,0\n";
  CHECK(csv_error_line("t,r,u\n") == 1);
  CHECK(csv_error_line(header + row + "0.01,1,1,0,1\n") == 3);
  CHECK(csv_error_line(header + row + "0.01,1,x,0,1,0,0\n") == 3);
  CHECK(csv_error_line(header + row + "0.01,1.01,1,0,1,0,0.5\n") == 3);
  CHECK(csv_error_line(header.substr(0, header.size() - 1) + "\r\n" + row) == 1);
  CHECK(csv_error_line(header) > 0);
}

TEST_CASE("json serialisation") {
  const json e = exponents_json(kA);
  CHECK(e["params"]["n"] == 5);
  CHECK(e["constants"]["delta"].get<double>() == doctest::Approx(-0.6111111111111112));
  CHECK(e["constants"]["lambda1"].get<double>() == doctest::Approx(1.83674047539520318879));
  CHECK(e["regime"].contains("criticality_margins"));

  const ProblemParams back = e["params"].get<ProblemParams>();
  CHECK(back == kA);

  ClassificationReport rep;
  rep.fitted_constant = std::numeric_limits<double>::quiet_NaN();
  const json r = rep;
  CHECK(r["fitted_constant"].is_null());
  CHECK(r["rate"].is_null());
  CHECK(r["kind"] == "Undetermined");

  const ProblemParams undefined{3, 2.0, 3.0, 0.0, -0.5};
  CHECK(exponents_json(undefined)["constants"]["lambda1"].is_null());
}

TEST_CASE("config parsing") {
  const RunConfig cfg = parse(
      "# comment\n"
      "[params]\n"
      "n = 6\n"
      "; whole-line comment\n"
      "p = 1.5\n"
      "[integrator]\n"
      "rtol = 1e-9\n"
      "[sweep]\n"
      "p = 1.8, 1.9\n"
      "n = 5,6\n"
      "[connect]\n"
      "from = origin\n");
  CHECK(cfg.params.n == 6);
  CHECK(cfg.params.p == 1.5);
  CHECK(cfg.params.q == 1.95);
  CHECK(cfg.integrator.rtol == 1e-9);
  CHECK(cfg.sweep.p == std::vector<double>{1.8, 1.9});
  CHECK(cfg.sweep.n == std::vector<int>{5, 6});
  CHECK(cfg.connect.from == End::Origin);
}

TEST_CASE("config errors") {
  CHECK(error_line("[params]\nbogus = 1\n") == 2);
  CHECK(error_line("[nowhere]\n") == 1);
  CHECK(error_line("n = 5\n") == 1);
  CHECK(error_line("[params]\nn = 5\nn = 6\n") == 3);
  CHECK(error_line("[params]\np = abc\n") == 2);
  CHECK(error_line("[params]\np\n") == 2);
  CHECK(error_line("[solve]\nmode = sideways\n") == 2);
  CHECK(error_line("[connect]\nfrom = middle\n") == 2);
  CHECK_THROWS_AS(static_cast<void>(parse("[params]\np = 0.5\n")), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(load_run_config("/nonexistent/run.ini")), std::exception);
}

TEST_CASE("config hash tracks semantic fields only") {
  const RunConfig base;
  RunConfig out = base;
  out.output_dir = "elsewhere";
  CHECK(out.hash() == base.hash());
  CHECK(out.run_id() == base.run_id());

  RunConfig changed = base;
  changed.params.p = 1.91;
  CHECK(changed.hash() != base.hash());
  changed = base;
  changed.integrator.atol = 1e-13;
  CHECK(changed.hash() != base.hash());
  changed = base;
  changed.sweep.q = {2.0};
  CHECK(changed.hash() != base.hash());

  CHECK(base.run_id().size() == 12);
  CHECK(base.hash_hex().rfind(base.run_id(), 0) == 0);
  // same text, same hash
  CHECK(parse("[params]\np = 1.9\n").hash() == base.hash());
}

TEST_CASE("energy csv") {
  EnergyTrace e;
  e.t = {0.0, 0.5};
  e.E = {1.0, 0.9};
  e.forcing_work = {0.0, 0.05};
  e.damping_work = {0.0, 0.05};
  std::ostringstream os;
  write_energy_csv(os, e);
  CHECK(os.str() == std::string(kEnergyCsvHeader) + "\n0,1,0,0\n0.5,0.90000000000000002,0.050000000000000003,0.050000000000000003\n");
}
