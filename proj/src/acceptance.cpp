#include "emden/acceptance.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "emden/classifier.hpp"
#include "emden/energy.hpp"
#include "emden/integrator.hpp"
#include "emden/run_config.hpp"
#include "emden/shooting.hpp"
#include "emden/sweep.hpp"
#include "emden/trajectory_io.hpp"

namespace emden::acceptance {

namespace {

namespace fs = std::filesystem;

constexpr double kInf = std::numeric_limits<double>::infinity();

const ProblemParams kConfigA{5, 1.9, 1.95, 0.0, -0.5};
const ProblemParams kConfigB{5, 1.9, 2.0, 0.0, -0.5};

class Recorder {
 public:
  Recorder(const Tolerances& tol, CriterionResult& out) : tol_(tol), out_(out) {}

  void check(const std::string& key, double value) {
    const auto it = tol_.find(key);
    if (it == tol_.end()) {
      throw std::logic_error("acceptance: no tolerance registered for " + key);
    }
    out_.checks.push_back({key, value, it->second.cmp, it->second.value});
  }

  void flag(const std::string& key, bool ok) { check(key, ok ? 1.0 : 0.0); }

 private:
  const Tolerances& tol_;
  CriterionResult& out_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ProblemParams bubble_params() {
  return ProblemParams{5, 7.0 / 3.0, 3.0, 0.0, -1.0, 1.0, 0.0};
}

double bubble_height() {
  return std::pow(15.0, 0.75);
}

ShotResult bubble_shot(double a) {
  ShootingConfig cfg;
  cfg.t_far = std::log(100.0);
  cfg.classifier.window = Window{std::log(50.0), std::log(100.0)};
  return shoot(a, bubble_params(), cfg);
}

ConnectingOrbit config_a_orbit() {
  const DerivedConstants dc = derive_constants(kConfigA);
  return connecting_orbit(kConfigA, dc, End::Infinity, 1e-4, default_connect_config(End::Infinity));
}

Trajectory exact_singular_run() {
  const ProblemParams params{5, 3.0, 3.0, 0.0, -1.0, 1.0, 0.0};
  const double c = std::sqrt(2.0);
  const State start = to_frame(0.0, c, -c, 0.0);
  return integrate(start, Frame{0.0}, std::log(1000.0), params);
}

void criterion1(Recorder& rec) {
  const auto start = std::chrono::steady_clock::now();
  const Trajectory traj = exact_singular_run();
  const double elapsed = seconds_since(start);
  double worst = 0.0;
  for (const State& s : traj.samples) {
    const double exact = std::sqrt(2.0) * std::exp(-s.t);
    worst = std::max(worst, std::abs(raw_u(s, traj.frame) - exact) / exact);
  }
  rec.flag("c1.reached_end", traj.termination.cause == Termination::ReachedSpanEnd &&
                                 traj.back().t == std::log(1000.0));
  rec.check("c1.max_rel_error", worst);
  rec.check("c1.runtime_s", elapsed);
}

void criterion2(Recorder& rec) {
  const ShotResult shot = bubble_shot(bubble_height());
  const AubinTalentiProfile bubble = aubin_talenti_profile(5);
  double worst = 0.0;
  for (const State& s : shot.trajectory.samples) {
    const double r = std::exp(s.t);
    if (r < 0.01 * (1 - 1e-12)) {
      continue;
    }
    const double exact = bubble(r);
    worst = std::max(worst, std::abs(raw_u(s, shot.trajectory.frame) - exact) / exact);
  }
  rec.flag("c2.reached_end", shot.error.empty() &&
                                 shot.trajectory.termination.cause == Termination::ReachedSpanEnd);
  rec.check("c2.max_rel_error", worst);
  rec.flag("c2.tail_kind", shot.report.kind == Kind::FastDecayRegular);
  rec.check("c2.c1_rel_error",
            std::abs(shot.report.fitted_constant - bubble.tail_constant()) / bubble.tail_constant());
}

void criterion3(Recorder& rec) {
  const DerivedConstants dc = derive_constants(kConfigA);
  const auto start = std::chrono::steady_clock::now();
  const ConnectingOrbit orbit = config_a_orbit();
  const double elapsed = seconds_since(start);
  rec.flag("c3.kinds", orbit.near_report.kind == Kind::SlowDecaySingular &&
                           orbit.far_report.kind == Kind::SlowDecaySingular);
  rec.check("c3.origin_rel_error",
            std::abs(orbit.far_report.fitted_constant - *dc.lambda2) / *dc.lambda2);
  rec.check("c3.infinity_rel_error",
            std::abs(orbit.near_report.fitted_constant - *dc.lambda1) / *dc.lambda1);
  rec.check("c3.runtime_s", elapsed);
}

void criterion4(Recorder& rec) {
  const DerivedConstants dc = derive_constants(kConfigA);
  const ConnectingOrbit orbit = config_a_orbit();
  const double rate = fit_exponential_rate(orbit.trajectory, *dc.lambda1, Window{6.0, 10.0});
  rec.check("c4.rate_offset", std::abs(rate - dc.delta));
}

void criterion5(Recorder& rec) {
  const DerivedConstants dc = derive_constants(kConfigB);
  const double lambda2 = *dc.lambda2;
  const State seed{-2.0, lambda2 + 0.5, 0.0};
  const Trajectory traj = integrate(seed, Frame{dc.alpha2}, -30.0, kConfigB);
  const ClassificationReport report = classify_end(traj, dc, End::Origin);
  const OscillationEnvelope env = oscillation_envelope(traj, dc, End::Origin);
  rec.flag("c5.kind", report.kind == Kind::Oscillatory);
  rec.check("c5.extrema", static_cast<double>(env.minima_values.size() + env.maxima_values.size()));
  rec.check("c5.lambda_minus_mu1", lambda2 - env.mu1);
  rec.check("c5.mu2_minus_lambda", env.mu2 - lambda2);
  rec.check("c5.b_mismatch", std::abs(env.b_mu1 - env.b_mu2) / std::abs(env.b_mu1));
  rec.check("c5.b_mu1", env.b_mu1);
}

void criterion6(Recorder& rec) {
  const DerivedConstants dc = derive_constants(kConfigA);
  const ConnectingOrbit orbit = config_a_orbit();
  const double T = orbit.seed.t;

  const BoundReport tail = apriori_bound_report(orbit.trajectory, dc, Window{0.75 * T, T});
  rec.check("c6.tail_sup_vdot", tail.sup_rv1prime);

  const std::vector<double> starts{8.0, 9.0, 10.0, 11.0, 12.0};
  const std::vector<double> integrals =
      windowed_vdot_sq_integrals(orbit.trajectory, dc, End::Infinity, starts, 2.0);
  double worst_ratio = 0.0;
  for (std::size_t i = 1; i < integrals.size(); ++i) {
    worst_ratio = std::max(worst_ratio, integrals[i] / integrals[i - 1]);
  }
  rec.check("c6.tail_integral_ratio", worst_ratio);

  double flux_worst = 0.0;
  for (double a : log_grid(1e-2, 1e2, 8)) {
    const ShotResult shot = shoot(a, kConfigA);
    if (!shot.error.empty()) {
      throw std::runtime_error("regular shot failed: " + shot.error);
    }
    flux_worst = std::max(flux_worst, flux_nonincreasing(shot.trajectory, kInf).worst_violation);
  }
  rec.check("c6.flux_violation", flux_worst);

  double rn2u_worst = 0.0;
  std::size_t fast_runs = 0;
  for (double scale : {1.0, 2.0, 4.0}) {
    const ShotResult shot = bubble_shot(scale * bubble_height());
    if (shot.report.kind != Kind::FastDecayRegular) {
      continue;
    }
    ++fast_runs;
    rn2u_worst = std::max(
        rn2u_worst, rn2u_nondecreasing(shot.trajectory, shot.report.window, kInf).worst_violation);
  }
  rec.check("c6.fast_decay_runs", static_cast<double>(fast_runs));
  rec.check("c6.rn2u_violation", rn2u_worst);
}

ProblemParams random_admissible(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(3, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ProblemParams p;
  p.n = dim(rng);
  p.l1 = -1.5 * unit(rng);
  p.l2 = -1.95 + (p.l1 - 0.05 + 1.95) * unit(rng);
  p.p = 1.2 + 1.8 * unit(rng);
  p.q = p.p + 0.05 + 1.45 * unit(rng);
  p.validate();
  return p;
}

void criterion7(Recorder& rec) {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> log_a(std::log(0.1), std::log(10.0));
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const ProblemParams params = random_admissible(rng);
    const double a = std::exp(log_a(rng));
    const DerivedConstants dc = derive_constants(params);
    const Frame frame{dc.alpha1};
    const State start =
        regular_series_start(a, admissible_series_radius(a, params), params, frame);
    const Trajectory traj = integrate(start, frame, 6.0, params);
    for (const Trajectory& run : {traj, reframe(traj, dc.alpha2)}) {
      const double lo = run.t_min();
      const double width = (run.t_max() - lo) / 4.0;
      worst = std::max(worst, energy_trace(run, dc).relative_residual());
      for (int w = 0; w < 4; ++w) {
        const Window sub{lo + w * width, lo + (w + 1) * width};
        worst = std::max(worst, energy_trace(run, dc, sub).relative_residual());
      }
    }
  }
  rec.check("c7.balance", worst);
}

void criterion8(Recorder& rec) {
  std::size_t outside = 0;
  std::size_t undetermined = 0;
  for (double a : log_grid(1e-2, 1e2, 50)) {
    const Kind k = shoot(a, kConfigA).report.kind;
    outside += k != Kind::CrossesZero && k != Kind::FastDecayRegular &&
               k != Kind::SlowDecaySingular;
    undetermined += k == Kind::Undetermined;
  }
  rec.check("c8.outside_set", static_cast<double>(outside));
  rec.check("c8.undetermined", static_cast<double>(undetermined));
}

void criterion9(Recorder& rec) {
  ShootingConfig cfg;
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  const ThresholdScan coarse = scan_thresholds(log_grid(1e-2, 1e2, 64), kConfigA, cfg);
  const ThresholdScan fine = scan_thresholds(log_grid(1e-2, 1e2, 128), kConfigA, cfg);
  rec.check("c9.boundaries", static_cast<double>(coarse.boundaries.size()));
  rec.check("c9.refined_change",
            std::abs(static_cast<double>(fine.boundaries.size()) -
                     static_cast<double>(coarse.boundaries.size())));
  double width = coarse.boundaries.empty() ? kInf : 0.0;
  for (const Bisection& b : coarse.boundaries) {
    width = std::max(width, b.relative_width());
  }
  rec.check("c9.bracket_width", width);
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::size_t tree_mismatches(const fs::path& a, const fs::path& b) {
  std::set<std::string> names;
  for (const fs::path& root : {a, b}) {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file()) {
        names.insert(fs::relative(entry.path(), root).generic_string());
      }
    }
  }
  std::size_t mismatches = 0;
  for (const std::string& name : names) {
    const fs::path pa = a / name;
    const fs::path pb = b / name;
    if (!fs::exists(pa) || !fs::exists(pb) || read_file(pa) != read_file(pb)) {
      ++mismatches;
    }
  }
  return mismatches;
}

std::size_t csv_round_trip_mismatches(const Trajectory& traj) {
  const std::string text = trajectory_csv(traj);
  std::istringstream is(text);
  const Trajectory back = read_trajectory_csv(is, traj.params, traj.tolerances);
  std::size_t mismatches = trajectory_csv(back) != text;
  mismatches += back.samples != traj.samples;
  mismatches += back.frame != traj.frame;
  return mismatches;
}

void criterion10(Recorder& rec) {
  std::size_t csv = csv_round_trip_mismatches(exact_singular_run());
  csv += csv_round_trip_mismatches(config_a_orbit().trajectory);
  Trajectory probe;
  probe.frame = Frame{1.0};
  probe.samples = {{0.0, 1.4142135623730951, -0.5}, {0.01, 1.4142135623730951, 0.25}};
  csv += csv_round_trip_mismatches(probe);
  rec.check("c10.csv_mismatch", static_cast<double>(csv));

  const fs::path root =
      fs::temp_directory_path() / ("emden-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  RunConfig cfg;
  cfg.params = kConfigA;
  cfg.sweep.p = {1.8, 1.85, 1.9};
  cfg.sweep.q = {1.95, 2.0, 2.05};
  std::size_t sweep_mismatch = 0;
  try {
    const SweepResult serial = run_sweep(cfg, 1, root / "jobs1");
    const SweepResult parallel = run_sweep(cfg, 8, root / "jobs8");
    sweep_mismatch = tree_mismatches(serial.dir, parallel.dir);
    sweep_mismatch += serial.manifest.at("cells").size() != 9;
    sweep_mismatch += serial.failed_cells;
  } catch (...) {
    fs::remove_all(root);
    throw;
  }
  fs::remove_all(root);
  rec.check("c10.sweep_mismatch", static_cast<double>(sweep_mismatch));

  // Every tolerance of criteria 1-9, moved out of reach, must turn its criterion red.
  const Tolerances base = default_tolerances();
  std::size_t survivors = 0;
  std::vector<CriterionResult> baseline;
  for (int id = 1; id <= 9; ++id) {
    baseline.push_back(run_criterion(id, base));
  }
  for (const auto& [key, tol] : base) {
    if (key.rfind("c10.", 0) == 0) {
      continue;
    }
    const Tolerances mutated = perturbed(base, key);
    bool flipped = false;
    for (const CriterionResult& result : baseline) {
      CriterionResult copy = result;
      for (Check& c : copy.checks) {
        if (c.key == key) {
          c.threshold = mutated.at(key).value;
          flipped = flipped || !copy.passed();
        }
      }
    }
    survivors += !flipped;
  }
  rec.check("c10.unflipped_mutations", static_cast<double>(survivors));
}

using Runner = std::function<void(Recorder&)>;

struct Entry {
  std::string title;
  Runner run;
};

const std::map<int, Entry>& registry() {
  static const std::map<int, Entry> table{
      {1, {"exact singular oracle", criterion1}},
      {2, {"bubble oracle", criterion2}},
      {3, {"connecting orbit limits", criterion3}},
      {4, {"convergence rate", criterion4}},
      {5, {"critical oscillation envelope", criterion5}},
      {6, {"a priori estimates", criterion6}},
      {7, {"energy balance", criterion7}},
      {8, {"dichotomy of regular shots", criterion8}},
      {9, {"uniqueness evidence", criterion9}},
      {10, {"engineering", criterion10}},
  };
  return table;
}

}  // namespace

Tolerances default_tolerances() {
  return {
      {"c1.reached_end", {1.0, Cmp::Equal}},
      {"c1.max_rel_error", {1e-8, Cmp::Less}},
      {"c1.runtime_s", {1.0, Cmp::Less}},
      {"c2.reached_end", {1.0, Cmp::Equal}},
      {"c2.max_rel_error", {1e-7, Cmp::Less}},
      {"c2.tail_kind", {1.0, Cmp::Equal}},
      {"c2.c1_rel_error", {1e-3, Cmp::Less}},
      {"c3.kinds", {1.0, Cmp::Equal}},
      {"c3.origin_rel_error", {5e-3, Cmp::Less}},
      {"c3.infinity_rel_error", {5e-3, Cmp::Less}},
      {"c3.runtime_s", {10.0, Cmp::Less}},
      {"c4.rate_offset", {0.1, Cmp::LessEq}},
      {"c5.kind", {1.0, Cmp::Equal}},
      {"c5.extrema", {6.0, Cmp::GreaterEq}},
      {"c5.lambda_minus_mu1", {0.0, Cmp::GreaterEq}},
      {"c5.mu2_minus_lambda", {0.0, Cmp::GreaterEq}},
      {"c5.b_mismatch", {1e-3, Cmp::Less}},
      {"c5.b_mu1", {0.0, Cmp::Less}},
      {"c6.tail_sup_vdot", {1e-3, Cmp::Less}},
      {"c6.tail_integral_ratio", {1.0, Cmp::Less}},
      {"c6.flux_violation", {1e-10, Cmp::LessEq}},
      {"c6.fast_decay_runs", {1.0, Cmp::GreaterEq}},
      {"c6.rn2u_violation", {1e-10, Cmp::LessEq}},
      {"c7.balance", {1e-6, Cmp::Less}},
      {"c8.outside_set", {0.0, Cmp::Equal}},
      {"c8.undetermined", {0.0, Cmp::Equal}},
      {"c9.boundaries", {1.0, Cmp::Equal}},
      {"c9.refined_change", {0.0, Cmp::Equal}},
      {"c9.bracket_width", {1e-12, Cmp::Less}},
      {"c10.csv_mismatch", {0.0, Cmp::Equal}},
      {"c10.sweep_mismatch", {0.0, Cmp::Equal}},
      {"c10.unflipped_mutations", {0.0, Cmp::Equal}},
  };
}

Tolerances perturbed(Tolerances tol, const std::string& key) {
  const auto it = tol.find(key);
  if (it == tol.end()) {
    throw std::invalid_argument("unknown tolerance key: " + key);
  }
  Tolerance& t = it->second;
  switch (t.cmp) {
    case Cmp::Less:
    case Cmp::LessEq:
      t.value = -kInf;
      break;
    case Cmp::GreaterEq:
      t.value = kInf;
      break;
    case Cmp::Equal:
      t.value += 1.0;
      break;
  }
  return tol;
}

bool Check::passed() const {
  switch (cmp) {
    case Cmp::Less:
      return value < threshold;
    case Cmp::LessEq:
      return value <= threshold;
    case Cmp::GreaterEq:
      return value >= threshold;
    case Cmp::Equal:
      return value == threshold;
  }
  return false;
}

bool CriterionResult::passed() const {
  if (!error.empty() || checks.empty()) {
    return false;
  }
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
}

const std::vector<int>& criterion_ids() {
  static const std::vector<int> ids = [] {
    std::vector<int> out;
    for (const auto& [id, entry] : registry()) {
      out.push_back(id);
    }
    return out;
  }();
  return ids;
}

std::string criterion_title(int id) {
  const auto it = registry().find(id);
  if (it == registry().end()) {
    throw std::invalid_argument("no acceptance criterion " + std::to_string(id));
  }
  return it->second.title;
}

CriterionResult run_criterion(int id, const Tolerances& tol) {
  CriterionResult result;
  result.id = id;
  result.title = criterion_title(id);
  Recorder rec(tol, result);
  const auto start = std::chrono::steady_clock::now();
  try {
    registry().at(id).run(rec);
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  result.seconds = seconds_since(start);
  return result;
}

std::vector<CriterionResult> run_suite(const std::vector<int>& ids, const Tolerances& tol) {
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, tol));
  }
  return out;
}

std::string to_string(Cmp cmp) {
  switch (cmp) {
    case Cmp::Less:
      return "<";
    case Cmp::LessEq:
      return "<=";
    case Cmp::GreaterEq:
      return ">=";
    case Cmp::Equal:
      return "==";
  }
  return "?";
}

std::string format_result(const CriterionResult& result) {
  std::ostringstream os;
  os << (result.passed() ? "PASS" : "FAIL") << " c" << result.id << ' ' << result.title << ':';
  char buf[160];
  for (const Check& c : result.checks) {
    std::snprintf(buf, sizeof buf, " %s=%.6g (%s %.6g)%s", c.key.c_str(), c.value,
                  to_string(c.cmp).c_str(), c.threshold, c.passed() ? "" : " !");
    os << buf;
  }
  if (!result.error.empty()) {
    os << " error: " << result.error;
  }
  std::snprintf(buf, sizeof buf, " [%.2fs]", result.seconds);
  os << buf;
  return os.str();
}

}  // namespace emden::acceptance
