#include "emden/shooting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "emden/integrator.hpp"

namespace emden {

ShotResult shoot(double a, const ProblemParams& params, const ShootingConfig& cfg) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("shoot: a must be positive and finite");
  }
  const DerivedConstants dc = derive_constants(params);
  const Frame frame = seed_frame(End::Infinity, dc);
  const double r0 = admissible_series_radius(a, params, cfg.r0_max);

  ShotResult shot;
  shot.a = a;
  shot.report.end = End::Infinity;
  try {
    const State start = regular_series_start(a, r0, params, frame);
    if (!(cfg.t_far > start.t)) {
      throw std::invalid_argument("shoot: t_far must lie beyond the series radius");
    }
    shot.trajectory = integrate(start, frame, cfg.t_far, params, cfg.integrator);
    shot.report = classify_end(shot.trajectory, dc, End::Infinity, cfg.classifier);
  } catch (const std::runtime_error& e) {
    shot.error = e.what();
    shot.report.kind = Kind::Undetermined;
    shot.report.note = e.what();
  }
  return shot;
}

Bisection bisect_boundary(double a_lo, double a_hi, const ProblemParams& params,
                          const ShootingConfig& cfg, int max_iter) {
  if (!(a_lo < a_hi)) {
    throw BracketInvalid("bisect_boundary: need a_lo < a_hi");
  }
  Bisection b;
  b.a_lo = a_lo;
  b.a_hi = a_hi;
  b.kind_lo = shoot(a_lo, params, cfg).report.kind;
  b.kind_hi = shoot(a_hi, params, cfg).report.kind;
  if (b.kind_lo == b.kind_hi) {
    throw BracketInvalid("bisect_boundary: both ends classify as " + to_string(b.kind_lo));
  }
  while (b.iterations < max_iter) {
    const double mid = 0.5 * (b.a_lo + b.a_hi);
    if ((b.a_hi - b.a_lo) <= kBisectionRelativeWidth * mid || mid <= b.a_lo || mid >= b.a_hi) {
      break;
    }
    const Kind k = shoot(mid, params, cfg).report.kind;
    ++b.iterations;
    if (k == b.kind_lo) {
      b.a_lo = mid;
    } else {
      b.a_hi = mid;
      b.kind_hi = k;
    }
  }
  b.a_star = 0.5 * (b.a_lo + b.a_hi);
  b.threshold_report = shoot(b.a_star, params, cfg).report;
  return b;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw std::invalid_argument("log_grid: need 0 < lo < hi and at least two points");
  }
  std::vector<double> grid(count);
  const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::exp(std::log(lo) + step * static_cast<double>(i));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

ThresholdScan scan_thresholds(const std::vector<double>& grid, const ProblemParams& params,
                              const ShootingConfig& cfg) {
  if (grid.size() < 16) {
    throw std::invalid_argument("scan_thresholds: grid needs at least 16 points");
  }
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end() || !(grid.front() > 0.0)) {
    throw std::invalid_argument("scan_thresholds: grid must be positive and strictly increasing");
  }
  ThresholdScan scan;
  scan.grid = grid;
  scan.kinds.resize(grid.size());
  scan.reports.resize(grid.size());
  scan.errors.resize(grid.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      ShotResult shot = shoot(grid[i], params, cfg);
      scan.kinds[i] = shot.report.kind;
      scan.reports[i] = std::move(shot.report);
      scan.errors[i] = std::move(shot.error);
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(grid.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) {
    pool.emplace_back(worker);
  }
  worker();
  for (std::thread& t : pool) {
    t.join();
  }

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (scan.kinds[i] != scan.kinds[i + 1]) {
      scan.boundaries.push_back(bisect_boundary(grid[i], grid[i + 1], params, cfg));
    }
  }
  return scan;
}

Window end_window(double t_end) {
  const double inner = 0.75 * t_end;
  return t_end >= 0.0 ? Window{inner, t_end} : Window{t_end, inner};
}

ConnectConfig default_connect_config(End from) {
  ConnectConfig cfg;
  if (from == End::Origin) {
    cfg.T = -14.0;
    cfg.t_far = 30.0;
  }
  return cfg;
}

ConnectingOrbit connecting_orbit(const ProblemParams& params, const DerivedConstants& dc, End from,
                                 double eps, const ConnectConfig& cfg) {
  const RegimeFlags flags = classify_regime(params, dc);
  if (params.two_term() && flags.theorem3_case == Theorem3Case::None) {
    throw std::invalid_argument("connecting_orbit: parameters admit no singular connecting solution");
  }
  const bool seed_side_ok = from == End::Infinity ? cfg.T > 0.0 && cfg.t_far < 0.0
                                                  : cfg.T < 0.0 && cfg.t_far > 0.0;
  if (!seed_side_ok) {
    throw std::invalid_argument("connecting_orbit: T must lie on the seeded side and t_far opposite");
  }
  if (std::abs(cfg.T - cfg.t_far) < 20.0) {
    throw std::invalid_argument("connecting_orbit: span must be at least 20 in t");
  }
  const auto lambda_opt = dc.lambda_for(dominant_term(params, from));
  if (!lambda_opt) {
    throw UndefinedLambda("connecting_orbit: lambda undefined at the seeded end");
  }
  const double lambda = *lambda_opt;
  if (!(std::abs(eps) <= 1e-3 * lambda)) {
    throw std::invalid_argument("connecting_orbit: |eps| must not exceed 1e-3 lambda");
  }
  ConnectingOrbit orbit;
  orbit.seeded_end = from;
  orbit.eps = eps;
  orbit.seed = singular_seed_start(from, eps, cfg.T, params, dc);
  orbit.trajectory = integrate(orbit.seed, seed_frame(from, dc), cfg.t_far, params, cfg.integrator);

  const End far = from == End::Infinity ? End::Origin : End::Infinity;
  ClassifierOptions near_opts = cfg.classifier;
  near_opts.window = end_window(cfg.T);
  orbit.near_report = classify_end(orbit.trajectory, dc, from, near_opts);
  ClassifierOptions far_opts = cfg.classifier;
  far_opts.window = end_window(orbit.trajectory.termination.cause == Termination::ReachedSpanEnd
                                   ? cfg.t_far
                                   : orbit.trajectory.back().t);
  try {
    orbit.far_report = classify_end(orbit.trajectory, dc, far, far_opts);
  } catch (const InsufficientData& e) {
    orbit.far_report.end = far;
    orbit.far_report.kind = Kind::Undetermined;
    orbit.far_report.window = *far_opts.window;
    orbit.far_report.note = e.what();
  }
  return orbit;
}

DifferenceProbe difference_decay_probe(const ProblemParams& params, const DerivedConstants& dc,
                                       double eps1, double eps2, const ConnectConfig& cfg) {
  const ConnectingOrbit first = connecting_orbit(params, dc, End::Infinity, eps1, cfg);
  const ConnectingOrbit second = connecting_orbit(params, dc, End::Infinity, eps2, cfg);
  DifferenceProbe probe;
  probe.window = Window{0.5 * cfg.T, cfg.T};
  const std::vector<State> a = first.trajectory.window_samples(probe.window);
  const std::vector<State> b = second.trajectory.window_samples(probe.window);
  const double floor = 100.0 * cfg.integrator.atol;
  std::vector<double> ts;
  std::vector<double> logs;
  const std::size_t count = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < count; ++i) {
    if (a[i].t != b[i].t) {
      throw std::logic_error("difference_decay_probe: sample grids differ");
    }
    const double d = std::abs(a[i].v - b[i].v);
    probe.max_difference = std::max(probe.max_difference, d);
    if (d < floor) {
      probe.saturated = true;
    }
    ts.push_back(a[i].t);
    logs.push_back(std::log(d));
  }
  if (probe.saturated || count < 2) {
    probe.saturated = true;
    return probe;
  }
  const double n = static_cast<double>(count);
  double t_bar = 0.0;
  double y_bar = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    t_bar += ts[i];
    y_bar += logs[i];
  }
  t_bar /= n;
  y_bar /= n;
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    stt += (ts[i] - t_bar) * (ts[i] - t_bar);
    sty += (ts[i] - t_bar) * (logs[i] - y_bar);
  }
  probe.rate = sty / stt;
  return probe;
}

}  // namespace emden
