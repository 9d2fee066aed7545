#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "emden/classifier.hpp"
#include "emden/params.hpp"
#include "emden/trajectory.hpp"

namespace emden {

struct ShootingConfig {
  IntegratorConfig integrator;
  /// Upper bound for the series radius; shrunk by decades for large a.
  double r0_max = 1e-4;
  double t_far = 12.0;
  ClassifierOptions classifier;
  unsigned jobs = 1;
};

struct ShotResult {
  double a = 0.0;
  Trajectory trajectory;
  /// Classification at infinity.
  ClassificationReport report;
  /// Integrator or classifier failure; the report is then Undetermined.
  std::string error;
};

/// Regular start u(0) = a, integrated in the infinity frame up to t_far and classified there.
[[nodiscard]] ShotResult shoot(double a, const ProblemParams& params, const ShootingConfig& cfg = {});

class BracketInvalid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Bisection {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double a_star = 0.0;
  Kind kind_lo = Kind::Undetermined;
  Kind kind_hi = Kind::Undetermined;
  int iterations = 0;
  /// Classification of the re-run threshold shot at a_star.
  ClassificationReport threshold_report;

  [[nodiscard]] double relative_width() const { return (a_hi - a_lo) / a_star; }
};

inline constexpr double kBisectionRelativeWidth = 1e-12;

[[nodiscard]] Bisection bisect_boundary(double a_lo, double a_hi, const ProblemParams& params,
                                        const ShootingConfig& cfg = {}, int max_iter = 80);

struct ThresholdScan {
  std::vector<double> grid;
  std::vector<Kind> kinds;
  std::vector<ClassificationReport> reports;
  std::vector<std::string> errors;
  std::vector<Bisection> boundaries;
};

/// Shoots every grid point (concurrently up to cfg.jobs) and bisects every adjacent pair whose
/// kinds differ. Results do not depend on the number of workers.
[[nodiscard]] ThresholdScan scan_thresholds(const std::vector<double>& grid,
                                            const ProblemParams& params,
                                            const ShootingConfig& cfg = {});

/// count points from lo to hi, evenly spaced in log.
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, std::size_t count);

struct ConnectConfig {
  IntegratorConfig integrator;
  /// Seed position; positive for a seed at infinity, negative at the origin.
  double T = 16.0;
  /// End of the integration on the opposite side.
  double t_far = -30.0;
  ClassifierOptions classifier;
};

struct ConnectingOrbit {
  End seeded_end = End::Infinity;
  double eps = 0.0;
  State seed;
  Trajectory trajectory;
  ClassificationReport near_report;
  ClassificationReport far_report;
};

/// Window covering t between 0.75 t_end and t_end.
[[nodiscard]] Window end_window(double t_end);

/// Seeds near the exact singular amplitude at `from` and integrates across to the other end.
/// Both ends are classified on end_window of their extreme t.
[[nodiscard]] ConnectingOrbit connecting_orbit(const ProblemParams& params,
                                               const DerivedConstants& dc, End from, double eps,
                                               const ConnectConfig& cfg);

[[nodiscard]] ConnectConfig default_connect_config(End from);

struct DifferenceProbe {
  Window window;
  double max_difference = 0.0;
  bool saturated = false;
  /// Slope of ln|v(eps1) - v(eps2)| against t; empty when saturated.
  std::optional<double> rate;
};

/// Two orbits seeded at infinity with different eps, compared sample by sample over
/// [T/2, T]. The window spans more than one turn of the spiral around lambda1.
[[nodiscard]] DifferenceProbe difference_decay_probe(const ProblemParams& params,
                                                     const DerivedConstants& dc, double eps1,
                                                     double eps2, const ConnectConfig& cfg);

}  // namespace emden
