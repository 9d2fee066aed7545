#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "emden/classifier.hpp"
#include "emden/params.hpp"
#include "emden/shooting.hpp"
#include "emden/trajectory.hpp"

namespace emden {

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::size_t line, const std::string& what);
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct SolveSettings {
  /// "regular" (series start u(0) = a) or "singular" (seed near lambda at `end`).
  std::string mode = "regular";
  double a = 1.0;
  double r0 = 1e-4;
  End end = End::Infinity;
  double eps = 1e-4;
  std::optional<double> t_start;
  std::optional<double> t_end;
};

struct ShootSettings {
  double a_min = 1e-2;
  double a_max = 1e2;
  int points = 64;
  double t_far = 12.0;
  double r0_max = 1e-4;
};

struct ConnectSettings {
  End from = End::Infinity;
  double eps = 1e-4;
  /// |T|; 16 from infinity and 14 from the origin when unset.
  std::optional<double> t_seed;
  /// |t_far| on the opposite side.
  double t_far = 30.0;
};

struct SweepAxes {
  std::vector<int> n;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> l1;
  std::vector<double> l2;
  /// Height of the regular shot used for cells without a singular connecting solution.
  double a = 1.0;
};

struct RunConfig {
  ProblemParams params{5, 1.9, 1.95, 0.0, -0.5};
  IntegratorConfig integrator;
  ClassifierOptions classifier;
  SolveSettings solve;
  ShootSettings shoot;
  ConnectSettings connect;
  SweepAxes sweep;
  std::string output_dir = "out";

  void validate() const;

  /// One `section.key=value` line per semantic field; output settings excluded.
  [[nodiscard]] std::string canonical() const;
  /// FNV-1a 64 of canonical().
  [[nodiscard]] std::uint64_t hash() const;
  [[nodiscard]] std::string hash_hex() const;
  /// First 12 hex digits of the hash.
  [[nodiscard]] std::string run_id() const;

  [[nodiscard]] ShootingConfig shooting_config(unsigned jobs = 1) const;
  [[nodiscard]] ConnectConfig connect_config(End from) const;
};

/// Grammar, one item per line:
///   # comment      (also ';')
///   [section]
///   key = value
/// Sections: params integrator classifier solve shoot connect sweep output.
/// Sweep axes are comma-separated lists. Unknown sections and keys are errors.
[[nodiscard]] RunConfig parse_run_config(std::istream& is);
[[nodiscard]] RunConfig load_run_config(const std::string& path);

[[nodiscard]] End end_from_string(const std::string& name);

}  // namespace emden
