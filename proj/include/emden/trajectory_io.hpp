#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "emden/energy.hpp"
#include "emden/trajectory.hpp"

namespace emden {

inline constexpr const char* kTrajectoryCsvHeader = "t,r,u,du_dr,v,dv_dt,frame_alpha";
inline constexpr const char* kEnergyCsvHeader = "t,E,forcing_work,damping_work";

class CsvParseError : public std::runtime_error {
 public:
  CsvParseError(std::size_t line, const std::string& what);
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// %.17g per field, LF line endings.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
[[nodiscard]] std::string trajectory_csv(const Trajectory& traj);

/// The CSV carries no parameters or termination, so `params` is attached as given and the
/// termination is inferred: PositivityLost when the last u is zero to 1e-10 of max |u|.
[[nodiscard]] Trajectory read_trajectory_csv(std::istream& is, const ProblemParams& params,
                                             const IntegratorConfig& tolerances = {});

void write_trajectory_file(const std::string& path, const Trajectory& traj);
[[nodiscard]] Trajectory read_trajectory_file(const std::string& path, const ProblemParams& params,
                                              const IntegratorConfig& tolerances = {});

void write_energy_csv(std::ostream& os, const EnergyTrace& trace);

/// %.17g
[[nodiscard]] std::string format_double(double x);

}  // namespace emden
