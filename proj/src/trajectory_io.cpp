#include "emden/trajectory_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace emden {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

double parse_field(const std::string& text, std::size_t line, const char* column) {
  if (text.empty()) {
    throw CsvParseError(line, std::string("empty field '") + column + "'");
  }
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    throw CsvParseError(line, std::string("bad number in '") + column + "': " + text);
  }
  return x;
}

}  // namespace

CsvParseError::CsvParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << kTrajectoryCsvHeader << '\n';
  char buf[256];
  for (const State& s : traj.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t,
                  std::exp(s.t), raw_u(s, traj.frame), raw_du_dr(s, traj.frame), s.v, s.vdot,
                  traj.frame.alpha);
    os << buf;
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  return os.str();
}

Trajectory read_trajectory_csv(std::istream& is, const ProblemParams& params,
                               const IntegratorConfig& tolerances) {
  static constexpr const char* kColumns[] = {"t", "r", "u", "du_dr", "v", "dv_dt", "frame_alpha"};
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) {
    throw CsvParseError(1, "missing header");
  }
  if (!line.empty() && line.back() == '\r') {
    throw CsvParseError(1, "CR line endings are not accepted");
  }
  if (line != kTrajectoryCsvHeader) {
    throw CsvParseError(1, "header mismatch, expected '" + std::string(kTrajectoryCsvHeader) + "'");
  }
  Trajectory traj;
  traj.params = params;
  traj.tolerances = tolerances;
  bool have_alpha = false;
  double max_u = 0.0;
  double last_u = 0.0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) {
      throw CsvParseError(line_no, "empty line");
    }
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 7) {
      throw CsvParseError(line_no, "expected 7 fields, found " + std::to_string(fields.size()));
    }
    double values[7];
    for (std::size_t i = 0; i < 7; ++i) {
      values[i] = parse_field(fields[i], line_no, kColumns[i]);
    }
    if (!have_alpha) {
      traj.frame.alpha = values[6];
      have_alpha = true;
    } else if (values[6] != traj.frame.alpha) {
      throw CsvParseError(line_no, "frame_alpha changes within the file");
    }
    traj.samples.push_back({values[0], values[4], values[5]});
    max_u = std::max(max_u, std::abs(values[2]));
    last_u = values[2];
  }
  if (traj.samples.empty()) {
    throw CsvParseError(line_no, "no samples");
  }
  traj.termination.t = traj.samples.back().t;
  if (traj.samples.size() > 1 && std::abs(last_u) <= 1e-10 * max_u) {
    traj.termination.cause = Termination::PositivityLost;
  }
  return traj;
}

void write_trajectory_file(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_trajectory_csv(os, traj);
}

Trajectory read_trajectory_file(const std::string& path, const ProblemParams& params,
                                const IntegratorConfig& tolerances) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("cannot open " + path);
  }
  return read_trajectory_csv(is, params, tolerances);
}

void write_energy_csv(std::ostream& os, const EnergyTrace& trace) {
  os << kEnergyCsvHeader << '\n';
  char buf[128];
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", trace.t[i], trace.E[i],
                  trace.forcing_work[i], trace.damping_work[i]);
    os << buf;
  }
}

}  // namespace emden
