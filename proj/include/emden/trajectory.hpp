#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "emden/params.hpp"

namespace emden {

/// Scaling v = r^alpha u in log radius t = ln r. alpha = 0 is the raw-u frame.
struct Frame {
  double alpha = 0.0;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct State {
  double t = 0.0;
  double v = 0.0;
  double vdot = 0.0;

  friend bool operator==(const State&, const State&) = default;
};

enum class Termination { ReachedSpanEnd, PositivityLost, AmplitudeCap, StepUnderflow };

struct TerminationInfo {
  Termination cause = Termination::ReachedSpanEnd;
  double t = 0.0;

  friend bool operator==(const TerminationInfo&, const TerminationInfo&) = default;
};

struct IntegratorConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = 0.05;
  double amplitude_cap = 1e8;
  double dense_output_stride = 0.01;

  void validate() const;

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// Closed interval of log radius, independent of integration direction.
struct Window {
  double t_lo = 0.0;
  double t_hi = 0.0;

  [[nodiscard]] bool contains(double t) const { return t_lo <= t && t <= t_hi; }
  [[nodiscard]] double length() const { return t_hi - t_lo; }
};

struct Trajectory {
  Frame frame;
  ProblemParams params;
  std::vector<State> samples;
  TerminationInfo termination;
  IntegratorConfig tolerances;

  [[nodiscard]] bool empty() const { return samples.empty(); }
  [[nodiscard]] std::size_t size() const { return samples.size(); }
  [[nodiscard]] const State& front() const { return samples.front(); }
  [[nodiscard]] const State& back() const { return samples.back(); }

  /// +1 when t increases along the samples, -1 when it decreases, 0 for a single sample.
  [[nodiscard]] int direction() const;
  [[nodiscard]] double t_min() const;
  [[nodiscard]] double t_max() const;
  /// The end of the r axis the integration was heading toward.
  [[nodiscard]] End heading() const;

  /// Samples with t inside the window, ordered by increasing t.
  [[nodiscard]] std::vector<State> window_samples(const Window& w) const;
  /// Last quarter of the span on the given side.
  [[nodiscard]] Window default_window(End end, double fraction = 0.25) const;
};

[[nodiscard]] std::string to_string(Termination cause);
[[nodiscard]] std::string to_string(End end);

/// u = e^{-alpha t} v.
[[nodiscard]] double raw_u(const State& s, const Frame& frame);
/// du/dr = e^{-(alpha+1) t} (vdot - alpha v).
[[nodiscard]] double raw_du_dr(const State& s, const Frame& frame);
/// du/dt = r u'.
[[nodiscard]] double raw_du_dt(const State& s, const Frame& frame);

/// Rewrite a raw-frame state (u, du/dt at t) in the frame with the given alpha.
[[nodiscard]] State to_frame(double t, double u, double du_dt, double alpha);

}  // namespace emden
