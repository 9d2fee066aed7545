#include "emden/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emden {

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw std::invalid_argument("integrator: rtol and atol must be positive");
  }
  if (!(max_step > 0.0) || !(dense_output_stride > 0.0)) {
    throw std::invalid_argument("integrator: max_step and dense_output_stride must be positive");
  }
  if (dense_output_stride > 10.0 * max_step) {
    throw std::invalid_argument("integrator: dense_output_stride must not exceed 10 * max_step");
  }
  if (!(amplitude_cap > 0.0)) {
    throw std::invalid_argument("integrator: amplitude_cap must be positive");
  }
}

int Trajectory::direction() const {
  if (samples.size() < 2) {
    return 0;
  }
  return samples.back().t > samples.front().t ? 1 : -1;
}

double Trajectory::t_min() const {
  return std::min(samples.front().t, samples.back().t);
}

double Trajectory::t_max() const {
  return std::max(samples.front().t, samples.back().t);
}

End Trajectory::heading() const {
  return direction() < 0 ? End::Origin : End::Infinity;
}

std::vector<State> Trajectory::window_samples(const Window& w) const {
  std::vector<State> out;
  for (const State& s : samples) {
    if (w.contains(s.t)) {
      out.push_back(s);
    }
  }
  if (direction() < 0) {
    std::reverse(out.begin(), out.end());
  }
  return out;
}

Window Trajectory::default_window(End end, double fraction) const {
  const double lo = t_min();
  const double hi = t_max();
  const double width = fraction * (hi - lo);
  if (end == End::Infinity) {
    return {hi - width, hi};
  }
  return {lo, lo + width};
}

std::string to_string(Termination cause) {
  switch (cause) {
    case Termination::ReachedSpanEnd:
      return "ReachedSpanEnd";
    case Termination::PositivityLost:
      return "PositivityLost";
    case Termination::AmplitudeCap:
      return "AmplitudeCap";
    case Termination::StepUnderflow:
      return "StepUnderflow";
  }
  return "unknown";
}

std::string to_string(End end) {
  return end == End::Origin ? "origin" : "infinity";
}

double raw_u(const State& s, const Frame& frame) {
  return std::exp(-frame.alpha * s.t) * s.v;
}

double raw_du_dt(const State& s, const Frame& frame) {
  return std::exp(-frame.alpha * s.t) * (s.vdot - frame.alpha * s.v);
}

double raw_du_dr(const State& s, const Frame& frame) {
  return std::exp(-(frame.alpha + 1.0) * s.t) * (s.vdot - frame.alpha * s.v);
}

State to_frame(double t, double u, double du_dt, double alpha) {
  const double scale = std::exp(alpha * t);
  return {t, scale * u, scale * (alpha * u + du_dt)};
}

}  // namespace emden
