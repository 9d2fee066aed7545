#pragma once

#include <array>
#include <stdexcept>

#include "emden/params.hpp"
#include "emden/trajectory.hpp"

namespace emden {

/// Thrown when the right-hand side produces NaN or infinity; carries the state.
class NonFiniteRhs : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (dv/dt, d^2v/dt^2) of the radial equation written for v = r^alpha u, t = ln r:
///   v'' + (n-2-2a) v' - a(n-2-a) v + k1 e^{(l1-(p-1)a+2)t} v^p + k2 e^{(l2-(q-1)a+2)t} v^q = 0.
/// Throws std::domain_error for v < 0.
[[nodiscard]] std::array<double, 2> log_frame_rhs(double t, const State& s, const Frame& frame,
                                                  const ProblemParams& params);

/// Adaptive DOP853 integration from `start` to `t_target` (either direction).
///
/// Samples are recorded every `dense_output_stride` in t plus at the final time;
/// steps are clipped so every sample is an accepted step end. Integration stops
/// early when v reaches zero (located to 1e-12 in t), when v exceeds
/// `amplitude_cap`, or when the step size underflows.
[[nodiscard]] Trajectory integrate(const State& start, const Frame& frame, double t_target,
                                   const ProblemParams& params, const IntegratorConfig& cfg = {});

/// Result of the two-term series gate check.
struct SeriesCorrections {
  double p_term = 0.0;
  double q_term = 0.0;
};

/// Correction terms of u(r0) for the regular solution with u(0) = a.
[[nodiscard]] SeriesCorrections regular_series_corrections(double a, double r0,
                                                           const ProblemParams& params);

/// Largest r0 <= r0_max, reduced by decades, that passes the series gate.
[[nodiscard]] double admissible_series_radius(double a, const ProblemParams& params,
                                              double r0_max = 1e-4);

/// Regular start u(0) = a advanced to r0 with two series terms, expressed in `frame`.
/// Throws std::invalid_argument if either correction exceeds 1e-6 a.
[[nodiscard]] State regular_series_start(double a, double r0, const ProblemParams& params,
                                         const Frame& frame = {});

/// Seed near the exact singular amplitude at one end.
///
/// Infinity: alpha1 frame, v = lambda1 + eps, vdot = eps * delta.
/// Origin: alpha2 frame, v = lambda2 + eps, vdot = eps * rate, where rate is the largest positive
/// real root of the linearisation at lambda2 if there is one, and delta2 otherwise.
[[nodiscard]] State singular_seed_start(End end, double eps, double T, const ProblemParams& params,
                                       const DerivedConstants& dc);

/// Growth rate used for the origin seed (see singular_seed_start).
[[nodiscard]] double origin_seed_rate(const DerivedConstants& dc);

/// Frame of the seeded end.
[[nodiscard]] Frame seed_frame(End end, const DerivedConstants& dc);

/// Change of scaling alpha -> new_alpha on every sample; grid and termination unchanged.
[[nodiscard]] Trajectory reframe(const Trajectory& traj, double new_alpha);

}  // namespace emden
