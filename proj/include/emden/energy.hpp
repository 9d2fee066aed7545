#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emden/params.hpp"
#include "emden/trajectory.hpp"

namespace emden {

/// b(v) = v^{q+1}/(q+1) - lambda2^{q-1} v^2 / 2.
[[nodiscard]] double potential_b(double v, const DerivedConstants& dc);
/// b1(v) = v^{p+1}/(p+1) - lambda1^{p-1} v^2 / 2.
[[nodiscard]] double potential_b1(double v, const DerivedConstants& dc);

[[nodiscard]] double potential_b_slope(double v, const DerivedConstants& dc);
[[nodiscard]] double potential_b1_slope(double v, const DerivedConstants& dc);

struct PotentialShape {
  /// Unique positive critical point (the minimum), equal to lambda.
  double critical_point = 0.0;
  /// Positive zero beyond the well.
  double second_zero = 0.0;
  double minimum_value = 0.0;
};

[[nodiscard]] PotentialShape potential_b_shape(const DerivedConstants& dc);
[[nodiscard]] PotentialShape potential_b1_shape(const DerivedConstants& dc);

/// Energy of the scaled amplitude in a frame where one power term is autonomous:
///   E = vdot^2/2 - a(n-2-a) v^2/2 + v^{k+1}/(k+1).
/// Work integrals are oriented along the trajectory so that
///   E(t) + damping_work(t) + forcing_work(t) = E(t_first)
/// on exact solutions, with damping integrand (n-2-2a) vdot^2 and forcing integrand
/// e^{beta t} v^m vdot from the remaining power term.
struct EnergyTrace {
  std::vector<double> t;
  std::vector<double> E;
  std::vector<double> forcing_work;
  std::vector<double> damping_work;
  /// max - min of E + damping_work + forcing_work over the trace.
  double balance_residual = 0.0;
  /// max |E| over the trace.
  double energy_scale = 0.0;

  [[nodiscard]] bool empty() const { return t.empty(); }
  [[nodiscard]] double relative_residual() const;
};

/// Throws std::invalid_argument when the trajectory frame is neither alpha1 nor alpha2.
/// The work integrals use the trapezoid rule with the Hermite end correction
/// (derivatives of the integrands come from the equation), which is fourth order.
[[nodiscard]] EnergyTrace energy_trace(const Trajectory& traj, const DerivedConstants& dc,
                                       std::optional<Window> window = std::nullopt);

struct BoundReport {
  bool applicable = true;
  std::string reason;
  End end = End::Infinity;
  Window window;
  double frame_alpha = 0.0;
  /// sup r^alpha u over the window.
  double sup_v_tail = 0.0;
  /// sup |vdot| over the window (log-radius form of r v').
  double sup_rv1prime = 0.0;
  /// integral of vdot^2 dt over the window.
  double integral_weighted_vprime_sq = 0.0;
  /// r^{n-2} u nondecreasing over the window.
  bool monotone_mean_ok = false;
  /// Most negative relative increment of r^{n-2} u between consecutive samples.
  double monotone_worst_step = 0.0;
};

inline constexpr double kMonotoneStepTolerance = 1e-10;

/// Throws std::out_of_range when the window is not inside the trajectory span.
[[nodiscard]] BoundReport apriori_bound_report(const Trajectory& traj, const DerivedConstants& dc,
                                               const Window& window);

/// Integrals of vdot^2 over [s, s + width] for each start s, in the frame of `end`.
[[nodiscard]] std::vector<double> windowed_vdot_sq_integrals(const Trajectory& traj,
                                                             const DerivedConstants& dc, End end,
                                                             std::span<const double> starts,
                                                             double width);

struct MonotoneCheck {
  bool ok = true;
  /// Worst relative step against the required direction (0 when none).
  double worst_violation = 0.0;
  std::size_t checked_steps = 0;
};

/// r^{n-1} u' non-increasing in r along the whole trajectory.
[[nodiscard]] MonotoneCheck flux_nonincreasing(const Trajectory& traj,
                                               double rel_tol = kMonotoneStepTolerance);

/// r^{n-2} u nondecreasing in r over the window.
[[nodiscard]] MonotoneCheck rn2u_nondecreasing(const Trajectory& traj, const Window& window,
                                               double rel_tol = kMonotoneStepTolerance);

}  // namespace emden
