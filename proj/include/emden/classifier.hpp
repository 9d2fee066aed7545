#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "emden/params.hpp"
#include "emden/trajectory.hpp"

namespace emden {

enum class Kind {
  SlowDecaySingular,
  FastDecayRegular,
  RegularAtOrigin,
  Oscillatory,
  CrossesZero,
  Undetermined,
};

[[nodiscard]] std::string to_string(Kind kind);
[[nodiscard]] Kind kind_from_string(const std::string& name);

struct OscillationEnvelope {
  std::vector<double> minima_values;
  std::vector<double> maxima_values;
  double mu1 = 0.0;
  double mu2 = 0.0;
  /// Spread (max - min) of the extrema averaged into mu1 / mu2.
  double mu1_spread = 0.0;
  double mu2_spread = 0.0;
  double b_mu1 = 0.0;
  double b_mu2 = 0.0;
  /// Which potential the b-values use: "b" (q-term) or "b1" (p-term).
  std::string potential;
};

struct ClassificationReport {
  End end = End::Infinity;
  Kind kind = Kind::Undetermined;
  double fitted_constant = 0.0;
  double residual = 0.0;
  std::optional<double> rate;
  std::optional<OscillationEnvelope> envelope;
  Window window;
  std::string note;
};

struct ClassifierOptions {
  double tol_class = 0.02;
  double amplitude_threshold = 0.05;
  double power_residual = 0.05;
  double slope_threshold = 1e-3;
  double contraction_factor = 1.5;
  std::size_t min_samples = 10;
  /// Defaults to the last quarter of the span on the requested end.
  std::optional<Window> window;
};

/// Too few samples or extrema to make the requested measurement.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |v - lambda| fell below the integrator noise floor.
class RateSaturated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decide the end behaviour realised by `traj` at `end`:
/// 1. positivity lost heading to this end   -> CrossesZero
/// 2. >= 3 sign changes of vdot with relative amplitude above threshold
///    and no envelope contraction           -> Oscillatory
/// 3. flat window mean within tol of lambda -> SlowDecaySingular
/// 4. fixed-slope power law fits raw u      -> FastDecayRegular / RegularAtOrigin
/// 5. otherwise                              -> Undetermined
/// Measurements use the frame of the dominant term at that end, so the result does not
/// depend on the frame the trajectory was integrated in.
[[nodiscard]] ClassificationReport classify_end(const Trajectory& traj, const DerivedConstants& dc,
                                                End end, const ClassifierOptions& options = {});

struct PowerFit {
  double coefficient = 0.0;
  /// RMS misfit of ln u in the window.
  double residual = 0.0;
};

/// Least squares of ln u against ln r with the slope pinned to -exponent_hypothesis.
[[nodiscard]] PowerFit fit_power_tail(const Trajectory& traj, double exponent_hypothesis,
                                      const Window& window);

/// Least-squares slope of ln|v - lambda| against t over the window, using the trajectory's
/// own frame. When v - lambda changes sign, the fit uses the peak of |v - lambda| on each
/// constant-sign segment.
[[nodiscard]] double fit_exponential_rate(const Trajectory& traj, double lambda_target,
                                          const Window& window);

/// Local extrema of the scaled amplitude on the window, refined by a parabola through
/// the three samples around each one.
[[nodiscard]] OscillationEnvelope oscillation_envelope(const Trajectory& traj,
                                                       const DerivedConstants& dc, End end,
                                                       std::optional<Window> window = std::nullopt);

}  // namespace emden
