#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "emden/classifier.hpp"
#include "emden/integrator.hpp"

using namespace emden;

namespace {
const ProblemParams kA{5, 1.9, 1.95, 0.0, -0.5};
const ProblemParams kB{5, 1.9, 2.0, 0.0, -0.5};
const ProblemParams kSingle{5, 3.0, 3.0, 0.0, -1.0, 1.0, 0.0};
const ProblemParams kBubble{5, 7.0 / 3.0, 3.0, 0.0, -1.0, 1.0, 0.0};

Trajectory synthetic(const std::function<double(double)>& v, double t0, double t1, double alpha,
                     const ProblemParams& params) {
  Trajectory traj;
  traj.frame = Frame{alpha};
  traj.params = params;
  const int n = static_cast<int>(std::lround((t1 - t0) / 0.01));
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + 0.01 * i;
    const double h = 1e-6;
    traj.samples.push_back({t, v(t), (v(t + h) - v(t - h)) / (2 * h)});
  }
  traj.termination.t = t1;
  return traj;
}

Trajectory bubble_shot() {
  const double a = std::pow(15.0, 0.75);
  const State start = regular_series_start(a, admissible_series_radius(a, kBubble), kBubble);
  return integrate(start, Frame{}, std::log(100.0), kBubble);
}
}  // namespace

TEST_CASE("kind names round trip") {
  for (const Kind k : {Kind::SlowDecaySingular, Kind::FastDecayRegular, Kind::RegularAtOrigin,
                       Kind::Oscillatory, Kind::CrossesZero, Kind::Undetermined}) {
    CHECK(kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(static_cast<void>(kind_from_string("Sideways")), std::invalid_argument);
}

TEST_CASE("exact singular solution is slow decay") {
  const DerivedConstants dc = derive_constants(kSingle);
  const double c = std::sqrt(2.0);
  const Trajectory traj = integrate(to_frame(0.0, c, -c, 0.0), Frame{}, std::log(1000.0), kSingle);
  const ClassificationReport rep = classify_end(traj, dc, End::Infinity);
  CHECK(rep.kind == Kind::SlowDecaySingular);
  CHECK(rep.fitted_constant == doctest::Approx(c).epsilon(1e-8));
  CHECK(rep.end == End::Infinity);
}

TEST_CASE("bubble is fast decay at infinity and regular at the origin") {
  const DerivedConstants dc = derive_constants(kBubble);
  const Trajectory traj = bubble_shot();
  ClassifierOptions opts;
  opts.window = Window{std::log(50.0), std::log(100.0)};
  const ClassificationReport far = classify_end(traj, dc, End::Infinity, opts);
  CHECK(far.kind == Kind::FastDecayRegular);
  // b(r) r^3 -> 15^(3/4) as r grows
  CHECK(far.fitted_constant == doctest::Approx(std::pow(15.0, 0.75)).epsilon(1e-3));

  const ClassificationReport near = classify_end(traj, dc, End::Origin);
  CHECK(near.kind == Kind::RegularAtOrigin);
  CHECK(near.fitted_constant == doctest::Approx(std::pow(15.0, 0.75)).epsilon(1e-3));
}

TEST_CASE("zero crossing wins over everything else") {
  const DerivedConstants dc = derive_constants(kA);
  const Trajectory traj =
      integrate(regular_series_start(1.0, admissible_series_radius(1.0, kA), kA), Frame{}, 12.0, kA);
  REQUIRE(traj.termination.cause == Termination::PositivityLost);
  const ClassificationReport rep = classify_end(traj, dc, End::Infinity);
  CHECK(rep.kind == Kind::CrossesZero);
  CHECK(rep.fitted_constant == doctest::Approx(traj.termination.t));
}

TEST_CASE("undamped well at the origin oscillates") {
  const DerivedConstants dc = derive_constants(kB);
  REQUIRE(dc.lambda2);
  const Trajectory traj = integrate({-6.0, 1.3 * *dc.lambda2, 0.0}, Frame{dc.alpha2}, -36.0, kB);
  REQUIRE(traj.termination.cause == Termination::ReachedSpanEnd);
  ClassifierOptions opts;
  opts.window = Window{-36.0, -16.0};
  const ClassificationReport rep = classify_end(traj, dc, End::Origin, opts);
  CHECK(rep.kind == Kind::Oscillatory);
  REQUIRE(rep.envelope);
  CHECK(rep.envelope->potential == "b");
  CHECK(rep.envelope->mu1 < *dc.lambda2);
  CHECK(rep.envelope->mu2 > *dc.lambda2);
  CHECK(rep.envelope->b_mu1 == doctest::Approx(rep.envelope->b_mu2).epsilon(1e-3));
}

TEST_CASE("power tail fit") {
  const Trajectory traj = bubble_shot();
  const Window w{std::log(50.0), std::log(100.0)};
  const PowerFit right = fit_power_tail(traj, 3.0, w);
  CHECK(right.residual < 1e-3);
  CHECK(right.coefficient == doctest::Approx(std::pow(15.0, 0.75)).epsilon(1e-3));
  CHECK(fit_power_tail(traj, 2.0, w).residual > 0.1);
  CHECK_THROWS_AS(static_cast<void>(fit_power_tail(traj, 3.0, Window{10.0, 11.0})), InsufficientData);
}

TEST_CASE("exponential rate on synthetic data") {
  const DerivedConstants dc = derive_constants(kA);
  const double lambda = *dc.lambda1;
  const Trajectory mono = synthetic([&](double t) { return lambda + 0.3 * std::exp(-0.75 * t); },
                                    0.0, 12.0, dc.alpha1, kA);
  CHECK(fit_exponential_rate(mono, lambda, Window{4.0, 12.0}) == doctest::Approx(-0.75).epsilon(1e-6));
  // halving the window must not move the rate
  CHECK(fit_exponential_rate(mono, lambda, Window{8.0, 12.0}) == doctest::Approx(-0.75).epsilon(1e-6));

  const Trajectory spiral = synthetic(
      [&](double t) { return lambda + 0.3 * std::exp(-0.5 * t) * std::cos(2.0 * t); }, 0.0, 16.0,
      dc.alpha1, kA);
  CHECK(fit_exponential_rate(spiral, lambda, Window{2.0, 16.0}) == doctest::Approx(-0.5).epsilon(0.02));

  const Trajectory flat = synthetic([&](double) { return lambda + 1e-11; }, 0.0, 4.0, dc.alpha1, kA);
  CHECK_THROWS_AS(static_cast<void>(fit_exponential_rate(flat, lambda, Window{1.0, 4.0})),
                  RateSaturated);
  CHECK_THROWS_AS(static_cast<void>(fit_exponential_rate(flat, lambda, Window{10.0, 11.0})),
                  InsufficientData);
}

TEST_CASE("too few samples") {
  const DerivedConstants dc = derive_constants(kA);
  const Trajectory traj = synthetic([](double) { return 1.0; }, 0.0, 0.03, dc.alpha1, kA);
  CHECK_THROWS_AS(static_cast<void>(classify_end(traj, dc, End::Infinity)), InsufficientData);
  CHECK_THROWS_AS(static_cast<void>(classify_end(Trajectory{}, dc, End::Infinity)), InsufficientData);
}

TEST_CASE("classification does not depend on the integration frame") {
  const DerivedConstants dc = derive_constants(kSingle);
  const double c = std::sqrt(2.0);
  const Trajectory raw = integrate(to_frame(0.0, c, -c, 0.0), Frame{}, std::log(1000.0), kSingle);
  const Trajectory scaled = integrate(to_frame(0.0, c, -c, 1.0), Frame{1.0}, std::log(1000.0), kSingle);
  const ClassificationReport a = classify_end(raw, dc, End::Infinity);
  const ClassificationReport b = classify_end(scaled, dc, End::Infinity);
  const ClassificationReport c2 = classify_end(reframe(raw, 0.4), dc, End::Infinity);
  CHECK(a.kind == b.kind);
  CHECK(a.kind == c2.kind);
  CHECK(std::abs(a.fitted_constant - b.fitted_constant) < 1e-6);
  CHECK(std::abs(a.fitted_constant - c2.fitted_constant) < 1e-6);
}

TEST_CASE("envelope needs turning points") {
  const DerivedConstants dc = derive_constants(kA);
  const Trajectory flat = synthetic([&](double) { return *dc.lambda1; }, 0.0, 6.0, dc.alpha1, kA);
  CHECK_THROWS_AS(static_cast<void>(oscillation_envelope(flat, dc, End::Infinity)), InsufficientData);
}
