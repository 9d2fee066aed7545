#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "emden/integrator.hpp"

using namespace emden;

namespace {
const ProblemParams kA{5, 1.9, 1.95, 0.0, -0.5};
const ProblemParams kSingle{5, 3.0, 3.0, 0.0, -1.0, 1.0, 0.0};
const ProblemParams kBubble{5, 7.0 / 3.0, 3.0, 0.0, -1.0, 1.0, 0.0};

double rel(double a, double b) {
  return std::abs(a - b) / std::abs(b);
}
}  // namespace

TEST_CASE("log-frame right-hand side") {
  const State s{0.3, 1.2, -0.4};
  const auto f = log_frame_rhs(s.t, s, Frame{0.0}, kA);
  const double expected = -3.0 * s.vdot - std::pow(1.2, 1.9) * std::exp(2.0 * 0.3) -
                          std::pow(1.2, 1.95) * std::exp(1.5 * 0.3);
  CHECK(f[0] == s.vdot);
  CHECK(f[1] == doctest::Approx(expected).epsilon(1e-14));

  const DerivedConstants dc = derive_constants(kA);
  const auto g = log_frame_rhs(5.0, {5.0, *dc.lambda1, 0.0}, Frame{dc.alpha1}, kA);
  // At the p-term equilibrium only the subdominant forcing is left.
  CHECK(g[1] == doctest::Approx(-std::exp(dc.delta * 5.0) * std::pow(*dc.lambda1, 1.95)));
  CHECK_THROWS_AS(static_cast<void>(log_frame_rhs(0.0, {0.0, -1e-3, 0.0}, Frame{}, kA)),
                  std::domain_error);
}

TEST_CASE("exact singular solution in the raw frame") {
  const double c = std::sqrt(2.0);
  const Trajectory traj =
      integrate(to_frame(0.0, c, -c, 0.0), Frame{0.0}, std::log(1000.0), kSingle);
  CHECK(traj.termination.cause == Termination::ReachedSpanEnd);
  CHECK(traj.back().t == std::log(1000.0));
  double worst = 0.0;
  for (const State& s : traj.samples) {
    worst = std::max(worst, rel(raw_u(s, traj.frame), c * std::exp(-s.t)));
  }
  CHECK(worst < 100.0 * IntegratorConfig{}.rtol);
}

TEST_CASE("exact singular solution is an equilibrium of its frame") {
  const Trajectory traj = integrate({-3.0, std::sqrt(2.0), 0.0}, Frame{1.0}, 3.0, kSingle);
  for (const State& s : traj.samples) {
    CHECK(std::abs(s.v - std::sqrt(2.0)) < 1e-14);
  }
}

TEST_CASE("bubble from a regular start") {
  const double a = std::pow(15.0, 0.75);
  const double r0 = admissible_series_radius(a, kBubble);
  const State start = regular_series_start(a, r0, kBubble);
  const Trajectory traj = integrate(start, Frame{}, std::log(100.0), kBubble);
  const AubinTalentiProfile b = aubin_talenti_profile(5);
  double worst = 0.0;
  for (const State& s : traj.samples) {
    const double r = std::exp(s.t);
    if (r >= 0.01) {
      worst = std::max(worst, rel(raw_u(s, traj.frame), b(r)));
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("sample grid and metadata") {
  IntegratorConfig cfg;
  cfg.dense_output_stride = 0.05;
  const Trajectory traj = integrate({0.0, 1.0, 0.0}, Frame{0.7}, -1.0, kA, cfg);
  CHECK(traj.direction() == -1);
  CHECK(traj.heading() == End::Origin);
  CHECK(traj.size() == 21);
  CHECK(traj.frame.alpha == 0.7);
  CHECK(traj.tolerances == cfg);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    CHECK(traj.samples[i].t == doctest::Approx(-0.05 * static_cast<double>(i)).epsilon(1e-12));
  }
}

TEST_CASE("frame covariance") {
  const DerivedConstants dc = derive_constants(kA);
  const State raw_start{0.0, 1.0, -0.3};
  const State scaled_start = to_frame(0.0, 1.0, -0.3, dc.alpha1);
  const Trajectory raw = integrate(raw_start, Frame{}, 6.0, kA);
  const Trajectory scaled = reframe(integrate(scaled_start, Frame{dc.alpha1}, 6.0, kA), 0.0);
  REQUIRE(raw.size() == scaled.size());
  const std::size_t end = raw.termination.cause == Termination::PositivityLost ? raw.size() - 5
                                                                               : raw.size();
  for (std::size_t i = 0; i < end; ++i) {
    CHECK(rel(scaled.samples[i].v, raw.samples[i].v) < 10.0 * IntegratorConfig{}.rtol);
  }
}

TEST_CASE("direction symmetry") {
  const State start{0.0, 1.0, -0.3};
  const Trajectory fwd = integrate(start, Frame{}, 1.0, kA);
  REQUIRE(fwd.termination.cause == Termination::ReachedSpanEnd);
  const Trajectory back = integrate(fwd.back(), Frame{}, 0.0, kA);
  CHECK(back.back().t == 0.0);
  CHECK(rel(back.back().v, start.v) < 100.0 * IntegratorConfig{}.rtol);
  CHECK(std::abs(back.back().vdot - start.vdot) < 100.0 * IntegratorConfig{}.rtol);
}

TEST_CASE("positivity event") {
  const double r0 = admissible_series_radius(1.0, kA);
  const Trajectory traj = integrate(regular_series_start(1.0, r0, kA), Frame{}, 12.0, kA);
  REQUIRE(traj.termination.cause == Termination::PositivityLost);
  CHECK(traj.termination.t == traj.back().t);
  CHECK(std::abs(raw_u(traj.back(), traj.frame)) < 10.0 * IntegratorConfig{}.atol);
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    CHECK(traj.samples[i].v > 0.0);
  }
}

TEST_CASE("amplitude cap") {
  IntegratorConfig cfg;
  cfg.amplitude_cap = 10.0;
  // backwards the r^(2-n) mode takes over
  const Trajectory traj = integrate({0.0, 1.0, -5.0}, Frame{}, -10.0, kA, cfg);
  CHECK(traj.termination.cause == Termination::AmplitudeCap);
  CHECK(traj.back().v >= 10.0);
}

TEST_CASE("series start") {
  const SeriesCorrections c = regular_series_corrections(2.0, 1e-3, kA);
  CHECK(c.p_term == doctest::Approx(std::pow(2.0, 1.9) * 1e-6 / (2.0 * 5.0)));
  CHECK(c.q_term == doctest::Approx(std::pow(2.0, 1.95) * std::pow(1e-3, 1.5) / (1.5 * 4.5)));
  CHECK_THROWS_AS(static_cast<void>(regular_series_start(2.0, 1e-1, kA)), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(regular_series_start(-1.0, 1e-4, kA)), std::invalid_argument);
  CHECK(admissible_series_radius(1.0, kA) == 1e-4);
  CHECK(admissible_series_radius(100.0, kA) < 1e-4);

  const State s = regular_series_start(1.0, 1e-4, kA);
  CHECK(s.t == doctest::Approx(std::log(1e-4)));
  CHECK(s.v == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.vdot < 0.0);
}

TEST_CASE("singular seeds") {
  const DerivedConstants dc = derive_constants(kA);
  const State inf = singular_seed_start(End::Infinity, 1e-4, 10.0, kA, dc);
  CHECK(inf.t == 10.0);
  CHECK(inf.v == doctest::Approx(*dc.lambda1 + 1e-4));
  CHECK(inf.vdot == doctest::Approx(1e-4 * dc.delta));
  CHECK(seed_frame(End::Infinity, dc).alpha == dc.alpha1);
  CHECK(seed_frame(End::Origin, dc).alpha == dc.alpha2);
  CHECK_THROWS_AS(static_cast<void>(singular_seed_start(End::Infinity, 1.0, 10.0, kA, dc)),
                  std::invalid_argument);

  const ProblemParams c{5, 2.5, 3.0, 0.0, -0.5};
  const DerivedConstants dcc = derive_constants(c);
  // Linearisation at lambda2 is a focus; the seed follows the forcing rate.
  CHECK(origin_seed_rate(dcc) == doctest::Approx(dcc.delta2));
  const ProblemParams no_lambda{3, 2.0, 3.0, 0.0, -0.5};
  CHECK_THROWS_AS(static_cast<void>(singular_seed_start(End::Infinity, 1e-4, 10.0, no_lambda,
                                                        derive_constants(no_lambda))),
                  UndefinedLambda);
}

TEST_CASE("reframe round trip") {
  const Trajectory traj = integrate({0.0, 1.0, -0.5}, Frame{0.0}, 2.0, kA);
  const Trajectory same = reframe(traj, 0.0);
  CHECK(same.samples == traj.samples);
  const Trajectory back = reframe(reframe(traj, 2.0), 0.0);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(back.samples[i].v == doctest::Approx(traj.samples[i].v).epsilon(1e-14));
    CHECK(back.samples[i].vdot == doctest::Approx(traj.samples[i].vdot).epsilon(1e-13));
  }
}

TEST_CASE("integrator config validation") {
  IntegratorConfig cfg;
  cfg.rtol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.dense_output_stride = -1.0;
  CHECK_THROWS_AS(static_cast<void>(integrate({0.0, 1.0, 0.0}, Frame{}, 1.0, kA, cfg)),
                  std::invalid_argument);
}

TEST_CASE("raw conversions") {
  const State s = to_frame(0.5, 2.0, -1.0, 1.5);
  CHECK(raw_u(s, Frame{1.5}) == doctest::Approx(2.0));
  CHECK(raw_du_dt(s, Frame{1.5}) == doctest::Approx(-1.0));
  CHECK(raw_du_dr(s, Frame{1.5}) == doctest::Approx(-1.0 / std::exp(0.5)));
}
