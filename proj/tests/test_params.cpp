#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "emden/params.hpp"

using namespace emden;

namespace {
const ProblemParams kA{5, 1.9, 1.95, 0.0, -0.5};
const ProblemParams kB{5, 1.9, 2.0, 0.0, -0.5};
const ProblemParams kC{5, 2.5, 3.0, 0.0, -0.5};
}  // namespace

TEST_CASE("constants of config A") {
  const DerivedConstants dc = derive_constants(kA);
  CHECK(dc.alpha1 == doctest::Approx(2.2222222222222222).epsilon(1e-14));
  CHECK(dc.alpha2 == doctest::Approx(1.5789473684210526).epsilon(1e-14));
  REQUIRE(dc.lambda1);
  REQUIRE(dc.lambda2);
  CHECK(*dc.lambda1 == doctest::Approx(1.8367404753952032).epsilon(1e-13));
  CHECK(*dc.lambda2 == doctest::Approx(2.3412637106373519).epsilon(1e-13));
  CHECK(dc.delta == doctest::Approx(-0.61111111111111111).epsilon(1e-14));
  CHECK(dc.delta2 == doctest::Approx(0.57894736842105263).epsilon(1e-14));
  CHECK(dc.omega_sq == doctest::Approx(1.0339506172839506).epsilon(1e-13));
  CHECK(dc.serrin1 == doctest::Approx(5.0 / 3.0));
  CHECK(dc.sobolev1 == doctest::Approx(7.0 / 3.0));
  CHECK(dc.sobolev2 == doctest::Approx(2.0));
  CHECK(dc.c1coef == doctest::Approx(3.0 - 2.0 * dc.alpha1));
}

TEST_CASE("lambda identities and frame exponents") {
  for (const ProblemParams& p : {kA, kB, kC}) {
    const DerivedConstants dc = derive_constants(p);
    const double n = p.n;
    CHECK(std::pow(*dc.lambda1, p.p - 1.0) ==
          doctest::Approx(dc.alpha1 * (n - 2.0 - dc.alpha1)).epsilon(1e-12));
    CHECK(std::pow(*dc.lambda2, p.q - 1.0) ==
          doctest::Approx(dc.alpha2 * (n - 2.0 - dc.alpha2)).epsilon(1e-12));
    CHECK(dc.frame_exp(dc.alpha1, Term::P) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(dc.frame_exp(dc.alpha2, Term::Q) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(dc.frame_exp(dc.alpha1, Term::Q) == doctest::Approx(dc.delta).epsilon(1e-12));
    CHECK(dc.frame_exp(dc.alpha2, Term::P) == doctest::Approx(dc.delta2).epsilon(1e-12));
    CHECK(dc.alpha1 > dc.alpha2);
  }
}

TEST_CASE("critical q gives lambda2 = 2.25") {
  const DerivedConstants dc = derive_constants(kB);
  CHECK(dc.alpha2 == doctest::Approx(1.5));
  CHECK(*dc.lambda2 == doctest::Approx(2.25).epsilon(1e-14));
  const RegimeFlags flags = classify_regime(kB, dc);
  CHECK(flags.theorem2_case == Theorem2Case::CriticalQ);
  CHECK(flags.theorem3_case == Theorem3Case::None);
  CHECK(flags.theorem1_applies == false);
}

TEST_CASE("single-term singular amplitude") {
  const ProblemParams single{5, 3.0, 3.0, 0.0, -1.0, 1.0, 0.0};
  const DerivedConstants dc = derive_constants(single);
  CHECK(dc.alpha1 == doctest::Approx(1.0));
  CHECK(*dc.lambda1 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  const SingularProfile prof = exact_single_term_singular(5, 0.0, 3.0);
  CHECK(prof.alpha == 1.0);
  CHECK(prof.lambda == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(static_cast<void>(exact_single_term_singular(3, 0.0, 2.0)), UndefinedLambda);
}

TEST_CASE("single-term profile solves the equation") {
  // u = lambda r^-alpha: u'' + (n-1)/r u' + r^l u^p = 0
  for (double p : {2.0, 3.0, 4.5}) {
    const SingularProfile prof = exact_single_term_singular(6, -0.5, p);
    const double r = 1.7;
    const double u = prof.lambda * std::pow(r, -prof.alpha);
    const double du = -prof.alpha * u / r;
    const double d2u = prof.alpha * (prof.alpha + 1.0) * u / (r * r);
    const double residual = d2u + 5.0 / r * du + std::pow(r, -0.5) * std::pow(u, p);
    CHECK(std::abs(residual) < 1e-12 * std::abs(d2u));
  }
}

TEST_CASE("regime flags") {
  const RegimeFlags a = classify_regime(kA, derive_constants(kA));
  CHECK(a.theorem1_applies);
  CHECK(a.theorem2_case == Theorem2Case::None);
  CHECK(a.theorem3_case == Theorem3Case::SingularAtInfinity);
  CHECK(a.margins.q_minus_sobolev2 == doctest::Approx(-0.05));

  const RegimeFlags c = classify_regime(kC, derive_constants(kC));
  CHECK(c.theorem3_case == Theorem3Case::SingularAtOrigin);
  CHECK(c.theorem1_applies);

  ProblemParams crit_p = kA;
  crit_p.p = 7.0 / 3.0;
  crit_p.q = 2.5;
  const RegimeFlags cp = classify_regime(crit_p, derive_constants(crit_p));
  CHECK(cp.theorem2_case == Theorem2Case::CriticalP);
  CHECK_FALSE(cp.theorem1_applies);

  ProblemParams below_serrin = kA;
  below_serrin.p = 1.5;
  CHECK_FALSE(classify_regime(below_serrin, derive_constants(below_serrin)).theorem1_applies);
}

TEST_CASE("eps_crit is configurable") {
  ProblemParams near = kB;
  near.q = 2.0 + 1e-9;
  const DerivedConstants dc = derive_constants(near);
  CHECK(classify_regime(near, dc).theorem2_case == Theorem2Case::None);
  CHECK(classify_regime(near, dc, 1e-6).theorem2_case == Theorem2Case::CriticalQ);
}

TEST_CASE("invalid parameters are rejected") {
  auto bad = [](ProblemParams p) { CHECK_THROWS_AS(p.validate(), std::invalid_argument); };
  ProblemParams p = kA;
  p.p = 1.0;
  bad(p);
  p = kA;
  p.q = 1.8;
  bad(p);
  p = kA;
  p.l2 = 0.1;
  bad(p);
  p = kA;
  p.l1 = 0.5;
  p.l2 = 0.2;
  bad(p);
  p = kA;
  p.n = 2;
  bad(p);
  p = kA;
  p.k1 = 0.5;
  bad(p);
  p = kA;
  p.k1 = 0.0;
  p.k2 = 0.0;
  bad(p);
  p = kA;
  p.l2 = std::nan("");
  bad(p);
  CHECK_THROWS_AS(static_cast<void>(derive_constants(ProblemParams{5, 1.0, 2.0, 0.0, -0.5})),
                  std::invalid_argument);
}

TEST_CASE("undefined lambda is flagged") {
  // n = 3 with alpha1 = 2 > n - 2.
  const ProblemParams p{3, 2.0, 3.0, 0.0, -0.5};
  const DerivedConstants dc = derive_constants(p);
  CHECK_FALSE(dc.lambda1.has_value());
  CHECK_THROWS_AS(static_cast<void>(dc.lambda1_or_throw()), UndefinedLambda);
  CHECK(dc.lambda2.has_value());
}

TEST_CASE("omega only when the discriminant is positive") {
  const DerivedConstants a = derive_constants(kA);
  REQUIRE(a.omega());
  CHECK(*a.omega() == doctest::Approx(std::sqrt(a.omega_sq)));
  const ProblemParams monotone{5, 1.7, 1.8, 0.0, -0.5};
  const DerivedConstants m = derive_constants(monotone);
  CHECK(m.omega_sq < 0.0);
  CHECK_FALSE(m.omega().has_value());
}

TEST_CASE("bubble profile") {
  const AubinTalentiProfile b = aubin_talenti_profile(5);
  CHECK(b.tail_constant() == doctest::Approx(7.6219912223192210).epsilon(1e-14));
  CHECK(b.exponent() == doctest::Approx(7.0 / 3.0));
  CHECK(b(0.0) == doctest::Approx(b.tail_constant()));
  for (double r : {0.3, 1.0, 4.0}) {
    const double h = 1e-4 * r;
    const double d2 = (b(r + h) - 2.0 * b(r) + b(r - h)) / (h * h);
    const double residual = d2 + 4.0 / r * b.derivative(r) + std::pow(b(r), b.exponent());
    CHECK(std::abs(residual) < 1e-5 * std::abs(d2));
    CHECK(b.derivative(r) == doctest::Approx((b(r + h) - b(r - h)) / (2.0 * h)).epsilon(1e-7));
  }
  CHECK(std::pow(1e4, 3.0) * b(1e4) == doctest::Approx(b.tail_constant()).epsilon(1e-6));
  CHECK_THROWS_AS(AubinTalentiProfile(2), std::invalid_argument);
}

TEST_CASE("dominant terms") {
  CHECK(dominant_term(kA, End::Infinity) == Term::P);
  CHECK(dominant_term(kA, End::Origin) == Term::Q);
  const ProblemParams only_q{5, 2.0, 3.0, 0.0, -0.5, 0.0, 1.0};
  CHECK(dominant_term(only_q, End::Infinity) == Term::Q);
}
