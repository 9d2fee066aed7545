#include "emden/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace emden {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void reject(const std::string& what) {
  throw std::invalid_argument("invalid problem parameters: " + what);
}

bool is_toggle(double k) { return k == 0.0 || k == 1.0; }

std::optional<double> lambda_value(int n, double alpha, double exponent) {
  const double product = alpha * (n - 2 - alpha);
  if (!(product > 0.0) || !std::isfinite(product)) {
    return std::nullopt;
  }
  return std::pow(product, 1.0 / (exponent - 1.0));
}

}  // namespace

Term dominant_term(const ProblemParams& params, End end) {
  if (!params.q_active()) {
    return Term::P;
  }
  if (!params.p_active()) {
    return Term::Q;
  }
  return end == End::Infinity ? Term::P : Term::Q;
}

void ProblemParams::validate() const {
  if (n < 3) {
    reject("dimension n must be >= 3");
  }
  for (double x : {p, q, l1, l2, k1, k2}) {
    if (!std::isfinite(x)) {
      reject("all fields must be finite");
    }
  }
  if (!is_toggle(k1) || !is_toggle(k2)) {
    reject("k1 and k2 must be 0 or 1");
  }
  if (!p_active() && !q_active()) {
    reject("at least one power term must be active");
  }
  if (two_term()) {
    if (!(p > 1.0)) {
      reject("p must exceed 1");
    }
    if (!(p < q)) {
      reject("p < q is required");
    }
    if (!(-2.0 < l2 && l2 < l1 && l1 <= 0.0)) {
      reject("-2 < l2 < l1 <= 0 is required");
    }
    return;
  }
  const double exponent = p_active() ? p : q;
  const double weight = p_active() ? l1 : l2;
  if (!(exponent > 1.0)) {
    reject("active exponent must exceed 1");
  }
  if (!(weight > -2.0)) {
    reject("active weight exponent must exceed -2");
  }
}

double DerivedConstants::frame_exp(double alpha, Term term) const {
  if (term == Term::P) {
    return params.l1 - (params.p - 1.0) * alpha + 2.0;
  }
  return params.l2 - (params.q - 1.0) * alpha + 2.0;
}

std::optional<double> DerivedConstants::omega() const {
  if (omega_sq > 0.0) {
    return std::sqrt(omega_sq);
  }
  return std::nullopt;
}

double DerivedConstants::lambda1_or_throw() const {
  if (!lambda1) {
    throw UndefinedLambda("lambda1 undefined: alpha1 (n-2-alpha1) <= 0");
  }
  return *lambda1;
}

double DerivedConstants::lambda2_or_throw() const {
  if (!lambda2) {
    throw UndefinedLambda("lambda2 undefined: alpha2 (n-2-alpha2) <= 0");
  }
  return *lambda2;
}

DerivedConstants derive_constants(const ProblemParams& params) {
  params.validate();
  DerivedConstants dc;
  dc.params = params;
  const int n = params.n;
  const double nm2 = n - 2.0;

  dc.alpha1 = params.p != 1.0 ? (2.0 + params.l1) / (params.p - 1.0) : kNaN;
  dc.alpha2 = params.q != 1.0 ? (2.0 + params.l2) / (params.q - 1.0) : kNaN;
  dc.lambda1 = lambda_value(n, dc.alpha1, params.p);
  dc.lambda2 = lambda_value(n, dc.alpha2, params.q);

  dc.serrin1 = (n + params.l1) / nm2;
  dc.sobolev1 = (n + 2.0 + 2.0 * params.l1) / nm2;
  dc.sobolev2 = (n + 2.0 + 2.0 * params.l2) / nm2;
  dc.c1coef = nm2 - 2.0 * dc.alpha1;
  dc.c2coef = nm2 - 2.0 * dc.alpha2;
  dc.delta = (2.0 + params.l1) * (1.0 - params.q) / (params.p - 1.0) + 2.0 + params.l2;
  dc.delta2 = (params.p - 1.0) * (dc.alpha1 - dc.alpha2);
  dc.omega_sq = (2.0 + params.l1) * (nm2 - dc.alpha1) - 0.25 * dc.c1coef * dc.c1coef;
  return dc;
}

RegimeFlags classify_regime(const ProblemParams& params, const DerivedConstants& dc,
                            double eps_crit) {
  RegimeFlags flags;
  const double p = params.p;
  const double q = params.q;
  flags.margins.p_minus_sobolev1 = p - dc.sobolev1;
  flags.margins.q_minus_sobolev2 = q - dc.sobolev2;
  flags.margins.p_minus_serrin1 = p - dc.serrin1;
  flags.margins.q_sobolev2_distance = std::abs(q - dc.sobolev2);

  const bool critical_q = std::abs(q - dc.sobolev2) <= eps_crit;
  const bool critical_p = std::abs(p - dc.sobolev1) <= eps_crit;
  if (critical_q) {
    flags.theorem2_case = Theorem2Case::CriticalQ;
  } else if (critical_p) {
    flags.theorem2_case = Theorem2Case::CriticalP;
  }

  const bool weights_ok =
      params.two_term() && -2.0 < params.l2 && params.l2 < params.l1 && params.l1 <= 0.0;
  if (!weights_ok) {
    return flags;
  }
  const bool above_serrin = dc.serrin1 < p && p < q;
  flags.theorem1_applies = above_serrin && !critical_p && !critical_q;

  if (above_serrin && q < dc.sobolev2 && !critical_q) {
    flags.theorem3_case = Theorem3Case::SingularAtInfinity;
  } else if (dc.sobolev1 < p && p < q && !critical_q) {
    flags.theorem3_case = Theorem3Case::SingularAtOrigin;
  }
  return flags;
}

SingularProfile exact_single_term_singular(int n, double l, double exponent) {
  if (n < 3 || !(exponent > 1.0)) {
    throw std::invalid_argument("exact_single_term_singular: need n >= 3 and exponent > 1");
  }
  SingularProfile profile;
  profile.alpha = (2.0 + l) / (exponent - 1.0);
  const auto lambda = lambda_value(n, profile.alpha, exponent);
  if (!lambda) {
    std::ostringstream msg;
    msg << "exact_single_term_singular: alpha (n-2-alpha) <= 0 for n=" << n << " l=" << l
        << " exponent=" << exponent;
    throw UndefinedLambda(msg.str());
  }
  profile.lambda = *lambda;
  return profile;
}

AubinTalentiProfile::AubinTalentiProfile(int n) : n_(n), scale_(0.0) {
  if (n < 3) {
    throw std::invalid_argument("aubin_talenti_profile: n must be >= 3");
  }
  scale_ = std::pow(static_cast<double>(n) * (n - 2), (n - 2) / 4.0);
}

double AubinTalentiProfile::exponent() const {
  return (n_ + 2.0) / (n_ - 2.0);
}

double AubinTalentiProfile::operator()(double r) const {
  return scale_ * std::pow(1.0 + r * r, -(n_ - 2) / 2.0);
}

double AubinTalentiProfile::derivative(double r) const {
  return -scale_ * (n_ - 2) * r * std::pow(1.0 + r * r, -n_ / 2.0);
}

AubinTalentiProfile aubin_talenti_profile(int n) {
  return AubinTalentiProfile(n);
}

std::string to_string(Theorem2Case c) {
  switch (c) {
    case Theorem2Case::CriticalQ:
      return "critical_q";
    case Theorem2Case::CriticalP:
      return "critical_p";
    case Theorem2Case::None:
      break;
  }
  return "none";
}

std::string to_string(Theorem3Case c) {
  switch (c) {
    case Theorem3Case::SingularAtInfinity:
      return "singular_at_infinity";
    case Theorem3Case::SingularAtOrigin:
      return "singular_at_origin";
    case Theorem3Case::None:
      break;
  }
  return "none";
}

}  // namespace emden
