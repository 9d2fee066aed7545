#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace emden {

/// Coefficients of the radial equation
///   u'' + (n-1)/r u' + k1 r^l1 u^p + k2 r^l2 u^q = 0.
///
/// k1/k2 switch individual power terms off to obtain single-term equations
/// with closed-form solutions. Everything keyed to the two-term theory
/// requires k1 = k2 = 1.
struct ProblemParams {
  int n = 3;
  double p = 2.0;
  double q = 3.0;
  double l1 = 0.0;
  double l2 = -1.0;
  double k1 = 1.0;
  double k2 = 1.0;

  [[nodiscard]] bool p_active() const { return k1 != 0.0; }
  [[nodiscard]] bool q_active() const { return k2 != 0.0; }
  [[nodiscard]] bool two_term() const { return p_active() && q_active(); }

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;
};

enum class Term { P, Q };

enum class End { Origin, Infinity };

/// Term whose weight balances the Laplacian at the given end: the p-term at
/// infinity and the q-term at the origin, or the only active term.
[[nodiscard]] Term dominant_term(const ProblemParams& params, End end);

/// Raised when lambda = [alpha (n-2-alpha)]^{1/(k-1)} has no real value.
class UndefinedLambda : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct DerivedConstants {
  ProblemParams params;

  double alpha1 = 0.0;
  double alpha2 = 0.0;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  double serrin1 = 0.0;
  double sobolev1 = 0.0;
  double sobolev2 = 0.0;
  double c1coef = 0.0;
  double c2coef = 0.0;
  double delta = 0.0;
  double delta2 = 0.0;
  double omega_sq = 0.0;

  /// Exponent multiplying t in front of the given power term after the
  /// substitution v = r^alpha u, t = ln r.
  [[nodiscard]] double frame_exp(double alpha, Term term) const;

  /// sqrt(omega_sq) when the linearisation at lambda1 is a spiral.
  [[nodiscard]] std::optional<double> omega() const;

  [[nodiscard]] double lambda1_or_throw() const;
  [[nodiscard]] double lambda2_or_throw() const;

  [[nodiscard]] double alpha_for(Term term) const { return term == Term::P ? alpha1 : alpha2; }
  [[nodiscard]] std::optional<double> lambda_for(Term term) const {
    return term == Term::P ? lambda1 : lambda2;
  }
  [[nodiscard]] double exponent_for(Term term) const {
    return term == Term::P ? params.p : params.q;
  }
};

/// Rejects p = 1 or q = 1 for active terms. Inactive terms still get their
/// constants when the exponent allows it; otherwise those fields are NaN.
[[nodiscard]] DerivedConstants derive_constants(const ProblemParams& params);

enum class Theorem2Case { None, CriticalQ, CriticalP };
enum class Theorem3Case { None, SingularAtInfinity, SingularAtOrigin };

struct CriticalityMargins {
  double p_minus_sobolev1 = 0.0;
  double q_minus_sobolev2 = 0.0;
  double p_minus_serrin1 = 0.0;
  double q_sobolev2_distance = 0.0;
};

struct RegimeFlags {
  bool theorem1_applies = false;
  Theorem2Case theorem2_case = Theorem2Case::None;
  Theorem3Case theorem3_case = Theorem3Case::None;
  CriticalityMargins margins;
};

inline constexpr double kDefaultEpsCrit = 1e-12;

[[nodiscard]] RegimeFlags classify_regime(const ProblemParams& params,
                                          const DerivedConstants& dc,
                                          double eps_crit = kDefaultEpsCrit);

struct SingularProfile {
  double alpha = 0.0;
  double lambda = 0.0;
};

/// u(r) = lambda r^{-alpha} solving  Delta u + r^l u^exponent = 0  in R^n \ {0}.
[[nodiscard]] SingularProfile exact_single_term_singular(int n, double l, double exponent);

/// Ground state (n(n-2))^{(n-2)/4} (1+r^2)^{-(n-2)/2} of Delta u + u^{(n+2)/(n-2)} = 0.
class AubinTalentiProfile {
 public:
  explicit AubinTalentiProfile(int n);

  [[nodiscard]] double operator()(double r) const;
  [[nodiscard]] double derivative(double r) const;
  /// lim r^{n-2} u(r).
  [[nodiscard]] double tail_constant() const { return scale_; }
  [[nodiscard]] double exponent() const;
  [[nodiscard]] int dimension() const { return n_; }

 private:
  int n_;
  double scale_;
};

[[nodiscard]] AubinTalentiProfile aubin_talenti_profile(int n);

[[nodiscard]] std::string to_string(Theorem2Case c);
[[nodiscard]] std::string to_string(Theorem3Case c);

}  // namespace emden
