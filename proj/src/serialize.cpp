#include "emden/serialize.hpp"

#include <cmath>

namespace emden {

namespace {

json number(double x) {
  if (!std::isfinite(x)) {
    return nullptr;
  }
  return x;
}

json optional_number(const std::optional<double>& x) {
  return x ? number(*x) : json(nullptr);
}

}  // namespace

void to_json(json& j, const ProblemParams& p) {
  j = json{{"n", p.n}, {"p", p.p}, {"q", p.q}, {"l1", p.l1}, {"l2", p.l2}, {"k1", p.k1}, {"k2", p.k2}};
}

void from_json(const json& j, ProblemParams& p) {
  p.n = j.at("n").get<int>();
  p.p = j.at("p").get<double>();
  p.q = j.at("q").get<double>();
  p.l1 = j.at("l1").get<double>();
  p.l2 = j.at("l2").get<double>();
  p.k1 = j.value("k1", 1.0);
  p.k2 = j.value("k2", 1.0);
}

void to_json(json& j, const DerivedConstants& dc) {
  j = json{{"alpha1", number(dc.alpha1)},
           {"alpha2", number(dc.alpha2)},
           {"lambda1", optional_number(dc.lambda1)},
           {"lambda2", optional_number(dc.lambda2)},
           {"serrin1", number(dc.serrin1)},
           {"sobolev1", number(dc.sobolev1)},
           {"sobolev2", number(dc.sobolev2)},
           {"c1coef", number(dc.c1coef)},
           {"c2coef", number(dc.c2coef)},
           {"delta", number(dc.delta)},
           {"delta2", number(dc.delta2)},
           {"omega_sq", number(dc.omega_sq)},
           {"omega", optional_number(dc.omega())}};
}

void to_json(json& j, const RegimeFlags& flags) {
  j = json{{"theorem1_applies", flags.theorem1_applies},
           {"theorem2_case", to_string(flags.theorem2_case)},
           {"theorem3_case", to_string(flags.theorem3_case)},
           {"criticality_margins",
            {{"p_minus_sobolev1", number(flags.margins.p_minus_sobolev1)},
             {"q_minus_sobolev2", number(flags.margins.q_minus_sobolev2)},
             {"p_minus_serrin1", number(flags.margins.p_minus_serrin1)},
             {"q_sobolev2_distance", number(flags.margins.q_sobolev2_distance)}}}};
}

void to_json(json& j, const Window& w) {
  j = json{{"t_lo", number(w.t_lo)}, {"t_hi", number(w.t_hi)}};
}

void to_json(json& j, const OscillationEnvelope& env) {
  j = json{{"minima_values", env.minima_values},
           {"maxima_values", env.maxima_values},
           {"mu1", number(env.mu1)},
           {"mu2", number(env.mu2)},
           {"mu1_spread", number(env.mu1_spread)},
           {"mu2_spread", number(env.mu2_spread)},
           {"b_mu1", number(env.b_mu1)},
           {"b_mu2", number(env.b_mu2)},
           {"potential", env.potential}};
}

void to_json(json& j, const ClassificationReport& report) {
  j = json{{"end", to_string(report.end)},
           {"kind", to_string(report.kind)},
           {"fitted_constant", number(report.fitted_constant)},
           {"residual", number(report.residual)},
           {"rate", optional_number(report.rate)},
           {"envelope", report.envelope ? json(*report.envelope) : json(nullptr)},
           {"window", report.window},
           {"note", report.note}};
}

void to_json(json& j, const ShotResult& shot) {
  j = json{{"a", number(shot.a)},
           {"termination", to_string(shot.trajectory.termination.cause)},
           {"termination_t", number(shot.trajectory.termination.t)},
           {"report", shot.report},
           {"error", shot.error}};
}

void to_json(json& j, const Bisection& b) {
  j = json{{"a_lo", number(b.a_lo)},
           {"a_hi", number(b.a_hi)},
           {"a_star", number(b.a_star)},
           {"kind_lo", to_string(b.kind_lo)},
           {"kind_hi", to_string(b.kind_hi)},
           {"relative_width", number(b.relative_width())},
           {"iterations", b.iterations},
           {"threshold_report", b.threshold_report}};
}

void to_json(json& j, const ThresholdScan& scan) {
  json shots = json::array();
  for (std::size_t i = 0; i < scan.grid.size(); ++i) {
    shots.push_back({{"a", number(scan.grid[i])},
                     {"kind", to_string(scan.kinds[i])},
                     {"report", scan.reports[i]},
                     {"error", scan.errors[i]}});
  }
  j = json{{"points", scan.grid.size()},
           {"boundary_count", scan.boundaries.size()},
           {"boundaries", scan.boundaries},
           {"shots", shots}};
}

void to_json(json& j, const ConnectingOrbit& orbit) {
  j = json{{"seeded_end", to_string(orbit.seeded_end)},
           {"eps", number(orbit.eps)},
           {"seed", {{"t", number(orbit.seed.t)}, {"v", number(orbit.seed.v)}, {"vdot", number(orbit.seed.vdot)}}},
           {"frame_alpha", number(orbit.trajectory.frame.alpha)},
           {"samples", orbit.trajectory.size()},
           {"termination", to_string(orbit.trajectory.termination.cause)},
           {"near_report", orbit.near_report},
           {"far_report", orbit.far_report}};
}

void to_json(json& j, const DifferenceProbe& probe) {
  j = json{{"window", probe.window},
           {"max_difference", number(probe.max_difference)},
           {"saturated", probe.saturated},
           {"rate", optional_number(probe.rate)}};
}

void to_json(json& j, const BoundReport& report) {
  j = json{{"applicable", report.applicable},
           {"reason", report.reason},
           {"end", to_string(report.end)},
           {"window", report.window},
           {"frame_alpha", number(report.frame_alpha)},
           {"sup_v_tail", number(report.sup_v_tail)},
           {"sup_rv1prime", number(report.sup_rv1prime)},
           {"integral_weighted_vprime_sq", number(report.integral_weighted_vprime_sq)},
           {"monotone_mean_ok", report.monotone_mean_ok},
           {"monotone_worst_step", number(report.monotone_worst_step)}};
}

json exponents_json(const ProblemParams& params, double eps_crit) {
  const DerivedConstants dc = derive_constants(params);
  return json{{"params", params},
              {"constants", dc},
              {"regime", classify_regime(params, dc, eps_crit)}};
}

}  // namespace emden
