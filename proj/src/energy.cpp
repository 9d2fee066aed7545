#include "emden/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "emden/integrator.hpp"

namespace emden {

namespace {

double frame_linear(const DerivedConstants& dc, double alpha) {
  return alpha * (dc.params.n - 2.0 - alpha);
}

double potential(double v, double exponent, double linear) {
  return std::pow(v, exponent + 1.0) / (exponent + 1.0) - 0.5 * linear * v * v;
}

double signed_pow(double v, double k) {
  return v >= 0.0 ? std::pow(v, k) : -std::pow(-v, k);
}

bool same_alpha(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

// Which power term is autonomous in the trajectory's frame.
Term autonomous_term(const Trajectory& traj, const DerivedConstants& dc) {
  const double alpha = traj.frame.alpha;
  if (dc.params.p_active() && same_alpha(alpha, dc.alpha1)) {
    return Term::P;
  }
  if (dc.params.q_active() && same_alpha(alpha, dc.alpha2)) {
    return Term::Q;
  }
  throw std::invalid_argument("energy_trace: trajectory frame must be alpha1 or alpha2");
}

PotentialShape shape(double exponent, double linear) {
  PotentialShape s;
  s.critical_point = std::pow(linear, 1.0 / (exponent - 1.0));
  s.second_zero = std::pow(0.5 * (exponent + 1.0) * linear, 1.0 / (exponent - 1.0));
  s.minimum_value = potential(s.critical_point, exponent, linear);
  return s;
}

double trapezoid(std::span<const State> samples) {
  double sum = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double h = samples[i].t - samples[i - 1].t;
    sum += 0.5 * h * (samples[i].vdot * samples[i].vdot + samples[i - 1].vdot * samples[i - 1].vdot);
  }
  return std::abs(sum);
}

End end_of_window(const Trajectory& traj, const Window& w) {
  const double mid = 0.5 * (w.t_lo + w.t_hi);
  return mid >= 0.5 * (traj.t_min() + traj.t_max()) ? End::Infinity : End::Origin;
}

}  // namespace

double potential_b(double v, const DerivedConstants& dc) {
  static_cast<void>(dc.lambda2_or_throw());
  return potential(v, dc.params.q, frame_linear(dc, dc.alpha2));
}

double potential_b1(double v, const DerivedConstants& dc) {
  static_cast<void>(dc.lambda1_or_throw());
  return potential(v, dc.params.p, frame_linear(dc, dc.alpha1));
}

double potential_b_slope(double v, const DerivedConstants& dc) {
  static_cast<void>(dc.lambda2_or_throw());
  return std::pow(v, dc.params.q) - frame_linear(dc, dc.alpha2) * v;
}

double potential_b1_slope(double v, const DerivedConstants& dc) {
  static_cast<void>(dc.lambda1_or_throw());
  return std::pow(v, dc.params.p) - frame_linear(dc, dc.alpha1) * v;
}

PotentialShape potential_b_shape(const DerivedConstants& dc) {
  static_cast<void>(dc.lambda2_or_throw());
  return shape(dc.params.q, frame_linear(dc, dc.alpha2));
}

PotentialShape potential_b1_shape(const DerivedConstants& dc) {
  static_cast<void>(dc.lambda1_or_throw());
  return shape(dc.params.p, frame_linear(dc, dc.alpha1));
}

double EnergyTrace::relative_residual() const {
  if (energy_scale == 0.0) {
    return balance_residual == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return balance_residual / energy_scale;
}

EnergyTrace energy_trace(const Trajectory& traj, const DerivedConstants& dc,
                         std::optional<Window> window) {
  const Term term = autonomous_term(traj, dc);
  const Term other = term == Term::P ? Term::Q : Term::P;
  const ProblemParams& params = dc.params;
  const double alpha = traj.frame.alpha;
  const double linear = frame_linear(dc, alpha);
  const double k = dc.exponent_for(term);
  const double damping = params.n - 2.0 - 2.0 * alpha;
  const double other_coef = other == Term::P ? params.k1 : params.k2;
  const double m = dc.exponent_for(other);
  const double beta = dc.frame_exp(alpha, other);

  std::vector<State> samples;
  if (window) {
    if (window->length() <= 0.0) {
      return {};
    }
    for (const State& s : traj.samples) {
      if (window->contains(s.t)) {
        samples.push_back(s);
      }
    }
  } else {
    samples = traj.samples;
  }

  EnergyTrace trace;
  if (samples.empty()) {
    return trace;
  }

  auto accel = [&](const State& s) {
    double a = -damping * s.vdot + linear * s.v - signed_pow(s.v, k);
    if (other_coef != 0.0) {
      a -= other_coef * std::exp(beta * s.t) * signed_pow(s.v, m);
    }
    return a;
  };
  // Forcing work by parts: the boundary term is exact and the remaining integrand
  // e^{beta t}|v|^{m+1} stays smooth where v reaches zero.
  struct Integrands {
    double damp, damp_dt, rest, rest_dt, boundary;
  };
  auto integrands = [&](const State& s) {
    const double vddot = accel(s);
    Integrands out{};
    out.damp = damping * s.vdot * s.vdot;
    out.damp_dt = 2.0 * damping * s.vdot * vddot;
    if (other_coef != 0.0) {
      const double e = other_coef * std::exp(beta * s.t);
      const double vm1 = std::pow(std::abs(s.v), m + 1.0);
      out.boundary = e * vm1 / (m + 1.0);
      out.rest = -beta * out.boundary;
      out.rest_dt = -beta * (beta * out.boundary + e * signed_pow(s.v, m) * s.vdot);
    }
    return out;
  };

  const std::size_t count = samples.size();
  trace.t.resize(count);
  trace.E.resize(count);
  trace.damping_work.assign(count, 0.0);
  trace.forcing_work.assign(count, 0.0);
  const Integrands first = integrands(samples[0]);
  Integrands prev = first;
  double rest = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const State& s = samples[i];
    trace.t[i] = s.t;
    trace.E[i] = 0.5 * s.vdot * s.vdot - 0.5 * linear * s.v * s.v +
                 std::pow(std::abs(s.v), k + 1.0) / (k + 1.0);
    if (i == 0) {
      continue;
    }
    const Integrands cur = integrands(s);
    const double h = s.t - samples[i - 1].t;
    const double h2 = h * h / 12.0;
    trace.damping_work[i] = trace.damping_work[i - 1] + 0.5 * h * (prev.damp + cur.damp) +
                            h2 * (prev.damp_dt - cur.damp_dt);
    rest += 0.5 * h * (prev.rest + cur.rest) + h2 * (prev.rest_dt - cur.rest_dt);
    trace.forcing_work[i] = cur.boundary - first.boundary + rest;
    prev = cur;
  }

  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double balance = trace.E[i] + trace.damping_work[i] + trace.forcing_work[i] - trace.E[0];
    lo = std::min(lo, balance);
    hi = std::max(hi, balance);
    trace.energy_scale = std::max(trace.energy_scale, std::abs(trace.E[i]));
  }
  trace.balance_residual = hi - lo;
  return trace;
}

BoundReport apriori_bound_report(const Trajectory& traj, const DerivedConstants& dc,
                                 const Window& window) {
  if (traj.empty() || window.t_lo < traj.t_min() || window.t_hi > traj.t_max() ||
      !(window.t_lo < window.t_hi)) {
    throw std::out_of_range("apriori_bound_report: window outside the trajectory span");
  }
  BoundReport report;
  report.window = window;
  report.end = end_of_window(traj, window);
  if (traj.termination.cause == Termination::PositivityLost) {
    report.applicable = false;
    report.reason = "trajectory loses positivity; bounds concern positive solutions only";
    return report;
  }
  const Frame frame = seed_frame(report.end, dc);
  report.frame_alpha = frame.alpha;
  const Trajectory scaled = reframe(traj, frame.alpha);
  const std::vector<State> samples = scaled.window_samples(window);
  if (samples.size() < 2) {
    throw std::out_of_range("apriori_bound_report: window holds fewer than two samples");
  }
  for (const State& s : samples) {
    report.sup_v_tail = std::max(report.sup_v_tail, s.v);
    report.sup_rv1prime = std::max(report.sup_rv1prime, std::abs(s.vdot));
  }
  report.integral_weighted_vprime_sq = trapezoid(samples);
  const MonotoneCheck mono = rn2u_nondecreasing(traj, window);
  report.monotone_mean_ok = mono.ok;
  report.monotone_worst_step = mono.worst_violation;
  return report;
}

std::vector<double> windowed_vdot_sq_integrals(const Trajectory& traj, const DerivedConstants& dc,
                                               End end, std::span<const double> starts,
                                               double width) {
  const Trajectory scaled = reframe(traj, seed_frame(end, dc).alpha);
  std::vector<double> out;
  out.reserve(starts.size());
  for (double s : starts) {
    const std::vector<State> w = scaled.window_samples({s, s + width});
    out.push_back(trapezoid(w));
  }
  return out;
}

namespace {

MonotoneCheck check_monotone(const std::vector<double>& values, bool increasing, double rel_tol) {
  MonotoneCheck check;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double step = increasing ? values[i] - values[i - 1] : values[i - 1] - values[i];
    const double scale = std::max(std::abs(values[i - 1]), std::abs(values[i]));
    ++check.checked_steps;
    if (step < 0.0 && scale > 0.0) {
      const double rel = -step / scale;
      check.worst_violation = std::max(check.worst_violation, rel);
      if (rel > rel_tol) {
        check.ok = false;
      }
    }
  }
  return check;
}

}  // namespace

MonotoneCheck flux_nonincreasing(const Trajectory& traj, double rel_tol) {
  std::vector<State> samples = traj.samples;
  if (traj.direction() < 0) {
    std::reverse(samples.begin(), samples.end());
  }
  const double nm2 = traj.params.n - 2.0;
  std::vector<double> flux;
  flux.reserve(samples.size());
  for (const State& s : samples) {
    flux.push_back(std::exp(nm2 * s.t) * raw_du_dt(s, traj.frame));
  }
  return check_monotone(flux, false, rel_tol);
}

MonotoneCheck rn2u_nondecreasing(const Trajectory& traj, const Window& window, double rel_tol) {
  const double nm2 = traj.params.n - 2.0;
  std::vector<double> values;
  for (const State& s : traj.window_samples(window)) {
    values.push_back(std::exp(nm2 * s.t) * raw_u(s, traj.frame));
  }
  return check_monotone(values, true, rel_tol);
}

}  // namespace emden
