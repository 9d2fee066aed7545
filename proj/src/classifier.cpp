#include "emden/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emden/energy.hpp"
#include "emden/integrator.hpp"

namespace emden {

namespace {

int sign_of(double x) {
  return (x > 0.0) - (x < 0.0);
}

std::size_t strict_sign_changes(const std::vector<State>& samples) {
  std::size_t changes = 0;
  int last = 0;
  for (const State& s : samples) {
    const int sg = sign_of(s.vdot);
    if (sg == 0) {
      continue;
    }
    if (last != 0 && sg != last) {
      ++changes;
    }
    last = sg;
  }
  return changes;
}

struct LineFit {
  double mean = 0.0;
  double slope = 0.0;
  double rms = 0.0;
};

LineFit fit_line(const std::vector<State>& samples) {
  const double count = static_cast<double>(samples.size());
  double t_bar = 0.0;
  double v_bar = 0.0;
  for (const State& s : samples) {
    t_bar += s.t;
    v_bar += s.v;
  }
  t_bar /= count;
  v_bar /= count;
  double stt = 0.0;
  double stv = 0.0;
  for (const State& s : samples) {
    stt += (s.t - t_bar) * (s.t - t_bar);
    stv += (s.t - t_bar) * (s.v - v_bar);
  }
  LineFit fit;
  fit.mean = v_bar;
  fit.slope = stt > 0.0 ? stv / stt : 0.0;
  double ss = 0.0;
  for (const State& s : samples) {
    const double r = s.v - (v_bar + fit.slope * (s.t - t_bar));
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / count);
  return fit;
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  const double count = static_cast<double>(x.size());
  const double x_bar = std::accumulate(x.begin(), x.end(), 0.0) / count;
  const double y_bar = std::accumulate(y.begin(), y.end(), 0.0) / count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - x_bar) * (x[i] - x_bar);
    sxy += (x[i] - x_bar) * (y[i] - y_bar);
  }
  if (sxx == 0.0) {
    throw InsufficientData("fit_exponential_rate: degenerate abscissae");
  }
  return sxy / sxx;
}

struct Extremum {
  double t = 0.0;
  double value = 0.0;
  bool is_max = false;
};

// Vertex of the parabola through three samples; falls back to the middle sample.
double parabola_peak(const State& a, const State& b, const State& c) {
  const double d1 = (b.v - a.v) / (b.t - a.t);
  const double d2 = (c.v - b.v) / (c.t - b.t);
  const double curv = (d2 - d1) / (c.t - a.t);
  if (curv == 0.0) {
    return b.v;
  }
  const double t_star = 0.5 * (a.t + b.t) - d1 / (2.0 * curv);
  if (t_star < a.t || t_star > c.t) {
    return b.v;
  }
  return a.v + d1 * (t_star - a.t) + curv * (t_star - a.t) * (t_star - b.t);
}

// Extrema in increasing t.
std::vector<Extremum> find_extrema(const std::vector<State>& w) {
  std::vector<Extremum> out;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const int s0 = sign_of(w[i].vdot);
    const int s1 = sign_of(w[i + 1].vdot);
    if (s0 == 0 || s1 == 0 || s0 == s1) {
      continue;
    }
    const bool is_max = s0 > 0;
    std::size_t j = i;
    if (is_max ? w[i + 1].v > w[i].v : w[i + 1].v < w[i].v) {
      j = i + 1;
    }
    if (j == 0 || j + 1 >= w.size()) {
      continue;
    }
    out.push_back({w[j].t, parabola_peak(w[j - 1], w[j], w[j + 1]), is_max});
  }
  return out;
}

double mean_of_last(const std::vector<double>& values, std::size_t count, double* spread) {
  const std::size_t k = std::min(count, values.size());
  const auto first = values.end() - static_cast<std::ptrdiff_t>(k);
  const double mean = std::accumulate(first, values.end(), 0.0) / static_cast<double>(k);
  const auto [lo, hi] = std::minmax_element(first, values.end());
  *spread = *hi - *lo;
  return mean;
}

// Ratio of the mean extremum amplitude on the far half of the window to the near half.
double envelope_contraction(const std::vector<State>& w, End end, double centre) {
  std::vector<Extremum> ext = find_extrema(w);
  if (end == End::Origin) {
    std::reverse(ext.begin(), ext.end());
  }
  if (ext.size() < 2) {
    return 1.0;
  }
  const std::size_t half = ext.size() / 2;
  double far = 0.0;
  double near = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    far += std::abs(ext[i].value - centre);
  }
  for (std::size_t i = ext.size() - half; i < ext.size(); ++i) {
    near += std::abs(ext[i].value - centre);
  }
  if (near == 0.0) {
    return far > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return far / near;
}

}  // namespace

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::SlowDecaySingular:
      return "SlowDecaySingular";
    case Kind::FastDecayRegular:
      return "FastDecayRegular";
    case Kind::RegularAtOrigin:
      return "RegularAtOrigin";
    case Kind::Oscillatory:
      return "Oscillatory";
    case Kind::CrossesZero:
      return "CrossesZero";
    case Kind::Undetermined:
      break;
  }
  return "Undetermined";
}

Kind kind_from_string(const std::string& name) {
  for (Kind k : {Kind::SlowDecaySingular, Kind::FastDecayRegular, Kind::RegularAtOrigin,
                 Kind::Oscillatory, Kind::CrossesZero, Kind::Undetermined}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw std::invalid_argument("unknown classification kind: " + name);
}

PowerFit fit_power_tail(const Trajectory& traj, double exponent_hypothesis, const Window& window) {
  std::vector<double> resid;
  for (const State& s : traj.window_samples(window)) {
    const double u = raw_u(s, traj.frame);
    if (!(u > 0.0)) {
      throw std::invalid_argument("fit_power_tail: u must be positive in the window");
    }
    resid.push_back(std::log(u) + exponent_hypothesis * s.t);
  }
  if (resid.empty()) {
    throw InsufficientData("fit_power_tail: empty window");
  }
  const double intercept =
      std::accumulate(resid.begin(), resid.end(), 0.0) / static_cast<double>(resid.size());
  double ss = 0.0;
  for (double r : resid) {
    ss += (r - intercept) * (r - intercept);
  }
  return {std::exp(intercept), std::sqrt(ss / static_cast<double>(resid.size()))};
}

double fit_exponential_rate(const Trajectory& traj, double lambda_target, const Window& window) {
  const std::vector<State> w = traj.window_samples(window);
  if (w.size() < 2) {
    throw InsufficientData("fit_exponential_rate: fewer than two samples in window");
  }
  const double floor = 100.0 * traj.tolerances.atol;
  std::vector<double> ts;
  std::vector<double> logs;
  const int first_sign = sign_of(w.front().v - lambda_target);
  const bool constant_sign = std::all_of(w.begin(), w.end(), [&](const State& s) {
    return sign_of(s.v - lambda_target) == first_sign && first_sign != 0;
  });
  if (constant_sign) {
    for (const State& s : w) {
      const double d = std::abs(s.v - lambda_target);
      if (d < floor) {
        throw RateSaturated("fit_exponential_rate: |v - lambda| below 100 atol in window");
      }
      ts.push_back(s.t);
      logs.push_back(std::log(d));
    }
    return slope_of(ts, logs);
  }

  // Peak of |v - lambda| on each constant-sign run.
  struct Peak {
    double t;
    double value;
  };
  std::vector<Peak> peaks;
  int run_sign = 0;
  Peak best{0.0, -1.0};
  for (const State& s : w) {
    const double d = s.v - lambda_target;
    const int sg = sign_of(d);
    if (sg != run_sign && sg != 0) {
      if (run_sign != 0) {
        peaks.push_back(best);
      }
      run_sign = sg;
      best = {s.t, -1.0};
    }
    if (std::abs(d) > best.value) {
      best = {s.t, std::abs(d)};
    }
  }
  peaks.push_back(best);
  if (peaks.size() > 3) {
    peaks.erase(peaks.begin());
    peaks.pop_back();
  }
  if (peaks.size() < 2) {
    throw InsufficientData("fit_exponential_rate: not enough oscillation peaks");
  }
  for (const Peak& pk : peaks) {
    if (pk.value < floor) {
      throw RateSaturated("fit_exponential_rate: oscillation peaks below 100 atol");
    }
    ts.push_back(pk.t);
    logs.push_back(std::log(pk.value));
  }
  return slope_of(ts, logs);
}

OscillationEnvelope oscillation_envelope(const Trajectory& traj, const DerivedConstants& dc,
                                         End end, std::optional<Window> window) {
  const Frame frame = seed_frame(end, dc);
  const Trajectory scaled = reframe(traj, frame.alpha);
  const Window w = window.value_or(Window{traj.t_min(), traj.t_max()});
  std::vector<Extremum> ext = find_extrema(scaled.window_samples(w));
  if (end == End::Origin) {
    std::reverse(ext.begin(), ext.end());
  }
  OscillationEnvelope env;
  for (const Extremum& e : ext) {
    (e.is_max ? env.maxima_values : env.minima_values).push_back(e.value);
  }
  if (env.minima_values.size() < 3 || env.maxima_values.size() < 3) {
    throw InsufficientData("oscillation_envelope: fewer than three minima or maxima");
  }
  env.mu1 = mean_of_last(env.minima_values, 3, &env.mu1_spread);
  env.mu2 = mean_of_last(env.maxima_values, 3, &env.mu2_spread);

  const RegimeFlags flags = classify_regime(dc.params, dc);
  bool use_b = dominant_term(dc.params, end) == Term::Q;
  if (flags.theorem2_case == Theorem2Case::CriticalQ) {
    use_b = true;
  } else if (flags.theorem2_case == Theorem2Case::CriticalP) {
    use_b = false;
  }
  env.potential = use_b ? "b" : "b1";
  env.b_mu1 = use_b ? potential_b(env.mu1, dc) : potential_b1(env.mu1, dc);
  env.b_mu2 = use_b ? potential_b(env.mu2, dc) : potential_b1(env.mu2, dc);
  return env;
}

ClassificationReport classify_end(const Trajectory& traj, const DerivedConstants& dc, End end,
                                  const ClassifierOptions& options) {
  ClassificationReport report;
  report.end = end;
  if (traj.empty()) {
    throw InsufficientData("classify_end: empty trajectory");
  }
  report.window = options.window.value_or(traj.default_window(end));

  if (traj.direction() != 0 && traj.heading() == end) {
    switch (traj.termination.cause) {
      case Termination::PositivityLost:
        report.kind = Kind::CrossesZero;
        report.fitted_constant = traj.termination.t;
        report.note = "positivity lost at t=" + std::to_string(traj.termination.t);
        return report;
      case Termination::AmplitudeCap:
      case Termination::StepUnderflow:
        report.kind = Kind::Undetermined;
        report.note = "integration stopped early: " + to_string(traj.termination.cause);
        return report;
      case Termination::ReachedSpanEnd:
        break;
    }
  }

  const Term dom = dominant_term(dc.params, end);
  const std::optional<double> lambda = dc.lambda_for(dom);
  const Trajectory scaled = reframe(traj, dc.alpha_for(dom));
  const std::vector<State> w = scaled.window_samples(report.window);
  if (w.size() < options.min_samples) {
    throw InsufficientData("classify_end: window holds " + std::to_string(w.size()) +
                           " samples, need " + std::to_string(options.min_samples));
  }

  const LineFit line = fit_line(w);
  const auto [lo_it, hi_it] =
      std::minmax_element(w.begin(), w.end(), [](const State& a, const State& b) { return a.v < b.v; });
  const double rel_amp = line.mean > 0.0 ? (hi_it->v - lo_it->v) / line.mean
                                         : std::numeric_limits<double>::infinity();
  const std::size_t changes = strict_sign_changes(w);

  bool decaying_spiral = false;
  if (changes >= 3 && rel_amp > options.amplitude_threshold) {
    const double contraction = envelope_contraction(w, end, line.mean);
    if (contraction > options.contraction_factor) {
      decaying_spiral = true;
    } else {
      report.kind = Kind::Oscillatory;
      report.residual = rel_amp;
      report.fitted_constant = line.mean;
      try {
        report.envelope = oscillation_envelope(traj, dc, end, report.window);
        report.fitted_constant = 0.5 * (report.envelope->mu1 + report.envelope->mu2);
      } catch (const InsufficientData& e) {
        report.note = e.what();
      }
      return report;
    }
  }

  if (lambda) {
    const bool flat = decaying_spiral || std::abs(line.slope) < options.slope_threshold;
    if (flat && std::abs(line.mean - *lambda) < options.tol_class * *lambda) {
      report.kind = Kind::SlowDecaySingular;
      report.fitted_constant = line.mean;
      report.residual = line.rms;
      if (decaying_spiral) {
        report.note = "decaying spiral around lambda";
      }
      try {
        report.rate = fit_exponential_rate(scaled, *lambda, report.window);
      } catch (const std::runtime_error&) {
        report.rate.reset();
      }
      return report;
    }
  }

  const double hypothesis = end == End::Infinity ? dc.params.n - 2.0 : 0.0;
  if (std::all_of(w.begin(), w.end(), [](const State& s) { return s.v > 0.0; })) {
    const PowerFit fit = fit_power_tail(traj, hypothesis, report.window);
    if (fit.residual < options.power_residual) {
      report.kind = end == End::Infinity ? Kind::FastDecayRegular : Kind::RegularAtOrigin;
      report.fitted_constant = fit.coefficient;
      report.residual = fit.residual;
      return report;
    }
    report.residual = fit.residual;
  }

  report.kind = Kind::Undetermined;
  report.fitted_constant = line.mean;
  report.note = "no decision rule matched";
  return report;
}

}  // namespace emden
