#include "emden/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace emden {

namespace {

// Dormand-Prince 8(5,3) tableau (Hairer, Norsett & Wanner, DOP853).
constexpr std::array<double, 12> kC = {
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0};

constexpr double kA[12][12] = {
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0},
    {0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0},
    {-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0},
    {2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0}};

constexpr std::array<double, 12> kB = {
    0.054293734116568765,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    0.3111643669578199,
    -0.1521609496625161,
    0.20136540080403034,
    0.04471061572777259};

constexpr std::array<double, 12> kE3 = {
    -0.18980075407240762,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    -0.4226823213237919,
    -0.1521609496625161,
    0.20136540080403034,
    0.02265179219836082};

constexpr std::array<double, 12> kE5 = {
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294};

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kErrorExponent = -1.0 / 8.0;
constexpr int kMaxRejectsPerStep = 200;

using Vec2 = std::array<double, 2>;

// v^k continued oddly to v < 0 so that trial stages across a zero stay defined.
double signed_pow(double v, double k) {
  if (v >= 0.0) {
    return std::pow(v, k);
  }
  return -std::pow(-v, k);
}

class RadialRhs {
 public:
  RadialRhs(const Frame& frame, const ProblemParams& params)
      : damping_(params.n - 2.0 - 2.0 * frame.alpha),
        linear_(frame.alpha * (params.n - 2.0 - frame.alpha)),
        k1_(params.k1),
        k2_(params.k2),
        p_(params.p),
        q_(params.q),
        beta1_(params.l1 - (params.p - 1.0) * frame.alpha + 2.0),
        beta2_(params.l2 - (params.q - 1.0) * frame.alpha + 2.0) {}

  Vec2 operator()(double t, const Vec2& y) const {
    const double v = y[0];
    double accel = -damping_ * y[1] + linear_ * v;
    if (k1_ != 0.0) {
      accel -= k1_ * std::exp(beta1_ * t) * signed_pow(v, p_);
    }
    if (k2_ != 0.0) {
      accel -= k2_ * std::exp(beta2_ * t) * signed_pow(v, q_);
    }
    return {y[1], accel};
  }

 private:
  double damping_;
  double linear_;
  double k1_;
  double k2_;
  double p_;
  double q_;
  double beta1_;
  double beta2_;
};

bool finite(const Vec2& y) {
  return std::isfinite(y[0]) && std::isfinite(y[1]);
}

struct StepOutcome {
  Vec2 y{};
  double error_norm = 0.0;
  bool finite = true;
};

class Dop853Stepper {
 public:
  Dop853Stepper(const RadialRhs& rhs, const IntegratorConfig& cfg) : rhs_(rhs), cfg_(cfg) {}

  StepOutcome step(double t, const Vec2& y, const Vec2& f0, double h) const {
    std::array<Vec2, 12> k{};
    k[0] = f0;
    for (std::size_t s = 1; s < 12; ++s) {
      Vec2 ys = y;
      for (std::size_t j = 0; j < s; ++j) {
        const double a = kA[s][j];
        if (a != 0.0) {
          ys[0] += h * a * k[j][0];
          ys[1] += h * a * k[j][1];
        }
      }
      k[s] = rhs_(t + kC[s] * h, ys);
      if (!finite(k[s])) {
        return {{}, std::numeric_limits<double>::infinity(), false};
      }
    }
    StepOutcome out;
    out.y = y;
    Vec2 err5{};
    Vec2 err3{};
    for (std::size_t j = 0; j < 12; ++j) {
      for (std::size_t c = 0; c < 2; ++c) {
        out.y[c] += h * kB[j] * k[j][c];
        err5[c] += kE5[j] * k[j][c];
        err3[c] += kE3[j] * k[j][c];
      }
    }
    if (!finite(out.y)) {
      return {{}, std::numeric_limits<double>::infinity(), false};
    }
    double e5 = 0.0;
    double e3 = 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
      const double scale = cfg_.atol + cfg_.rtol * std::max(std::abs(y[c]), std::abs(out.y[c]));
      e5 += (err5[c] / scale) * (err5[c] / scale);
      e3 += (err3[c] / scale) * (err3[c] / scale);
    }
    if (e5 == 0.0 && e3 == 0.0) {
      out.error_norm = 0.0;
    } else {
      out.error_norm = std::abs(h) * e5 / std::sqrt((e5 + 0.01 * e3) * 2.0);
    }
    return out;
  }

 private:
  const RadialRhs& rhs_;
  const IntegratorConfig& cfg_;
};

double rms_scaled(const Vec2& x, const Vec2& y, const IntegratorConfig& cfg) {
  double sum = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    const double scale = cfg.atol + cfg.rtol * std::abs(y[c]);
    sum += (x[c] / scale) * (x[c] / scale);
  }
  return std::sqrt(sum / 2.0);
}

// Hairer's starting step heuristic.
double initial_step(const RadialRhs& rhs, double t, const Vec2& y, const Vec2& f0,
                    const IntegratorConfig& cfg, double span) {
  const double d0 = rms_scaled(y, y, cfg);
  const double d1 = rms_scaled(f0, y, cfg);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  const Vec2 y1{y[0] + h0 * f0[0], y[1] + h0 * f0[1]};
  const Vec2 f1 = rhs(t + h0, y1);
  const Vec2 df{(f1[0] - f0[0]) / h0, (f1[1] - f0[1]) / h0};
  const double d2 = finite(df) ? rms_scaled(df, y, cfg) : std::numeric_limits<double>::infinity();
  double h1 = 0.0;
  if (std::max(d1, d2) <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
  }
  return std::min({100.0 * h0, h1, cfg.max_step, span});
}

// Quintic Hermite interpolant of v on a step, in the unit variable s in [0, 1].
class StepInterpolant {
 public:
  StepInterpolant(double h, const Vec2& y0, const Vec2& f0, const Vec2& y1, const Vec2& f1)
      : v0_(y0[0]), d0_(h * f0[0]), a0_(h * h * f0[1]), v1_(y1[0]), d1_(h * f1[0]),
        a1_(h * h * f1[1]) {}

  double operator()(double s) const {
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double s4 = s3 * s;
    const double s5 = s4 * s;
    const double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    const double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    const double h2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    const double h3 = 10 * s3 - 15 * s4 + 6 * s5;
    const double h4 = -4 * s3 + 7 * s4 - 3 * s5;
    const double h5 = 0.5 * (s3 - 2 * s4 + s5);
    return h0 * v0_ + h1 * d0_ + h2 * a0_ + h3 * v1_ + h4 * d1_ + h5 * a1_;
  }

 private:
  double v0_, d0_, a0_, v1_, d1_, a1_;
};

std::string describe(double t, const Vec2& y, const Frame& frame) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "non-finite right-hand side at t=" << t << " v=" << y[0] << " vdot=" << y[1]
      << " (frame alpha=" << frame.alpha << ")";
  return msg.str();
}

}  // namespace

std::array<double, 2> log_frame_rhs(double t, const State& s, const Frame& frame,
                                    const ProblemParams& params) {
  if (s.v < 0.0) {
    throw std::domain_error("log_frame_rhs: v must be non-negative");
  }
  const RadialRhs rhs(frame, params);
  return rhs(t, {s.v, s.vdot});
}

Trajectory integrate(const State& start, const Frame& frame, double t_target,
                     const ProblemParams& params, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(start.v > 0.0)) {
    throw std::invalid_argument("integrate: start.v must be positive");
  }
  Trajectory traj;
  traj.frame = frame;
  traj.params = params;
  traj.tolerances = cfg;
  traj.samples.push_back(start);
  traj.termination = {Termination::ReachedSpanEnd, start.t};
  if (t_target == start.t) {
    return traj;
  }

  const RadialRhs rhs(frame, params);
  const Dop853Stepper stepper(rhs, cfg);
  const double dir = t_target > start.t ? 1.0 : -1.0;
  const double span = std::abs(t_target - start.t);
  const double stride = cfg.dense_output_stride;
  const auto n_grid = static_cast<long long>(std::floor(span / stride));

  // k-th sample time; the last one is t_target itself.
  auto sample_time = [&](long long k) {
    if (k > n_grid) {
      return t_target;
    }
    const double tk = start.t + dir * static_cast<double>(k) * stride;
    if (dir * (t_target - tk) < 1e-9 * stride) {
      return t_target;
    }
    return tk;
  };
  long long next_k = 1;

  double t = start.t;
  Vec2 y{start.v, start.vdot};
  Vec2 f = rhs(t, y);
  if (!finite(f)) {
    throw NonFiniteRhs(describe(t, y, frame));
  }
  double h_prop = initial_step(rhs, t, y, f, cfg, span) * dir;

  while (true) {
    const double t_next = sample_time(next_k);
    double h = h_prop;
    bool accepted = false;
    StepOutcome out;
    bool clipped = false;
    for (int attempt = 0; attempt < kMaxRejectsPerStep; ++attempt) {
      const double min_step =
          10.0 * std::abs(std::nextafter(t, dir * std::numeric_limits<double>::infinity()) - t);
      if (std::abs(h) < min_step) {
        traj.termination = {Termination::StepUnderflow, t};
        return traj;
      }
      clipped = std::abs(h) >= std::abs(t_next - t);
      if (clipped) {
        h = t_next - t;
      }
      out = stepper.step(t, y, f, h);
      if (out.finite && out.error_norm < 1.0) {
        accepted = true;
        break;
      }
      const double factor =
          out.finite ? std::max(kMinFactor, kSafety * std::pow(out.error_norm, kErrorExponent))
                     : 0.25;
      h *= factor;
    }
    if (!accepted) {
      traj.termination = {Termination::StepUnderflow, t};
      return traj;
    }

    const double t_new = clipped ? t_next : t + h;
    Vec2 f_new = rhs(t_new, out.y);
    if (!finite(f_new)) {
      throw NonFiniteRhs(describe(t_new, out.y, frame));
    }

    if (out.y[0] <= 0.0) {
      // Locate the zero of v inside the step, then land on it with a direct step.
      const StepInterpolant interp(h, y, f, out.y, f_new);
      double lo = 0.0;
      double hi = 1.0;
      while ((hi - lo) * std::abs(h) > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (interp(mid) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      double s = hi;
      StepOutcome landing = stepper.step(t, y, f, s * h);
      for (int it = 0; it < 8 && landing.finite; ++it) {
        const double u_abs = std::abs(landing.y[0]) * std::exp(-frame.alpha * (t + s * h));
        if (u_abs < 0.1 * cfg.atol || landing.y[1] == 0.0) {
          break;
        }
        s -= landing.y[0] / (h * landing.y[1]);
        s = std::clamp(s, 0.0, 1.0);
        landing = stepper.step(t, y, f, s * h);
      }
      const double t_cross = t + s * h;
      if (landing.finite && dir * (t_cross - t) > 0.0) {
        traj.samples.push_back({t_cross, landing.y[0], landing.y[1]});
      } else {
        traj.samples.push_back({t_new, out.y[0], out.y[1]});
      }
      traj.termination = {Termination::PositivityLost, traj.samples.back().t};
      return traj;
    }

    t = t_new;
    y = out.y;
    f = f_new;
    if (!clipped) {
      const double factor =
          out.error_norm == 0.0
              ? kMaxFactor
              : std::min(kMaxFactor, kSafety * std::pow(out.error_norm, kErrorExponent));
      h_prop = h * factor;
    } else if (std::abs(h_prop) < std::abs(h)) {
      h_prop = h;
    }
    if (std::abs(h_prop) > cfg.max_step) {
      h_prop = dir * cfg.max_step;
    }

    if (clipped) {
      traj.samples.push_back({t, y[0], y[1]});
      ++next_k;
    }
    if (y[0] >= cfg.amplitude_cap) {
      if (!clipped) {
        traj.samples.push_back({t, y[0], y[1]});
      }
      traj.termination = {Termination::AmplitudeCap, t};
      return traj;
    }
    if (clipped && t == t_target) {
      traj.termination = {Termination::ReachedSpanEnd, t};
      return traj;
    }
  }
}

SeriesCorrections regular_series_corrections(double a, double r0, const ProblemParams& params) {
  SeriesCorrections c;
  const double n = params.n;
  if (params.k1 != 0.0) {
    c.p_term = params.k1 * std::pow(a, params.p) * std::pow(r0, 2.0 + params.l1) /
               ((2.0 + params.l1) * (n + params.l1));
  }
  if (params.k2 != 0.0) {
    c.q_term = params.k2 * std::pow(a, params.q) * std::pow(r0, 2.0 + params.l2) /
               ((2.0 + params.l2) * (n + params.l2));
  }
  return c;
}

namespace {

bool passes_series_gate(double a, const SeriesCorrections& c) {
  return std::abs(c.p_term) < 1e-6 * a && std::abs(c.q_term) < 1e-6 * a;
}

}  // namespace

double admissible_series_radius(double a, const ProblemParams& params, double r0_max) {
  double r0 = r0_max;
  for (int i = 0; i < 40; ++i) {
    if (passes_series_gate(a, regular_series_corrections(a, r0, params))) {
      return r0;
    }
    r0 /= 10.0;
  }
  throw std::invalid_argument("admissible_series_radius: no radius passes the series gate");
}

State regular_series_start(double a, double r0, const ProblemParams& params, const Frame& frame) {
  if (!(a > 0.0) || !(r0 > 0.0)) {
    throw std::invalid_argument("regular_series_start: a and r0 must be positive");
  }
  const SeriesCorrections c = regular_series_corrections(a, r0, params);
  if (!passes_series_gate(a, c)) {
    std::ostringstream msg;
    msg << "regular_series_start: r0=" << r0 << " too large for a=" << a
        << " (corrections " << c.p_term << ", " << c.q_term << " exceed 1e-6 a)";
    throw std::invalid_argument(msg.str());
  }
  const double n = params.n;
  const double u = a - c.p_term - c.q_term;
  double du_dr = 0.0;
  if (params.k1 != 0.0) {
    du_dr -= params.k1 * std::pow(a, params.p) * std::pow(r0, 1.0 + params.l1) / (n + params.l1);
  }
  if (params.k2 != 0.0) {
    du_dr -= params.k2 * std::pow(a, params.q) * std::pow(r0, 1.0 + params.l2) / (n + params.l2);
  }
  return to_frame(std::log(r0), u, r0 * du_dr, frame.alpha);
}

Frame seed_frame(End end, const DerivedConstants& dc) {
  return Frame{dc.alpha_for(dominant_term(dc.params, end))};
}

double origin_seed_rate(const DerivedConstants& dc) {
  const Term dom = dominant_term(dc.params, End::Origin);
  const double alpha = dc.alpha_for(dom);
  const double damping = dc.params.n - 2.0 - 2.0 * alpha;
  const double stiffness = (dc.exponent_for(dom) - 1.0) * alpha * (dc.params.n - 2.0 - alpha);
  const double disc = damping * damping - 4.0 * stiffness;
  if (disc >= 0.0) {
    const double root = 0.5 * (-damping + std::sqrt(disc));
    if (root > 0.0) {
      return root;
    }
  }
  if (dc.params.two_term()) {
    return dc.frame_exp(alpha, dom == Term::Q ? Term::P : Term::Q);
  }
  return 0.0;
}

State singular_seed_start(End end, double eps, double T, const ProblemParams& params,
                          const DerivedConstants& dc) {
  const Term dom = dominant_term(params, end);
  const auto lambda = dc.lambda_for(dom);
  if (!lambda) {
    throw UndefinedLambda("singular_seed_start: lambda undefined at the " + to_string(end) +
                          " end");
  }
  if (!(std::abs(eps) < 0.1 * *lambda)) {
    throw std::invalid_argument("singular_seed_start: |eps| must be below 0.1 lambda");
  }
  double rate = 0.0;
  if (end == End::Infinity) {
    if (params.two_term()) {
      rate = dc.frame_exp(dc.alpha_for(dom), Term::Q);
    }
  } else {
    rate = origin_seed_rate(dc);
  }
  return {T, *lambda + eps, eps * rate};
}

Trajectory reframe(const Trajectory& traj, double new_alpha) {
  Trajectory out = traj;
  if (new_alpha == traj.frame.alpha) {
    return out;
  }
  const double shift = new_alpha - traj.frame.alpha;
  for (State& s : out.samples) {
    const double scale = std::exp(shift * s.t);
    const double v = s.v;
    s.v = scale * v;
    s.vdot = scale * (shift * v + s.vdot);
  }
  out.frame.alpha = new_alpha;
  return out;
}

}  // namespace emden
