#include "emden/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace emden {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, std::size_t line) {
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ConfigError(line, "expected a number, got '" + text + "'");
  }
  return x;
}

int parse_int(const std::string& text, std::size_t line) {
  char* end = nullptr;
  const long x = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ConfigError(line, "expected an integer, got '" + text + "'");
  }
  return static_cast<int>(x);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    out.push_back(trim(item));
  }
  return out;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& text, std::size_t line, Parse parse) {
  std::vector<T> out;
  for (const std::string& item : split_list(text)) {
    out.push_back(parse(item, line));
  }
  if (out.empty()) {
    throw ConfigError(line, "empty list");
  }
  return out;
}

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    if constexpr (std::is_same_v<T, int>) {
      out += std::to_string(xs[i]);
    } else {
      out += g17(xs[i]);
    }
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, std::size_t)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [&t](const std::string& key, auto member) {
      t[key] = [member](RunConfig& c, const std::string& v, std::size_t line) {
        member(c) = parse_real(v, line);
      };
    };
    real("params.p", [](RunConfig& c) -> double& { return c.params.p; });
    real("params.q", [](RunConfig& c) -> double& { return c.params.q; });
    real("params.l1", [](RunConfig& c) -> double& { return c.params.l1; });
    real("params.l2", [](RunConfig& c) -> double& { return c.params.l2; });
    real("params.k1", [](RunConfig& c) -> double& { return c.params.k1; });
    real("params.k2", [](RunConfig& c) -> double& { return c.params.k2; });
    t["params.n"] = [](RunConfig& c, const std::string& v, std::size_t line) {
      c.params.n = parse_int(v, line);
    };
    real("integrator.rtol", [](RunConfig& c) -> double& { return c.integrator.rtol; });
    real("integrator.atol", [](RunConfig& c) -> double& { return c.integrator.atol; });
    real("integrator.max_step", [](RunConfig& c) -> double& { return c.integrator.max_step; });
    real("integrator.amplitude_cap",
         [](RunConfig& c) -> double& { return c.integrator.amplitude_cap; });
    real("integrator.dense_output_stride",
         [](RunConfig& c) -> double& { return c.integrator.dense_output_stride; });
    real("classifier.tol_class", [](RunConfig& c) -> double& { return c.classifier.tol_class; });
    real("classifier.amplitude_threshold",
         [](RunConfig& c) -> double& { return c.classifier.amplitude_threshold; });
    real("classifier.power_residual",
         [](RunConfig& c) -> double& { return c.classifier.power_residual; });
    real("classifier.slope_threshold",
         [](RunConfig& c) -> double& { return c.classifier.slope_threshold; });
    real("classifier.contraction_factor",
         [](RunConfig& c) -> double& { return c.classifier.contraction_factor; });
    t["classifier.min_samples"] = [](RunConfig& c, const std::string& v, std::size_t line) {
      const int k = parse_int(v, line);
      if (k < 1) {
        throw ConfigError(line, "min_samples must be positive");
      }
      c.classifier.min_samples = static_cast<std::size_t>(k);
    };
    t["solve.mode"] = [](RunConfig& c, const std::string& v, std::size_t line) {
      if (v != "regular" && v != "singular") {
        throw ConfigError(line, "solve.mode must be regular or singular");
      }
      c.solve.mode = v;
    };
    real("solve.a", [](RunConfig& c) -> double& { return c.solve.a; });
    real("solve.r0", [](RunConfig& c) -> double& { return c.solve.r0; });
    real("solve.eps", [](RunConfig& c) -> double& { return c.solve.eps; });
    t["solve.end"] = [](RunConfig& c, const std::string& v, std::size_t line) {
      try {
        c.solve.end = end_from_string(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(line, e.what());
      }
    };
    t["solve.t_start"] = [](RunConfig& c, const std::string& v, std::size_t line) {
      c.solve.t_start = parse_real(v, line);
    };
    t["solve.t_end"] = [](RunConfig& c, const std::string& v, std::size_t line) {
      c.solve.t_end = parse_real(v, line);
    };
    real("shoot.a_min", [](RunConfig& c) -> double& { return c.shoot.a_min; });
    real("shoot.a_max", [](RunConfig& c) -> double& { return c.shoot.a_max; });
    real("shoot.t_far", [](RunConfig& c) -> double& { return c.shoot.t_far; });
    real("shoot.r0_max", [](RunConfig& c) -> double& { return c.shoot.r0_max; });
    t["shoot.points"] = [](RunConfig& c, const std::string& v, std::size_t line) {
      c.shoot.points = parse_int(v, line);
    };
    t["connect.from"] = [](RunConfig& c, const std::string& v, std::size_t line) {
      try {
        c.connect.from = end_from_string(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(line, e.what());
      }
    };
    real("connect.eps", [](RunConfig& c) -> double& { return c.connect.eps; });
    real("connect.t_far", [](RunConfig& c) -> double& { return c.connect.t_far; });
    t["connect.t_seed"] = [](RunConfig& c, const std::string& v, std::size_t line) {
      c.connect.t_seed = parse_real(v, line);
    };
    t["sweep.n"] = [](RunConfig& c, const std::string& v, std::size_t line) {
      c.sweep.n = parse_list<int>(v, line, parse_int);
    };
    auto axis = [&t](const std::string& key, auto member) {
      t[key] = [member](RunConfig& c, const std::string& v, std::size_t line) {
        member(c) = parse_list<double>(v, line, parse_real);
      };
    };
    axis("sweep.p", [](RunConfig& c) -> std::vector<double>& { return c.sweep.p; });
    axis("sweep.q", [](RunConfig& c) -> std::vector<double>& { return c.sweep.q; });
    axis("sweep.l1", [](RunConfig& c) -> std::vector<double>& { return c.sweep.l1; });
    axis("sweep.l2", [](RunConfig& c) -> std::vector<double>& { return c.sweep.l2; });
    real("sweep.a", [](RunConfig& c) -> double& { return c.sweep.a; });
    t["output.dir"] = [](RunConfig& c, const std::string& v, std::size_t) { c.output_dir = v; };
    return t;
  }();
  return table;
}

}  // namespace

ConfigError::ConfigError(std::size_t line, const std::string& what)
    : std::invalid_argument(line > 0 ? "config line " + std::to_string(line) + ": " + what
                                     : "config: " + what),
      line_(line) {}

End end_from_string(const std::string& name) {
  if (name == "infinity") {
    return End::Infinity;
  }
  if (name == "origin") {
    return End::Origin;
  }
  throw std::invalid_argument("end must be 'origin' or 'infinity', got '" + name + "'");
}

void RunConfig::validate() const {
  try {
    params.validate();
    integrator.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  if (!(solve.a > 0.0) || !(solve.r0 > 0.0)) {
    throw ConfigError(0, "solve.a and solve.r0 must be positive");
  }
  if (!(shoot.a_min > 0.0) || !(shoot.a_max > shoot.a_min) || shoot.points < 2) {
    throw ConfigError(0, "shoot needs 0 < a_min < a_max and at least 2 points");
  }
  if (!(shoot.r0_max > 0.0)) {
    throw ConfigError(0, "shoot.r0_max must be positive");
  }
  if (connect.t_seed && !(*connect.t_seed > 0.0)) {
    throw ConfigError(0, "connect.t_seed is a magnitude and must be positive");
  }
  if (!(connect.t_far > 0.0)) {
    throw ConfigError(0, "connect.t_far is a magnitude and must be positive");
  }
  if (!(sweep.a > 0.0)) {
    throw ConfigError(0, "sweep.a must be positive");
  }
  if (classifier.tol_class <= 0.0 || classifier.contraction_factor <= 0.0) {
    throw ConfigError(0, "classifier thresholds must be positive");
  }
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "params.n=" << params.n << '\n'
     << "params.p=" << g17(params.p) << '\n'
     << "params.q=" << g17(params.q) << '\n'
     << "params.l1=" << g17(params.l1) << '\n'
     << "params.l2=" << g17(params.l2) << '\n'
     << "params.k1=" << g17(params.k1) << '\n'
     << "params.k2=" << g17(params.k2) << '\n'
     << "integrator.rtol=" << g17(integrator.rtol) << '\n'
     << "integrator.atol=" << g17(integrator.atol) << '\n'
     << "integrator.max_step=" << g17(integrator.max_step) << '\n'
     << "integrator.amplitude_cap=" << g17(integrator.amplitude_cap) << '\n'
     << "integrator.dense_output_stride=" << g17(integrator.dense_output_stride) << '\n'
     << "classifier.tol_class=" << g17(classifier.tol_class) << '\n'
     << "classifier.amplitude_threshold=" << g17(classifier.amplitude_threshold) << '\n'
     << "classifier.power_residual=" << g17(classifier.power_residual) << '\n'
     << "classifier.slope_threshold=" << g17(classifier.slope_threshold) << '\n'
     << "classifier.contraction_factor=" << g17(classifier.contraction_factor) << '\n'
     << "classifier.min_samples=" << classifier.min_samples << '\n'
     << "solve.mode=" << solve.mode << '\n'
     << "solve.a=" << g17(solve.a) << '\n'
     << "solve.r0=" << g17(solve.r0) << '\n'
     << "solve.end=" << to_string(solve.end) << '\n'
     << "solve.eps=" << g17(solve.eps) << '\n'
     << "solve.t_start=" << (solve.t_start ? g17(*solve.t_start) : "default") << '\n'
     << "solve.t_end=" << (solve.t_end ? g17(*solve.t_end) : "default") << '\n'
     << "shoot.a_min=" << g17(shoot.a_min) << '\n'
     << "shoot.a_max=" << g17(shoot.a_max) << '\n'
     << "shoot.points=" << shoot.points << '\n'
     << "shoot.t_far=" << g17(shoot.t_far) << '\n'
     << "shoot.r0_max=" << g17(shoot.r0_max) << '\n'
     << "connect.from=" << to_string(connect.from) << '\n'
     << "connect.eps=" << g17(connect.eps) << '\n'
     << "connect.t_seed=" << (connect.t_seed ? g17(*connect.t_seed) : "default") << '\n'
     << "connect.t_far=" << g17(connect.t_far) << '\n'
     << "sweep.n=" << join(sweep.n) << '\n'
     << "sweep.p=" << join(sweep.p) << '\n'
     << "sweep.q=" << join(sweep.q) << '\n'
     << "sweep.l1=" << join(sweep.l1) << '\n'
     << "sweep.l2=" << join(sweep.l2) << '\n'
     << "sweep.a=" << g17(sweep.a) << '\n';
  return os.str();
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string RunConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

std::string RunConfig::run_id() const {
  return hash_hex().substr(0, 12);
}

ShootingConfig RunConfig::shooting_config(unsigned jobs) const {
  ShootingConfig cfg;
  cfg.integrator = integrator;
  cfg.classifier = classifier;
  cfg.t_far = shoot.t_far;
  cfg.r0_max = shoot.r0_max;
  cfg.jobs = jobs;
  return cfg;
}

ConnectConfig RunConfig::connect_config(End from) const {
  ConnectConfig cfg = default_connect_config(from);
  cfg.integrator = integrator;
  cfg.classifier = classifier;
  const double seed = connect.t_seed.value_or(std::abs(cfg.T));
  if (from == End::Infinity) {
    cfg.T = seed;
    cfg.t_far = -connect.t_far;
  } else {
    cfg.T = -seed;
    cfg.t_far = connect.t_far;
  }
  return cfg;
}

RunConfig parse_run_config(std::istream& is) {
  static const std::vector<std::string> kSections = {"params",  "integrator", "classifier",
                                                     "solve",   "shoot",      "connect",
                                                     "sweep",   "output"};
  RunConfig cfg;
  std::string section;
  std::string raw;
  std::size_t line = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(is, raw)) {
    ++line;
    std::string text = trim(raw);
    if (text.empty() || text[0] == '#' || text[0] == ';') {
      continue;
    }
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ConfigError(line, "malformed section header");
      }
      section = trim(text.substr(1, text.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        throw ConfigError(line, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, "expected key = value");
    }
    if (section.empty()) {
      throw ConfigError(line, "key outside of any section");
    }
    const std::string key = section + "." + trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError(line, "unknown key '" + key + "'");
    }
    if (const auto prev = seen.find(key); prev != seen.end()) {
      throw ConfigError(line, "duplicate key '" + key + "' (first on line " +
                                  std::to_string(prev->second) + ")");
    }
    seen[key] = line;
    it->second(cfg, value, line);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot open config " + path);
  }
  return parse_run_config(is);
}

}  // namespace emden
