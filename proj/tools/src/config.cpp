#include "zkdamp_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace zkdamp::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Entry {
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing "# ..." or "; ..." comment that is preceded by whitespace
// and lies outside double quotes.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (!quoted && (s[i] == '#' || s[i] == ';') && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) {
      return s.substr(0, i);
    }
  }
  return s;
}

class Document {
 public:
  Document(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    auto it = entries_.find(key);
    std::ostringstream os;
    os << origin_;
    if (it != entries_.end()) os << ":" << it->second.line;
    os << ": key '" << key << "': " << what;
    throw ConfigError(os.str());
  }

  void parse(std::istream& in, const std::map<std::string, std::function<void(const std::string&)>>& setters) {
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      const std::string line = trim(strip_comment(raw));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') syntax(lineno, "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) syntax(lineno, "empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) syntax(lineno, "expected key = value");
      const std::string name = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (name.empty()) syntax(lineno, "missing key before '='");
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      const std::string key = section.empty() ? name : section + "." + name;
      if (!setters.count(key)) {
        std::ostringstream os;
        os << origin_ << ":" << lineno << ": unknown key '" << key << "'";
        throw ConfigError(os.str());
      }
      if (entries_.count(key)) {
        std::ostringstream os;
        os << origin_ << ":" << lineno << ": key '" << key << "' repeats line " << entries_[key].line;
        throw ConfigError(os.str());
      }
      entries_[key] = {value, lineno};
    }
    for (const auto& [key, e] : entries_) setters.at(key)(key);
  }

  [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) > 0; }
  [[nodiscard]] const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

  double number(const std::string& key) const {
    std::string v = raw(key);
    double scale = 1.0;
    if (v.size() > 2 && v.compare(v.size() - 2, 2, "pi") == 0) {
      scale = kPi;
      v = trim(v.substr(0, v.size() - 2));
      if (!v.empty() && v.back() == '*') v = trim(v.substr(0, v.size() - 1));
    }
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (v.empty() || used != v.size() || !std::isfinite(d)) fail(key, "expected a number, got '" + raw(key) + "'");
    return d * scale;
  }

  long long integer(const std::string& key) const {
    const std::string& v = raw(key);
    std::size_t used = 0;
    long long n = 0;
    try {
      n = std::stoll(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (v.empty() || used != v.size()) fail(key, "expected an integer, got '" + v + "'");
    return n;
  }

  bool boolean(const std::string& key) const {
    const std::string& v = raw(key);
    if (v == "true") return true;
    if (v == "false") return false;
    fail(key, "expected true or false, got '" + v + "'");
  }

 private:
  [[noreturn]] void syntax(int line, const std::string& what) const {
    std::ostringstream os;
    os << origin_ << ":" << line << ": " << what;
    throw ConfigError(os.str());
  }

  std::string origin_;
  std::map<std::string, Entry> entries_;
};

DampingKind damping_kind(const Document& d, const std::string& key) {
  const std::string& v = d.raw(key);
  if (v == "none") return DampingKind::none;
  if (v == "uniform") return DampingKind::uniform;
  if (v == "localized") return DampingKind::localized;
  if (v == "custom") return DampingKind::custom;
  d.fail(key, "expected none, uniform, localized or custom, got '" + v + "'");
}

InitialDataSpec::Kind initial_kind(const Document& d, const std::string& key) {
  const std::string& v = d.raw(key);
  if (v == "gaussian") return InitialDataSpec::Kind::gaussian;
  if (v == "random") return InitialDataSpec::Kind::random;
  if (v == "file") return InitialDataSpec::Kind::file;
  d.fail(key, "expected gaussian, random or file, got '" + v + "'");
}

RunConfig parse(std::istream& in, const std::string& origin, const std::filesystem::path& base) {
  RunConfig c;
  Document d(origin);
  int dim = 2;
  std::optional<double> half_length;
  std::optional<long long> points;
  std::optional<long long> obs_points, obs_band;

  using Setter = std::function<void(const std::string&)>;
  auto num = [&](double& target) -> Setter { return [&d, &target](const std::string& k) { target = d.number(k); }; };
  auto integer = [&](int& target) -> Setter {
    return [&d, &target](const std::string& k) { target = static_cast<int>(d.integer(k)); };
  };
  auto flag = [&](bool& target) -> Setter { return [&d, &target](const std::string& k) { target = d.boolean(k); }; };
  auto path = [&](std::filesystem::path& target) -> Setter {
    return [&d, &target, base](const std::string& k) {
      const std::filesystem::path p = d.raw(k);
      target = p.is_relative() ? base / p : p;
    };
  };
  auto seed = [&](std::uint64_t& target) -> Setter {
    return [&d, &target](const std::string& k) {
      const long long v = d.integer(k);
      if (v < 0) d.fail(k, "must be nonnegative");
      target = static_cast<std::uint64_t>(v);
    };
  };

  const std::map<std::string, Setter> setters{
      {"grid.dim", integer(dim)},
      {"grid.half_length", [&](const std::string& k) { half_length = d.number(k); }},
      {"grid.points", [&](const std::string& k) { points = d.integer(k); }},
      {"solver.dt", [&](const std::string& k) { c.solver.dt = d.number(k); c.dt_set = true; }},
      {"solver.t_end", [&](const std::string& k) { c.solver.t_end = d.number(k); c.t_end_set = true; }},
      {"solver.scheme",
       [&](const std::string& k) {
         try {
           c.solver.scheme = parse_scheme(d.raw(k));
         } catch (const std::invalid_argument& e) {
           d.fail(k, e.what());
         }
       }},
      {"solver.dealias", flag(c.solver.dealias)},
      {"solver.record_every", integer(c.solver.record_every)},
      {"solver.nonlinear", flag(c.solver.nonlinear)},
      {"damping.kind", [&](const std::string& k) { c.damping.kind = damping_kind(d, k); }},
      {"damping.alpha0", num(c.damping.alpha0)},
      {"damping.R", num(c.damping.R)},
      {"damping.ramp_width", num(c.damping.ramp_width)},
      {"damping.plateau", num(c.damping.plateau)},
      {"damping.table", path(c.damping.table)},
      {"initial.kind", [&](const std::string& k) { c.initial.kind = initial_kind(d, k); }},
      {"initial.amplitude", num(c.initial.amplitude)},
      {"initial.sigma", num(c.initial.sigma)},
      {"initial.center_x1", num(c.initial.center[0])},
      {"initial.center_x2", num(c.initial.center[1])},
      {"initial.center_x3", num(c.initial.center[2])},
      {"initial.seed", seed(c.initial.seed)},
      {"initial.band", integer(c.initial.band)},
      {"initial.h1_norm", num(c.initial.h1_norm)},
      {"initial.path", path(c.initial.path)},
      {"weights.rho_r", num(c.rho_r)},
      {"weights.rho_transition", num(c.rho_transition)},
      {"suite.name", [&](const std::string& k) { c.suite = d.raw(k); }},
      {"suite.seed", seed(c.seed)},
      {"suite.ensemble", integer(c.ensemble)},
      {"suite.epsilon", num(c.epsilon)},
      {"suite.calibration", integer(c.calibration)},
      {"suite.validation", integer(c.validation)},
      {"suite.workers",
       [&](const std::string& k) {
         const long long v = d.integer(k);
         if (v < 0) d.fail(k, "must be >= 0 (0 picks the hardware concurrency)");
         c.workers = static_cast<unsigned>(v);
       }},
      {"suite.observability_points", [&](const std::string& k) { obs_points = d.integer(k); }},
      {"suite.observability_band", [&](const std::string& k) { obs_band = d.integer(k); }},
      {"suite.observability_dt", num(c.observability_dt)},
      {"output.dir", [&](const std::string& k) { c.output_dir = d.raw(k); }},
  };
  d.parse(in, setters);

  // Grid.
  if (dim != 2 && dim != 3) d.fail("grid.dim", "must be 2 or 3");
  c.grid = default_grid(dim);
  if (half_length) {
    if (!(*half_length > 0.0)) d.fail("grid.half_length", "must be positive");
    for (int a = 0; a < dim; ++a) c.grid.half_length[a] = *half_length;
  }
  if (points) {
    if (*points < 8 || *points % 2 != 0 || *points > (1 << 14)) d.fail("grid.points", "must be even and >= 8");
    for (int a = 0; a < dim; ++a) c.grid.points[a] = static_cast<int>(*points);
  }
  const double L1 = c.grid.half_length[0];

  // Solver.
  if (!(c.solver.dt > 0.0)) d.fail("solver.dt", "must be positive");
  if (!(c.solver.t_end >= 0.0)) d.fail("solver.t_end", "must be nonnegative");
  if (c.solver.record_every < 1) d.fail("solver.record_every", "must be >= 1");
  try {
    c.solver.validate();
  } catch (const std::invalid_argument& e) {
    d.fail("solver.t_end", e.what());
  }

  // Damping.
  auto& dm = c.damping;
  if (dm.kind != DampingKind::none && !(dm.alpha0 > 0.0)) d.fail("damping.alpha0", "must be positive");
  if (dm.kind == DampingKind::localized) {
    if (!(dm.ramp_width > 0.0)) d.fail("damping.ramp_width", "must be positive");
    if (!(dm.R - dm.ramp_width > 0.0)) d.fail("damping.R", "R - ramp_width must be positive");
    if (!(dm.R < L1)) d.fail("damping.R", "must be smaller than grid.half_length");
    if (!(dm.plateau >= dm.alpha0)) d.fail("damping.plateau", "must be >= alpha0");
  }
  if (dm.kind == DampingKind::custom) {
    if (dm.table.empty()) d.fail("damping.table", "required for kind = custom");
    if (!std::filesystem::exists(dm.table)) d.fail("damping.table", "file not found: " + dm.table.string());
    if (!(dm.R >= 0.0)) d.fail("damping.R", "must be nonnegative");
  }

  // Initial data.
  auto& in0 = c.initial;
  if (!(in0.sigma > 0.0)) d.fail("initial.sigma", "must be positive");
  if (in0.band < 1) d.fail("initial.band", "must be >= 1");
  for (int a = 0; a < dim; ++a) {
    if (3 * in0.band > c.grid.points[a]) d.fail("initial.band", "exceeds the dealiased range of the grid");
  }
  if (!(in0.h1_norm >= 0.0)) d.fail("initial.h1_norm", "must be nonnegative");
  if (in0.kind == InitialDataSpec::Kind::file) {
    if (in0.path.empty()) d.fail("initial.path", "required for kind = file");
    if (!std::filesystem::exists(in0.path)) d.fail("initial.path", "file not found: " + in0.path.string());
  }

  // Weights.
  if (!(c.rho_r > 0.0 && c.rho_r < L1)) d.fail("weights.rho_r", "must lie in (0, grid.half_length)");
  if (!(c.rho_transition > 0.0)) d.fail("weights.rho_transition", "must be positive");

  // Suites.
  if (c.ensemble < 1) d.fail("suite.ensemble", "must be >= 1");
  if (!(c.epsilon > 0.0)) d.fail("suite.epsilon", "must be positive");
  if (dm.kind != DampingKind::none && !(c.epsilon < dm.alpha0)) d.fail("suite.epsilon", "must be smaller than alpha0");
  if (c.calibration < 1) d.fail("suite.calibration", "must be >= 1");
  if (c.validation < 1) d.fail("suite.validation", "must be >= 1");
  c.observability_points = static_cast<int>(obs_points.value_or(dim == 2 ? 128 : 32));
  c.observability_band = static_cast<int>(obs_band.value_or(dim == 2 ? 24 : 8));
  if (c.observability_points < 8 || c.observability_points % 2 != 0 || c.observability_points > (1 << 14)) {
    d.fail("suite.observability_points", "must be even and >= 8");
  }
  if (c.observability_band < 1) d.fail("suite.observability_band", "must be >= 1");
  if (3 * c.observability_band > c.observability_points) {
    d.fail("suite.observability_band", "exceeds the dealiased range of the observability grid");
  }
  if (!(c.observability_dt > 0.0)) d.fail("suite.observability_dt", "must be positive");
  for (double T : {2.0, 5.0, 10.0}) {
    const double steps = T / c.observability_dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
      d.fail("suite.observability_dt", "must divide T = 2, 5, 10 into whole steps");
    }
  }
  return c;
}

}  // namespace

SuiteConfig RunConfig::suite_config() const {
  SuiteConfig s;
  s.grid = grid;
  s.dt = dt_set ? solver.dt : -1.0;
  s.t_end = t_end_set ? solver.t_end : -1.0;
  s.scheme = solver.scheme;
  s.dealias = solver.dealias;
  s.initial = initial;
  s.damping = damping;
  s.rho_r = rho_r;
  s.rho_transition = rho_transition;
  s.seed = seed;
  s.ensemble = ensemble;
  s.epsilon = epsilon;
  s.calibration = calibration;
  s.validation = validation;
  s.observability_grid = grid;
  for (int a = 0; a < grid.dim; ++a) s.observability_grid.points[a] = observability_points;
  s.observability_dt = observability_dt;
  s.observability_band = observability_band;
  s.workers = workers;
  return s;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  return parse(in, path.string(), path.parent_path());
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  return parse(in, origin, std::filesystem::current_path());
}

}  // namespace zkdamp::cli
