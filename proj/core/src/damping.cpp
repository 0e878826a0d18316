#include "zkdamp/damping.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace zkdamp {

std::string to_string(DampingKind kind) {
  switch (kind) {
    case DampingKind::none: return "none";
    case DampingKind::uniform: return "uniform";
    case DampingKind::localized: return "localized";
    case DampingKind::custom: return "custom";
  }
  return "unknown";
}

double DampingProfile::sup_norm() const {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double DampingProfile::grad_sup_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (const auto& g : grad_a) s += g[i] * g[i];
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

bool DampingProfile::is_zero() const {
  return std::all_of(a.values().begin(), a.values().end(), [](double v) { return v == 0.0; });
}

namespace {

std::vector<RealField> zero_gradient(const GridSpec& grid) {
  return std::vector<RealField>(static_cast<std::size_t>(grid.dim), RealField(grid));
}

// Builds a profile whose value and x1-derivative depend on x1 only.
template <typename Value, typename Slope>
void fill_along_x1(DampingProfile& p, Value&& value, Slope&& slope) {
  const std::size_t per_slice = p.grid.size() / static_cast<std::size_t>(p.grid.points[0]);
  for (int i = 0; i < p.grid.points[0]; ++i) {
    const double x1 = p.grid.coordinate(0, i);
    const double v = value(x1);
    const double s = slope(x1);
    for (std::size_t j = 0; j < per_slice; ++j) {
      p.a[i * per_slice + j] = v;
      p.grad_a[0][i * per_slice + j] = s;
    }
  }
}

}  // namespace

DampingProfile make_no_damping(const GridSpec& grid) {
  grid.validate();
  DampingProfile p;
  p.grid = grid;
  p.a = RealField(grid);
  p.grad_a = zero_gradient(grid);
  p.kind = DampingKind::none;
  return p;
}

DampingProfile make_uniform_damping(const GridSpec& grid, double alpha0) {
  grid.validate();
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
    throw std::invalid_argument("make_uniform_damping: alpha0 must be positive, got " + std::to_string(alpha0));
  }
  DampingProfile p;
  p.grid = grid;
  p.a = RealField(grid, alpha0);
  p.grad_a = zero_gradient(grid);
  p.alpha0 = alpha0;
  p.plateau = alpha0;
  p.kind = DampingKind::uniform;
  return p;
}

DampingProfile make_localized_damping(const GridSpec& grid, double alpha0, double R, double ramp_width,
                                      double plateau) {
  grid.validate();
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("make_localized_damping: " + what);
  };
  if (!(alpha0 > 0.0)) fail("alpha0 must be positive");
  if (!(ramp_width > 0.0)) fail("ramp_width must be positive");
  if (!(R - ramp_width > 0.0)) fail("R - ramp_width must be positive (quiet zone must exist)");
  if (!(R < grid.half_length[0])) fail("R must be smaller than half_length[0] (plateau must fit in the box)");
  if (!(plateau >= alpha0)) fail("plateau must be >= alpha0");

  DampingProfile p;
  p.grid = grid;
  p.a = RealField(grid);
  p.grad_a = zero_gradient(grid);
  p.alpha0 = alpha0;
  p.R = R;
  p.ramp_width = ramp_width;
  p.plateau = plateau;
  p.kind = DampingKind::localized;

  const double inner = R - ramp_width;
  auto ramp = [&](double x1) { return std::clamp((std::abs(x1) - inner) / ramp_width, 0.0, 1.0); };
  fill_along_x1(
      p, [&](double x1) {
        const double t = ramp(x1);
        return plateau * t * t * (3.0 - 2.0 * t);
      },
      [&](double x1) {
        const double t = ramp(x1);
        const double sign = x1 < 0.0 ? -1.0 : 1.0;
        return plateau * 6.0 * t * (1.0 - t) / ramp_width * sign;
      });
  return p;
}

DampingProfile load_damping_table(const GridSpec& grid, std::istream& in, double alpha0, double R) {
  grid.validate();
  std::vector<double> xs, as;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double x = 0.0, v = 0.0;
    std::string extra;
    if (!(row >> x >> v) || (row >> extra)) {
      throw std::invalid_argument("damping table line " + std::to_string(lineno) +
                                  ": expected two numeric columns");
    }
    if (!std::isfinite(x) || !std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("damping table line " + std::to_string(lineno) +
                                  ": values must be finite and a must be >= 0");
    }
    if (!xs.empty() && !(x > xs.back())) {
      throw std::invalid_argument("damping table line " + std::to_string(lineno) +
                                  ": x1 column must be strictly increasing");
    }
    xs.push_back(x);
    as.push_back(v);
  }
  if (xs.size() < 2) throw std::invalid_argument("damping table: need at least two rows");
  if (!(alpha0 > 0.0)) throw std::invalid_argument("damping table: alpha0 must be positive");
  if (!(R >= 0.0)) throw std::invalid_argument("damping table: R must be nonnegative");

  DampingProfile p;
  p.grid = grid;
  p.a = RealField(grid);
  p.grad_a = zero_gradient(grid);
  p.alpha0 = alpha0;
  p.R = R;
  p.kind = DampingKind::custom;

  auto segment = [&](double x1) -> std::ptrdiff_t {
    if (x1 < xs.front() || x1 >= xs.back()) return -1;
    auto it = std::upper_bound(xs.begin(), xs.end(), x1);
    return std::distance(xs.begin(), it) - 1;
  };
  fill_along_x1(
      p, [&](double x1) {
        if (x1 <= xs.front()) return as.front();
        if (x1 >= xs.back()) return as.back();
        const auto s = static_cast<std::size_t>(segment(x1));
        const double t = (x1 - xs[s]) / (xs[s + 1] - xs[s]);
        return as[s] + t * (as[s + 1] - as[s]);
      },
      [&](double x1) {
        const auto s = segment(x1);
        if (s < 0) return 0.0;
        const auto u = static_cast<std::size_t>(s);
        return (as[u + 1] - as[u]) / (xs[u + 1] - xs[u]);
      });
  p.plateau = p.sup_norm();
  return p;
}

DampingProfile load_damping_table(const GridSpec& grid, const std::filesystem::path& path, double alpha0,
                                  double R) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("damping table: cannot open " + path.string());
  return load_damping_table(grid, in, alpha0, R);
}

DampingReport validate_damping(const DampingProfile& profile) {
  DampingReport rep;
  rep.sup_a = profile.sup_norm();
  rep.sup_grad_a = profile.grad_sup_norm();
  rep.min_a = std::numeric_limits<double>::infinity();
  rep.min_outside_R = std::numeric_limits<double>::infinity();

  const bool whole_space = profile.kind == DampingKind::uniform || profile.kind == DampingKind::none;
  std::optional<std::size_t> offending;
  for (std::size_t i = 0; i < profile.a.size(); ++i) {
    const double v = profile.a[i];
    rep.min_a = std::min(rep.min_a, v);
    const bool constrained = whole_space || std::abs(profile.a.position(i)[0]) > profile.R;
    if (constrained) rep.min_outside_R = std::min(rep.min_outside_R, v);
    const bool bad = v < 0.0 || !std::isfinite(v) || (constrained && v < profile.alpha0);
    if (bad && !offending) offending = i;
  }
  if (!std::isfinite(rep.sup_grad_a) && !offending) offending = std::size_t{0};

  rep.pass = !offending.has_value();
  std::ostringstream os;
  if (rep.pass) {
    os << to_string(profile.kind) << " profile satisfies a >= " << profile.alpha0
       << (whole_space ? " everywhere" : " on |x1| > R");
  } else {
    const auto x = profile.a.position(*offending);
    rep.violation = x;
    os << "a = " << profile.a[*offending] << " violates bound alpha0 = " << profile.alpha0 << " at x = (" << x[0]
       << ", " << x[1] << ", " << x[2] << ")";
  }
  rep.message = os.str();
  return rep;
}

}  // namespace zkdamp
