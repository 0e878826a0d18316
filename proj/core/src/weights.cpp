#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zkdamp/damping.hpp"

namespace zkdamp {

namespace {

// C-infinity step on [0, 1] built from exp(-1/t).
double bump_tail(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double fa = bump_tail(t), fb = bump_tail(1.0 - t);
  return fa / (fa + fb);
}

double smooth_step_slope(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double fa = bump_tail(t), fb = bump_tail(1.0 - t);
  const double denom = fa + fb;
  if (denom == 0.0) return 0.0;
  const double dfa = fa / (t * t);
  const double dfb = fb / ((1.0 - t) * (1.0 - t));
  return (dfa * fb + fa * dfb) / (denom * denom);
}

constexpr double kPanel = 0.25;
using Rule = boost::math::quadrature::gauss<double, 30>;

// Log-decay exponent g(s) of the rho tail: g' = smooth_step(s / width).
double tail_exponent(double s, double width) {
  if (s <= 0.0) return 0.0;
  if (s >= width) return 0.5 * width + (s - width);
  auto slope = [&](double q) { return smooth_step(q / width); };
  double g = 0.0;
  for (double a = 0.0; a < s; a += kPanel) g += Rule::integrate(slope, a, std::min(a + kPanel, s));
  return g;
}

// Integral of exp(-g) over [0, s]. Panels are walked left to right so g at
// each Gauss node costs a single panel integral.
double tail_integral(double s, double width) {
  if (s <= 0.0) return 0.0;
  const double head_end = std::min(s, width);
  auto slope = [&](double q) { return smooth_step(q / width); };
  double head = 0.0, g_left = 0.0;
  for (double a = 0.0; a < head_end; a += kPanel) {
    const double b = std::min(a + kPanel, head_end);
    head += Rule::integrate([&](double q) { return std::exp(-(g_left + Rule::integrate(slope, a, q))); }, a, b);
    g_left += Rule::integrate(slope, a, b);
  }
  if (s <= width) return head;
  return head + std::exp(-0.5 * width) * -std::expm1(-(s - width));
}

}  // namespace

std::array<double, 4> rho_weight_at(double x1, double r, double transition) {
  const double sign = x1 < 0.0 ? -1.0 : 1.0;
  const double s = std::abs(x1) - r;
  const double total_variation =
      2.0 * (r + tail_integral(transition, transition) + std::exp(-0.5 * transition));
  if (s <= 0.0) return {x1 + total_variation, 1.0, 0.0, 0.0};

  const double d1 = std::exp(-tail_exponent(s, transition));
  const double step = smooth_step(s / transition);
  const double slope = smooth_step_slope(s / transition) / transition;
  const double value = sign * (r + tail_integral(s, transition)) + total_variation;
  return {value, d1, -sign * step * d1, (step * step - slope) * d1};
}

RealField WeightFunction::broadcast(const GridSpec& grid, const std::vector<double>& samples) const {
  if (samples.size() != static_cast<std::size_t>(grid.points[0])) {
    throw std::invalid_argument("WeightFunction::broadcast: sample count does not match grid x1 axis");
  }
  RealField out(grid);
  const std::size_t per_slice = grid.size() / samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::fill_n(out.values().begin() + static_cast<std::ptrdiff_t>(i * per_slice), per_slice, samples[i]);
  }
  return out;
}

double WeightFunction::sup_norm() const {
  double m = 0.0;
  for (double v : w) m = std::max(m, std::abs(v));
  return m;
}

WeightFunction make_weight(const GridSpec& grid, double r, WeightKind kind, double transition) {
  grid.validate();
  if (!(r > 0.0) || !(r < grid.half_length[0])) {
    throw std::invalid_argument("make_weight: r must lie in (0, half_length[0]), got " + std::to_string(r));
  }
  if (kind == WeightKind::rho && !(transition > 0.0)) {
    throw std::invalid_argument("make_weight: rho transition width must be positive");
  }
  WeightFunction wf;
  wf.kind = kind;
  wf.r = r;
  wf.transition = kind == WeightKind::rho ? transition : 0.0;
  const auto n = static_cast<std::size_t>(grid.points[0]);
  wf.x1.resize(n);
  wf.w.resize(n);
  wf.d1.resize(n);
  wf.d2.resize(n);
  wf.d3.resize(n);
  const double x_max = grid.coordinate(0, grid.points[0] - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.coordinate(0, static_cast<int>(i));
    wf.x1[i] = x;
    if (kind == WeightKind::rho) {
      const auto v = rho_weight_at(x, r, transition);
      wf.w[i] = v[0];
      wf.d1[i] = v[1];
      wf.d2[i] = v[2];
      wf.d3[i] = v[3];
    } else {
      const double e = std::exp(x - x_max);
      wf.w[i] = wf.d1[i] = wf.d2[i] = wf.d3[i] = e;
    }
  }
  return wf;
}

}  // namespace zkdamp
