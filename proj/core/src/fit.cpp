#include "zkdamp/fit.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace zkdamp {

DecayFit fit_decay(std::span<const double> t, std::span<const double> q, std::array<double, 2> window) {
  if (t.size() != q.size()) throw std::invalid_argument("fit_decay: t and q differ in length");
  if (t.empty()) throw std::invalid_argument("fit_decay: empty series");
  if (!(window[0] <= window[1])) throw std::invalid_argument("fit_decay: window must satisfy t_lo <= t_hi");
  if (!(q[0] > 0.0)) throw std::invalid_argument("fit_decay: q(0) must be positive");

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window[0] - 1e-12 || t[i] > window[1] + 1e-12) continue;
    if (!(q[i] > 0.0)) {
      throw std::invalid_argument("fit_decay: nonpositive value at t = " + std::to_string(t[i]) +
                                  "; shorten the window");
    }
    xs.push_back(t[i]);
    ys.push_back(std::log(q[i]));
  }
  if (xs.size() < 5) throw std::invalid_argument("fit_decay: need at least 5 samples in the window");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_decay: window samples share a single time");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
  }

  DecayFit fit;
  fit.delta_hat = -slope;
  fit.lnC_hat = intercept - std::log(q[0]);
  fit.r_squared = syy > 1e-28 * n ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  fit.window = window;
  fit.samples = xs.size();
  return fit;
}

DecayFit fit_decay(const History& history, double (*value)(const EnergyRecord&), std::array<double, 2> window) {
  std::vector<double> t, q;
  t.reserve(history.size());
  q.reserve(history.size());
  for (const auto& r : history) {
    t.push_back(r.t);
    q.push_back(value(r));
  }
  return fit_decay(t, q, window);
}

}  // namespace zkdamp
