#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

#include "zkdamp/functionals.hpp"
#include "zkdamp/spectral.hpp"

namespace zkdamp {

namespace {

double lp_norm(const RealField& f, double p) {
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double l2_norm(const RealField& f) { return std::sqrt(quadrature(f * f)); }

// Sum over multi-indices |beta| = m of ||D^beta f||_q, for m in {1, 2}.
double derivative_norm_sum(const SpectralField& F, int m, double q) {
  const int n = F.grid().dim;
  double s = 0.0;
  if (m == 1) {
    for (int a = 0; a < n; ++a) s += lp_norm(inverse_transform(derivative(F, a, 1)), q);
  } else {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        const SpectralField d = a == b ? derivative(F, a, 2) : derivative(derivative(F, a, 1), b, 1);
        s += lp_norm(inverse_transform(d), q);
      }
    }
  }
  return s;
}

// For s f with ||f||_2 = 1 the positive part of the constant is
// g(s) = (s X - eps Y) / (s^k + 1), k = p - 2. g' = 0 reduces to
// h(s) = X + k eps Y s^(k-1) - (k-1) X s^k, positive at the zero s0 = eps Y / X
// of the numerator and decreasing to -inf beyond it.
double scale_sup(double X, double epsY, double p) {
  if (!(X > 0.0)) return 0.0;
  const double k = p - 2.0;
  auto g = [&](double s) { return (s * X - epsY) / (std::pow(s, k) + 1.0); };
  auto h = [&](double s) { return X + k * epsY * std::pow(s, k - 1.0) - (k - 1.0) * X * std::pow(s, k); };
  double lo = std::max(epsY / X, 1e-300), hi = std::max(2.0 * lo, 1.0);
  while (h(hi) > 0.0) hi *= 2.0;
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(h, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return std::max(0.0, g(0.5 * (root.first + root.second)));
}

}  // namespace

bool InequalityReport::holds_with(double c) const {
  const double rhs = epsilon * gradient_term + c * l2_terms;
  return lhs <= rhs + 1e-12 * std::max(std::abs(lhs), std::abs(rhs));
}

double lemma23_exponent(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("lemma23_exponent: dim must be 2 or 3");
  return 2.0 * (6.0 - dim) / (4.0 - dim);
}

InequalityReport lemma23_report(const RealField& f, const WeightFunction& psi, double epsilon) {
  if (psi.kind != WeightKind::psi) throw std::invalid_argument("lemma23_report: weight must be of kind psi");
  if (!(epsilon > 0.0)) throw std::invalid_argument("lemma23_report: epsilon must be positive");
  const GridSpec& g = f.grid();
  const RealField w = psi.broadcast(g, psi.w);
  const auto grad = gradient(transform(f));
  RealField grad_sq(g);
  for (const auto& d : grad) grad_sq += d * d;

  InequalityReport rep;
  rep.epsilon = epsilon;
  rep.lhs = std::abs(quadrature_weighted(w * f, dealiased_product(f, f)));
  rep.gradient_term = quadrature_weighted(grad_sq, w);
  const double norm = l2_norm(f);
  rep.l2_terms = std::pow(norm, lemma23_exponent(g.dim)) + norm * norm;
  rep.min_constant = rep.l2_terms > 0.0 ? std::max(0.0, (rep.lhs - epsilon * rep.gradient_term) / rep.l2_terms) : 0.0;
  if (!(norm > 0.0)) return rep;

  // Shifting f by j cells along x1 leaves the L2 terms alone and turns the
  // weighted integrals into circular correlations of psi with the x1 profiles.
  const RealField cube = f * dealiased_product(f, f);
  const int n0 = g.points[0];
  const std::size_t slab = g.size() / static_cast<std::size_t>(n0);
  std::vector<double> cube_x1(n0, 0.0), grad_x1(n0, 0.0);
  for (int i = 0; i < n0; ++i) {
    for (std::size_t r = 0; r < slab; ++r) {
      cube_x1[i] += cube[i * slab + r];
      grad_x1[i] += grad_sq[i * slab + r];
    }
  }
  const double dv = g.cell_volume(), p = lemma23_exponent(g.dim);
  for (int j = 0; j < n0; ++j) {
    double c = 0.0, d = 0.0;
    for (int i = 0; i < n0; ++i) {
      const double wk = psi.w[(i + j) % n0];
      c += wk * cube_x1[i];
      d += wk * grad_x1[i];
    }
    const double X = std::abs(c) * dv / (norm * norm * norm), epsY = epsilon * d * dv / (norm * norm);
    rep.orbit_sup_constant = std::max(rep.orbit_sup_constant, scale_sup(X, epsY, p));
  }
  return rep;
}

double gn_theta(const GnExponents& e, int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("gn_theta: dim must be 2 or 3");
  if (e.j < 0 || e.j > 1 || e.m < 1 || e.m > 2 || e.j >= e.m) {
    throw std::invalid_argument("gn_theta: supported orders are 0 <= j < m <= 2 with j <= 1");
  }
  if (!(e.p >= 1.0) || !(e.q >= 1.0) || !(e.r >= 1.0)) {
    throw std::invalid_argument("gn_theta: exponents p, q, r must be >= 1");
  }
  const double n = dim;
  // 1/p - j/n = theta (1/q - m/n) + (1 - theta)/r
  const double num = 1.0 / e.p - e.j / n - 1.0 / e.r;
  const double den = 1.0 / e.q - e.m / n - 1.0 / e.r;
  if (den == 0.0) throw std::invalid_argument("gn_theta: scaling relation is degenerate (1/q - m/n = 1/r)");
  const double solved = num / den;
  const double lo = static_cast<double>(e.j) / e.m;
  if (e.theta >= 0.0 && std::abs(e.theta - solved) > 1e-12) {
    std::ostringstream os;
    os << "gn_theta: theta = " << e.theta << " violates 1/p - j/n = theta (1/q - m/n) + (1 - theta)/r, which requires "
       << solved;
    throw std::invalid_argument(os.str());
  }
  if (solved < lo - 1e-12 || solved > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "gn_theta: scaling relation gives theta = " << solved << " outside [j/m, 1] = [" << lo << ", 1]";
    throw std::invalid_argument(os.str());
  }
  return solved;
}

GnReport gn_report(const RealField& f, const GnExponents& e) {
  const GridSpec& g = f.grid();
  if (e.derivative_axis < 0 || e.derivative_axis >= g.dim) {
    throw std::invalid_argument("gn_report: derivative_axis out of range");
  }
  GnReport rep;
  rep.theta = gn_theta(e, g.dim);
  const SpectralField F = transform(f);
  rep.lhs = e.j == 0 ? lp_norm(f, e.p) : lp_norm(inverse_transform(derivative(F, e.derivative_axis, 1)), e.p);
  rep.rhs_factor = std::pow(derivative_norm_sum(F, e.m, e.q), rep.theta) * std::pow(lp_norm(f, e.r), 1.0 - rep.theta);
  rep.min_constant = rep.rhs_factor > 0.0 ? rep.lhs / rep.rhs_factor : 0.0;

  const int n = g.dim;
  double grad_sq = 0.0;
  for (const auto& d : gradient(F)) grad_sq += quadrature(d * d);
  const double l3 = lp_norm(f, 3.0);
  rep.cube_lhs = l3 * l3 * l3;
  rep.cube_rhs_factor = std::pow(std::sqrt(grad_sq), 0.5 * n) * std::pow(l2_norm(f), 0.5 * (6 - n));
  rep.cube_constant = rep.cube_rhs_factor > 0.0 ? rep.cube_lhs / rep.cube_rhs_factor : 0.0;
  return rep;
}

ObservabilityReport observability_ratio(const History& history, double R, double T) {
  if (history.empty()) throw std::invalid_argument("observability_ratio: empty history");
  if (!(R >= 0.0)) throw std::invalid_argument("observability_ratio: R must be nonnegative");
  const double t_end = T < 0.0 ? history.back().t : T;
  if (t_end > history.back().t + 1e-12) {
    throw std::invalid_argument("observability_ratio: T exceeds the recorded time span");
  }
  ObservabilityReport rep;
  rep.R = R;
  rep.T = t_end;
  for (std::size_t i = 1; i < history.size() && history[i].t <= t_end + 1e-12; ++i) {
    const double dt = history[i].t - history[i - 1].t;
    rep.numerator += 0.5 * dt * (history[i].local_E + history[i - 1].local_E);
    rep.denominator += 0.5 * dt * (history[i].dissipation + history[i - 1].dissipation);
  }
  if (rep.denominator > 0.0) {
    rep.ratio = rep.numerator / rep.denominator;
  } else {
    rep.ratio = rep.numerator > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return rep;
}

DecayConstant compute_b(double alpha0, double epsilon, double a_inf) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("compute_b: alpha0 must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("compute_b: epsilon must be positive");
  if (!(epsilon < alpha0)) throw std::invalid_argument("compute_b: epsilon must be smaller than alpha0");
  if (!(a_inf >= 0.0)) throw std::invalid_argument("compute_b: a_inf must be nonnegative");
  const double num = 2.0 * alpha0 - epsilon * (1.0 + a_inf);
  if (!(num > 0.0)) {
    throw std::invalid_argument("compute_b: 2 alpha0 - epsilon (1 + a_inf) must be positive (b <= 0 is invalid)");
  }
  DecayConstant dc;
  dc.b = 3.0 * num / (4.0 * (2.0 * alpha0 - epsilon));
  dc.rate = (2.0 * alpha0 - epsilon) * dc.b;
  return dc;
}

double contraction_constant(double alpha0, double observability_constant, double T) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("contraction_constant: alpha0 must be positive");
  if (!(observability_constant >= 0.0)) {
    throw std::invalid_argument("contraction_constant: observability constant must be nonnegative");
  }
  if (!(T > 0.0)) throw std::invalid_argument("contraction_constant: T must be positive");
  const double k = 1.0 / (2.0 * alpha0) + 0.5 * observability_constant;
  return k / (T + k);
}

}  // namespace zkdamp
