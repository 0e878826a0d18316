#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "zkdamp/damping.hpp"
#include "zkdamp/fit.hpp"
#include "zkdamp/functionals.hpp"
#include "zkdamp/initial_data.hpp"

using namespace zkdamp;
using std::numbers::pi;

TEST(ComputeB, ReferenceValue) {
  // b = 3 (2 - 0.1 * 2) / (4 (2 - 0.1)) = 5.4 / 7.6.
  const auto d = compute_b(1.0, 0.1, 1.0);
  EXPECT_NEAR(d.b, 5.4 / 7.6, 1e-15);
  EXPECT_NEAR(d.b, 0.710526, 1e-6);
  EXPECT_NEAR(d.rate, 1.9 * 5.4 / 7.6, 1e-15);
}

TEST(ComputeB, SmallEpsilonLimit) {
  EXPECT_NEAR(compute_b(0.5, 1e-9, 2.0).b, 0.75, 1e-8);
  EXPECT_NEAR(compute_b(0.5, 1e-9, 2.0).rate, 0.75, 1e-8);
}

TEST(ComputeB, Rejections) {
  EXPECT_THROW(compute_b(1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(compute_b(1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(compute_b(0.0, 0.1, 1.0), std::invalid_argument);
  // 2 alpha0 <= epsilon (1 + a_inf): b would be nonpositive.
  EXPECT_THROW(compute_b(0.5, 0.2, 5.0), std::invalid_argument);
}

TEST(Contraction, Formula) {
  // k = 1/(2 alpha0) + c/2 = 2, C = k / (T + k).
  EXPECT_DOUBLE_EQ(contraction_constant(0.5, 2.0, 10.0), 2.0 / 12.0);
  EXPECT_LT(contraction_constant(0.5, 100.0, 1e-3), 1.0);
}

TEST(GnTheta, ScalingRelation) {
  EXPECT_NEAR(gn_theta({}, 2), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(gn_theta({}, 3), 0.5, 1e-15);
  // ||f||_4 <= c ||grad f||_2^theta ||f||_2^(1-theta): theta = n/4.
  GnExponents e;
  e.p = 4.0;
  EXPECT_NEAR(gn_theta(e, 2), 0.5, 1e-15);
  EXPECT_NEAR(gn_theta(e, 3), 0.75, 1e-15);
}

TEST(GnTheta, Rejections) {
  GnExponents e;
  e.theta = 0.9;
  EXPECT_THROW(gn_theta(e, 2), std::invalid_argument);
  GnExponents low;
  low.p = 1.0;  // theta = -1
  EXPECT_THROW(gn_theta(low, 2), std::invalid_argument);
  GnExponents high;
  high.p = 8.0;  // theta = 3/2 in 3D
  EXPECT_THROW(gn_theta(high, 3), std::invalid_argument);
}

TEST(GnReport, GaussianConstants) {
  // u = exp(-|x|^2/2) in 2D: ||u||_3^3 = 2 pi / 3, ||grad u||_2 = ||u||_2 = sqrt(pi).
  const GridSpec g = GridSpec::uniform(2, 8.0 * pi, 256);
  const auto rep = gn_report(gaussian(g, 1.0, 1.0));
  EXPECT_NEAR(rep.theta, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(rep.cube_lhs, 2.0 * pi / 3.0, 1e-10);
  EXPECT_NEAR(rep.cube_constant, (2.0 * pi / 3.0) / (std::sqrt(pi) * pi), 1e-10);
  EXPECT_NEAR(rep.lhs, std::cbrt(2.0 * pi / 3.0), 1e-10);
}

TEST(WeightedCubic, ExponentAndReport) {
  EXPECT_DOUBLE_EQ(lemma23_exponent(2), 4.0);
  EXPECT_DOUBLE_EQ(lemma23_exponent(3), 6.0);
  const GridSpec g = GridSpec::uniform(2, 8.0, 64);
  const RealField f = random_band_limited(g, 11, 6, 1.0);
  const auto psi = make_weight(g, 1.0, WeightKind::psi);
  const auto rep = lemma23_report(f, psi, 0.1);
  EXPECT_GE(rep.lhs, 0.0);
  EXPECT_GT(rep.gradient_term, 0.0);
  EXPECT_GT(rep.l2_terms, 0.0);
  EXPECT_TRUE(rep.holds_with(rep.min_constant));
  EXPECT_FALSE(rep.holds_with(0.5 * rep.min_constant) && rep.min_constant > 0.0);
  EXPECT_THROW(lemma23_report(f, make_weight(g, 2.0, WeightKind::rho), 0.1), std::invalid_argument);
  EXPECT_THROW(lemma23_report(f, psi, 0.0), std::invalid_argument);
}

namespace {

RealField shifted_scaled(const RealField& f, int shift, double s) {
  const GridSpec& g = f.grid();
  const int n0 = g.points[0];
  const std::size_t slab = g.size() / static_cast<std::size_t>(n0);
  RealField out(g);
  for (int i = 0; i < n0; ++i) {
    const int src = ((i - shift) % n0 + n0) % n0;
    for (std::size_t r = 0; r < slab; ++r) out[i * slab + r] = s * f[src * slab + r];
  }
  return out;
}

}  // namespace

TEST(WeightedCubic, OrbitSupremumMatchesBruteForce) {
  const GridSpec g = GridSpec::uniform(2, 8.0, 32);
  const RealField f = random_band_limited(g, 5, 4, 1.0);
  const auto psi = make_weight(g, 1.0, WeightKind::psi);
  const double eps = 0.1;
  const auto rep = lemma23_report(f, psi, eps);

  // Unshifted family in 2D: the maximiser of (sX - eps Y)/(s^2 + 1) is a root
  // of a quadratic.
  double sq = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sq += f[i] * f[i];
  const double norm = std::sqrt(sq * g.cell_volume());
  const double X = rep.lhs / (norm * norm * norm), Y = rep.gradient_term / (norm * norm);
  const double s_star = (eps * Y + std::sqrt(eps * eps * Y * Y + X * X)) / X;
  const double unshifted = (s_star * X - eps * Y) / (s_star * s_star + 1.0);
  EXPECT_GE(rep.orbit_sup_constant, unshifted * (1.0 - 1e-12));

  double brute = 0.0;
  for (int j = 0; j < g.points[0]; ++j) {
    for (int k = 0; k <= 240; ++k) {
      const double s = std::pow(10.0, -2.0 + k / 60.0);
      const double c = lemma23_report(shifted_scaled(f, j, s), psi, eps).min_constant;
      EXPECT_LE(c, rep.orbit_sup_constant * (1.0 + 1e-9));
      brute = std::max(brute, c);
    }
  }
  EXPECT_NEAR(brute / rep.orbit_sup_constant, 1.0, 5e-3);
}

TEST(Observability, Ratio) {
  History h;
  for (int i = 0; i <= 4; ++i) {
    EnergyRecord r;
    r.t = 0.5 * i;
    r.local_E = 1.0;
    r.dissipation = 2.0;
    h.push_back(r);
  }
  const auto rep = observability_ratio(h, 4.0);
  EXPECT_DOUBLE_EQ(rep.numerator, 2.0);
  EXPECT_DOUBLE_EQ(rep.denominator, 4.0);
  EXPECT_DOUBLE_EQ(rep.ratio, 0.5);
  EXPECT_DOUBLE_EQ(observability_ratio(h, 4.0, 1.0).numerator, 1.0);
  EXPECT_THROW(observability_ratio(h, 4.0, 3.0), std::invalid_argument);
  for (auto& r : h) r.dissipation = 0.0;
  EXPECT_EQ(observability_ratio(h, 4.0).ratio, std::numeric_limits<double>::infinity());
  for (auto& r : h) r.local_E = 0.0;
  EXPECT_EQ(observability_ratio(h, 4.0).ratio, 0.0);
}

TEST(Fit, RecoversSyntheticExponential) {
  std::vector<double> t, q;
  for (int i = 0; i <= 50; ++i) {
    t.push_back(0.1 * i);
    q.push_back(3.0 * std::exp(-0.7 * t.back()));
  }
  const auto f = fit_decay(t, q, {1.0, 5.0});
  EXPECT_NEAR(f.delta_hat, 0.7, 1e-12);
  EXPECT_NEAR(f.lnC_hat, 0.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.samples, 41u);
}

TEST(Fit, PrefactorAndNoise) {
  // q = exp(-t) for t < 1, then 2 exp(-t): the fitted window sees lnC = ln 2.
  std::vector<double> t, q;
  for (int i = 0; i <= 40; ++i) {
    t.push_back(0.1 * i);
    const double wiggle = 1.0 + 0.01 * std::sin(37.0 * i);
    q.push_back((t.back() < 1.0 ? 1.0 : 2.0) * std::exp(-t.back()) * wiggle);
  }
  const auto f = fit_decay(t, q, {1.0, 4.0});
  EXPECT_NEAR(f.delta_hat, 1.0, 1e-2);
  EXPECT_NEAR(f.lnC_hat, std::log(2.0), 2e-2);
  EXPECT_GT(f.r_squared, 0.99);
  EXPECT_LT(f.r_squared, 1.0);
}

TEST(Fit, Rejections) {
  const std::vector<double> t{0, 1, 2, 3, 4, 5};
  const std::vector<double> q{1, 0.5, 0.25, 0.0, 0.1, 0.05};
  EXPECT_THROW(fit_decay(t, q, {0.0, 5.0}), std::invalid_argument);
  const std::vector<double> ok{1, 0.5, 0.25, 0.125, 0.0625, 0.03};
  EXPECT_THROW(fit_decay(t, ok, {2.0, 5.0}), std::invalid_argument);  // 4 samples
  EXPECT_NO_THROW(fit_decay(t, ok, {1.0, 5.0}));
}
