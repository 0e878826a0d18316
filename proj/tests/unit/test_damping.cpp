#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "zkdamp/damping.hpp"

using namespace zkdamp;

namespace {

const GridSpec kGrid = GridSpec::uniform(2, 8.0, 32);  // spacing 0.5

double a_at_x1(const DampingProfile& p, double x1) {
  for (std::size_t n = 0; n < p.a.size(); ++n) {
    if (std::abs(p.a.position(n)[0] - x1) < 1e-12) return p.a[n];
  }
  ADD_FAILURE() << "no grid point at x1 = " << x1;
  return 0.0;
}

}  // namespace

TEST(Damping, UniformIsConstant) {
  const auto p = make_uniform_damping(kGrid, 0.5);
  EXPECT_DOUBLE_EQ(p.sup_norm(), 0.5);
  EXPECT_DOUBLE_EQ(p.grad_sup_norm(), 0.0);
  EXPECT_TRUE(validate_damping(p).pass);
  EXPECT_TRUE(make_no_damping(kGrid).is_zero());
}

TEST(Damping, LocalizedSmoothstep) {
  const auto p = make_localized_damping(kGrid, 0.5, 4.0, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(a_at_x1(p, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(a_at_x1(p, 3.0), 0.0);
  EXPECT_NEAR(a_at_x1(p, 3.5), 0.25, 1e-15);
  EXPECT_NEAR(a_at_x1(p, -3.5), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(a_at_x1(p, 4.0), 0.5);
  EXPECT_DOUBLE_EQ(a_at_x1(p, -6.0), 0.5);
  // S'(1/2) = 3/2 per unit ramp.
  for (std::size_t n = 0; n < p.a.size(); ++n) {
    if (std::abs(p.a.position(n)[0] - 3.5) < 1e-12) EXPECT_NEAR(p.grad_a[0][n], 0.75, 1e-14);
  }
  EXPECT_TRUE(validate_damping(p).pass);
}

TEST(Damping, ValidationReportsViolation) {
  // a = 0.2 beyond x1 = 5 while alpha0 = 0.5 is required outside |x1| <= 4.
  std::istringstream table("-8 1\n-5 1\n5 1\n6 0.2\n");
  const auto p = load_damping_table(kGrid, table, 0.5, 4.0);
  const auto rep = validate_damping(p);
  EXPECT_FALSE(rep.pass);
  ASSERT_TRUE(rep.violation.has_value());
  EXPECT_GT((*rep.violation)[0], 5.0);
  EXPECT_NEAR(rep.min_outside_R, 0.2, 1e-15);
  EXPECT_FALSE(rep.message.empty());
}

TEST(Damping, LocalizedRejectsLowPlateau) {
  EXPECT_THROW(make_localized_damping(kGrid, 0.6, 4.0, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(make_localized_damping(kGrid, 0.5, 1.0, 1.0, 0.5), std::invalid_argument);
}

TEST(Damping, TableInterpolation) {
  std::istringstream table("# x1 a\n-8 1\n0 0\n8 1\n");
  const auto p = load_damping_table(kGrid, table, 0.5, 4.0);
  EXPECT_NEAR(a_at_x1(p, 2.0), 0.25, 1e-15);
  EXPECT_NEAR(a_at_x1(p, -6.0), 0.75, 1e-15);
  EXPECT_EQ(p.kind, DampingKind::custom);
}

TEST(Damping, TableRejectsNegativeValues) {
  std::istringstream table("-8 1\n0 -0.1\n8 1\n");
  EXPECT_THROW(load_damping_table(kGrid, table, 0.5, 4.0), std::invalid_argument);
}

TEST(Weights, RhoDerivativesAreConsistent) {
  const double r = 2.0, tr = 4.0, h = 1e-4;
  for (double x : {-9.3, -5.1, -3.7, -2.5, 0.0, 1.9, 2.6, 3.3, 4.4, 5.9, 7.5}) {
    const auto c = rho_weight_at(x, r, tr);
    const auto p = rho_weight_at(x + h, r, tr);
    const auto m = rho_weight_at(x - h, r, tr);
    for (int k = 0; k < 3; ++k) {
      const double fd = (p[k] - m[k]) / (2.0 * h);
      EXPECT_NEAR(fd, c[k + 1], 1e-7 * (1.0 + std::abs(c[k + 1]))) << "x = " << x << " order " << k + 1;
    }
  }
}

TEST(Weights, RhoShape) {
  const double r = 2.0, tr = 4.0;
  for (double x = -20.0; x <= 20.0; x += 0.37) {
    const auto c = rho_weight_at(x, r, tr);
    EXPECT_GT(c[0], 0.0);
    EXPECT_GT(c[1], 0.0);
    EXPECT_LE(c[1], 1.0 + 1e-15);
    EXPECT_LE(std::abs(c[2]), c[1] * (1.0 + 1e-12));
    if (std::abs(x) <= r) EXPECT_DOUBLE_EQ(c[1], 1.0);
  }
  // Pure exponential tail once the transition is complete.
  const double q = rho_weight_at(10.0, r, tr)[1] / rho_weight_at(9.0, r, tr)[1];
  EXPECT_NEAR(q, std::exp(-1.0), 1e-12);
  EXPECT_NEAR(rho_weight_at(10.0, r, tr)[1], std::exp(-(10.0 - r - tr / 2.0)), 1e-12);
}

TEST(Weights, SampledMatchesPointwise) {
  const auto w = make_weight(kGrid, 2.0, WeightKind::rho);
  ASSERT_EQ(w.x1.size(), 32u);
  for (std::size_t i = 0; i < w.x1.size(); ++i) {
    const auto c = rho_weight_at(w.x1[i], 2.0, kDefaultRhoTransition);
    EXPECT_DOUBLE_EQ(w.w[i], c[0]);
    EXPECT_DOUBLE_EQ(w.d3[i], c[3]);
  }
  const RealField b = w.broadcast(kGrid, w.d1);
  EXPECT_DOUBLE_EQ(b[5 * 32 + 7], w.d1[5]);
}

TEST(Weights, PsiIsItsOwnDerivative) {
  const auto w = make_weight(kGrid, 1.0, WeightKind::psi);
  for (std::size_t i = 0; i < w.x1.size(); ++i) {
    EXPECT_DOUBLE_EQ(w.d1[i], w.w[i]);
    EXPECT_DOUBLE_EQ(w.d3[i], w.w[i]);
    EXPECT_LE(w.w[i], 1.0);
  }
}
