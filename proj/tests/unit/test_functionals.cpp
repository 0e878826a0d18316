#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "zkdamp/damping.hpp"
#include "zkdamp/dynamics.hpp"
#include "zkdamp/functionals.hpp"
#include "zkdamp/initial_data.hpp"
#include "zkdamp/spectral.hpp"

using namespace zkdamp;
using std::numbers::pi;

namespace {

const GridSpec kFine = GridSpec::uniform(2, 8.0 * pi, 256);

std::shared_ptr<const DampingProfile> shared(DampingProfile p) {
  return std::make_shared<const DampingProfile>(std::move(p));
}

}  // namespace

TEST(Functionals, GaussianClosedForms2d) {
  // u = exp(-|x|^2/2): int u^2 = pi, int |grad u|^2 = pi, int u^3 = 2 pi / 3.
  const RealField u = gaussian(kFine, 1.0, 1.0);
  EXPECT_NEAR(energy(u), pi / 2.0, 1e-12);
  EXPECT_NEAR(cube_integral(u), 2.0 * pi / 3.0, 1e-12);
  EXPECT_NEAR(hamiltonian(u), 7.0 * pi / 9.0, 1e-12);
  EXPECT_NEAR(h1_norm_sq(u), 2.0 * pi, 1e-12);
}

TEST(Functionals, GaussianClosedForms3d) {
  // int u^2 = pi^(3/2), int |grad u|^2 = (3/2) pi^(3/2), int u^3 = (2 pi / 3)^(3/2).
  const GridSpec g = GridSpec::uniform(3, 4.0 * pi, 64);
  const RealField u = gaussian(g, 1.0, 1.0);
  const double p32 = std::pow(pi, 1.5);
  EXPECT_NEAR(energy(u), 0.5 * p32, 1e-10);
  EXPECT_NEAR(hamiltonian(u), 1.5 * p32 - std::pow(2.0 * pi / 3.0, 1.5) / 3.0, 1e-8);
}

TEST(Functionals, RecorderAgreesWithFreeFunctions) {
  const GridSpec g = GridSpec::uniform(2, 8.0 * pi, 128);
  const auto profile = make_localized_damping(g, 0.5, 4.0, 1.0, 0.5);
  const Recorder rec(profile);
  const RealField u = inverse_transform(dealias(transform(gaussian(g, 1.0, 2.0, {3.0, -1.0, 0.0}))));
  const EnergyRecord r = rec(0.0, u);
  EXPECT_NEAR(r.E, energy(u), 1e-14);
  EXPECT_NEAR(r.H, hamiltonian(u), 1e-13);
  EXPECT_NEAR(r.h1_sq, h1_norm_sq(u), 1e-13);
  EXPECT_NEAR(r.dissipation, quadrature(profile.a * u * u), 1e-14);
  ASSERT_TRUE(r.hamiltonian.has_value());
  // product_flux = analytic form for a resolved profile (to the quadrature error of a C^1 ramp).
  const auto& ht = *r.hamiltonian;
  EXPECT_NEAR(ht.product_flux, ht.grad_a_dot_grad_u2 + 2.0 * ht.a_grad_sq, 2e-2 * std::abs(ht.product_flux));
  // Slab mass int_{|x1| <= R} u^2 by direct summation.
  double slab = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (std::abs(u.position(n)[0]) <= 4.0) slab += u[n] * u[n];
  }
  EXPECT_NEAR(r.local_E, slab * g.cell_volume(), 1e-14);
  const EnergyRecord s = rec(0.0, transform(u));
  EXPECT_DOUBLE_EQ(s.E, r.E);
}

TEST(Functionals, RunningIntegralTrapezoid) {
  History h;
  for (int i = 0; i <= 4; ++i) {
    EnergyRecord r;
    r.t = 0.5 * i;
    r.dissipation = r.t;  // int_0^t s ds = t^2 / 2, exact for the trapezoid rule
    h.push_back(r);
  }
  const auto I = running_integral(h, [](const EnergyRecord& r) { return r.dissipation; });
  ASSERT_EQ(I.size(), 5u);
  EXPECT_DOUBLE_EQ(I[0], 0.0);
  EXPECT_DOUBLE_EQ(I[4], 2.0);
}

TEST(Functionals, BalanceResidualsOnSyntheticHistory) {
  // E = 1 - t, dissipation = 1 balances exactly; shifting one E sample by 1e-3
  // gives a residual of 2e-3 / 2.
  History h;
  for (int i = 0; i <= 10; ++i) {
    EnergyRecord r;
    r.t = 0.1 * i;
    r.E = 1.0 - r.t;
    r.dissipation = 1.0;
    r.H = 2.0;
    r.hamiltonian = HamiltonianTerms{};
    h.push_back(r);
  }
  EXPECT_LT(l2_balance_residual(h), 1e-15);
  EXPECT_LT(h_balance_residual(h), 1e-15);
  h[5].E += 1e-3;
  EXPECT_NEAR(l2_balance_residual(h), 1e-3, 1e-15);
  h[5].H += 3e-3;
  EXPECT_NEAR(h_balance_residual(h), 1e-3, 1e-15);  // normalized by |H0| + 1 = 3
}

TEST(Functionals, UndampedRunBalancesAndKato) {
  const GridSpec g = GridSpec::uniform(2, 8.0 * pi, 128);
  SolverConfig c;
  c.dt = 0.01;
  c.t_end = 0.5;
  auto profile = shared(make_no_damping(g));
  const Recorder rec(*profile);
  const auto s = run(gaussian(g, 1.0, 1.0), profile, c, rec);
  EXPECT_LT(l2_balance_residual(s.history), 1e-8);
  EXPECT_LT(h_balance_residual(s.history), 1e-8);
  const auto k = kato_check(s.history, rec.rho());
  EXPECT_LT(k.identity_residual, 1e-5);
  EXPECT_TRUE(k.bound_holds);
  EXPECT_LE(k.local_lhs, k.lhs * (1.0 + 1e-12));
}

TEST(Functionals, UniformDampedRunIsExactExponential) {
  const GridSpec g = GridSpec::uniform(2, 8.0 * pi, 64);
  SolverConfig c;
  c.dt = 0.01;
  c.t_end = 1.0;
  c.record_every = 10;
  auto profile = shared(make_uniform_damping(g, 0.5));
  const auto s = run(gaussian(g, 1.0, 2.0), profile, c, Recorder(*profile));
  for (const auto& r : s.history) EXPECT_NEAR(r.E / s.history.front().E, std::exp(-r.t), 1e-10);
}
