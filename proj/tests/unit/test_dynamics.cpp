#include <gtest/gtest.h>

#include <cmath>
#include <complex>
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

std::shared_ptr<const DampingProfile> shared(DampingProfile p) {
  return std::make_shared<const DampingProfile>(std::move(p));
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

}  // namespace

TEST(Dynamics, LinearSymbolValues) {
  const GridSpec g = GridSpec::uniform(2, pi, 8);  // xi = k
  const auto m = linear_symbol(g);
  const int ns = g.spectral_points(1);
  EXPECT_DOUBLE_EQ(m[1 * ns + 0], 1.0);
  EXPECT_DOUBLE_EQ(m[2 * ns + 1], 10.0);
  EXPECT_DOUBLE_EQ(m[7 * ns + 2], -5.0);  // k = (-1, 2)
  for (int j = 0; j < ns; ++j) EXPECT_DOUBLE_EQ(m[4 * ns + j], 0.0);  // x1 Nyquist plane
}

TEST(Dynamics, LinearSymbol3d) {
  const GridSpec g = GridSpec::uniform(3, pi, 8);
  const auto m = linear_symbol(g);
  const int n1 = g.spectral_points(1), n2 = g.spectral_points(2);
  // k = (1, 1, 2): 1 * (1 + 1 + 4).
  EXPECT_DOUBLE_EQ(m[(1 * n1 + 1) * n2 + 2], 6.0);
}

TEST(Dynamics, PropagatorIsUnitaryAndExact) {
  const GridSpec g = GridSpec::uniform(2, 8.0, 32);
  const SpectralField F = transform(gaussian(g, 1.0, 1.0));
  const SpectralField G = propagate_linear(F, 0.37);
  EXPECT_NEAR(G.power(), F.power(), 1e-15 * F.power());
  const auto m = linear_symbol(g);
  for (std::size_t n = 0; n < F.size(); ++n) {
    EXPECT_NEAR(std::abs(G[n] - F[n] * std::exp(std::complex<double>(0.0, 0.37 * m[n]))), 0.0, 1e-16);
  }
}

TEST(Dynamics, NonlinearRhsTrigIdentity) {
  // u = cos(2 x1) on L = pi, N = 16: -1/2 (u^2)_x1 = sin(4 x1), and the
  // uniform damping adds -alpha0 u. 4 <= 16/3 so dealiasing keeps it.
  const GridSpec g = GridSpec::uniform(2, pi, 16);
  const RealField u = RealField::sample(g, [](const std::array<double, 3>& x) { return std::cos(2.0 * x[0]); });
  const auto profile = make_uniform_damping(g, 0.25);
  for (bool dealias : {true, false}) {
    const RealField r = nonlinear_rhs(u, profile, dealias);
    for (std::size_t n = 0; n < u.size(); ++n) {
      const double x = u.position(n)[0];
      EXPECT_NEAR(r[n], std::sin(4.0 * x) - 0.25 * std::cos(2.0 * x), 1e-13);
    }
  }
}

TEST(Dynamics, DealiasedNonlinearityConservesMass2) {
  const GridSpec g = GridSpec::uniform(2, 4.0 * pi, 64);
  RealField u = random_band_limited(g, 7, 8, 3.0);
  const double s = quadrature(u * nonlinear_rhs(u, make_no_damping(g), true));
  EXPECT_NEAR(s, 0.0, 1e-10 * quadrature(u * u));
}

TEST(Dynamics, DispersionOnlyStepIsExactPropagation) {
  const GridSpec g = GridSpec::uniform(2, 8.0, 32);
  Stepper stepper(shared(make_no_damping(g)), 0.01, Scheme::lawson_rk4, true, false);
  SpectralField U = transform(gaussian(g, 1.0, 1.0));
  stepper.project(U);
  const SpectralField U0 = U;
  for (int i = 0; i < 10; ++i) stepper.advance(U, i * 0.01);
  EXPECT_LT(max_abs_diff(U, propagate_linear(U0, 0.1)), 1e-15);
}

TEST(Dynamics, LinearDampedRunMatchesClosedForm) {
  // u_hat(t) = exp(-alpha0 t) exp(i t m) u_hat(0) for the linear equation.
  const GridSpec g = GridSpec::uniform(2, 8.0, 32);
  const double alpha0 = 0.5, dt = 0.01, T = 1.0;
  for (Scheme scheme : {Scheme::lawson_rk4, Scheme::strang}) {
    Stepper stepper(shared(make_uniform_damping(g, alpha0)), dt, scheme, true, false);
    SpectralField U = transform(gaussian(g, 1.0, 1.0));
    stepper.project(U);
    SpectralField expected = propagate_linear(U, T);
    expected *= std::exp(-alpha0 * T);
    for (int i = 0; i < 100; ++i) stepper.advance(U, i * dt);
    const double tol = scheme == Scheme::lawson_rk4 ? 1e-11 : 1e-5;
    EXPECT_LT(max_abs_diff(U, expected), tol) << to_string(scheme);
  }
}

TEST(Dynamics, BackwardStepUndoesForwardStep) {
  const GridSpec g = GridSpec::uniform(2, 4.0 * pi, 32);
  auto profile = shared(make_uniform_damping(g, 0.5));
  Stepper fwd(profile, 1e-3, Scheme::lawson_rk4, true, true), bwd(profile, -1e-3, Scheme::lawson_rk4, true, true);
  SpectralField U = transform(gaussian(g, 1.0, 1.5));
  fwd.project(U);
  const SpectralField U0 = U;
  for (int i = 0; i < 20; ++i) fwd.advance(U, i * 1e-3);
  for (int i = 20; i > 0; --i) bwd.advance(U, i * 1e-3);
  EXPECT_LT(max_abs_diff(U, U0), 1e-12);
}

TEST(Dynamics, SolverConfigValidation) {
  SolverConfig c;
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.dt = 0.3;
  c.t_end = 1.0;
  EXPECT_THROW((void)c.step_count(), std::invalid_argument);
  c.dt = 0.25;
  EXPECT_EQ(c.step_count(), 4);
  c.t_end = 0.0;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.step_count(), 0);
  c.record_every = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_scheme("strang"), Scheme::strang);
  EXPECT_THROW(parse_scheme("euler"), std::invalid_argument);
}

TEST(Dynamics, RunRecordsOnSchedule) {
  const GridSpec g = GridSpec::uniform(2, 4.0 * pi, 32);
  SolverConfig c;
  c.dt = 0.1;
  c.t_end = 1.0;
  c.record_every = 3;
  const auto s = run(gaussian(g, 1.0, 1.5), shared(make_uniform_damping(g, 0.5)), c);
  ASSERT_EQ(s.history.size(), 5u);  // t = 0, 0.3, 0.6, 0.9, 1.0
  EXPECT_NEAR(s.history[1].t, 0.3, 1e-15);
  EXPECT_NEAR(s.history.back().t, 1.0, 1e-15);
  EXPECT_NEAR(s.t, 1.0, 1e-15);
}

TEST(Dynamics, StepMatchesRun) {
  const GridSpec g = GridSpec::uniform(2, 4.0 * pi, 32);
  SolverConfig c;
  c.dt = 0.05;
  c.t_end = 0.05;
  auto profile = shared(make_localized_damping(g, 0.5, 4.0, 1.0, 0.5));
  const RealField u0 = gaussian(g, 1.0, 1.5);
  const auto ran = run(u0, profile, c);
  SimulationState s{0.0, inverse_transform(dealias(transform(u0))), profile, c, {}};
  s = step(std::move(s));
  for (std::size_t n = 0; n < u0.size(); ++n) EXPECT_NEAR(s.u[n], ran.u[n], 1e-15);
  EXPECT_DOUBLE_EQ(s.t, 0.05);
}

TEST(Dynamics, RunIsDeterministic) {
  const GridSpec g = GridSpec::uniform(2, 4.0 * pi, 32);
  SolverConfig c;
  c.dt = 0.01;
  c.t_end = 0.2;
  auto profile = shared(make_localized_damping(g, 0.5, 4.0, 1.0, 0.5));
  const RealField u0 = random_band_limited(g, 3, 5, 1.0);
  const auto a = run(u0, profile, c);
  const auto b = run(u0, profile, c);
  for (std::size_t n = 0; n < u0.size(); ++n) EXPECT_EQ(a.u[n], b.u[n]);
}

TEST(Dynamics, BlowUpIsReported) {
  const GridSpec g = GridSpec::uniform(2, 4.0 * pi, 32);
  SolverConfig c;
  c.dt = 0.5;
  c.t_end = 50.0;
  EXPECT_THROW(run(gaussian(g, 1e200, 1.0), shared(make_no_damping(g)), c), BlowUpError);
}
