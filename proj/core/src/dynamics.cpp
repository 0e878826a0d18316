#include "zkdamp/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace zkdamp {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::lawson_rk4 ? "lawson_rk4" : "strang";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "lawson_rk4") return Scheme::lawson_rk4;
  if (name == "strang") return Scheme::strang;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected lawson_rk4 or strang)");
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be nonnegative");
  if (t_end > 0.0 && dt > t_end) throw std::invalid_argument("dt must not exceed t_end");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  (void)step_count();
}

std::int64_t SolverConfig::step_count() const {
  const double ratio = t_end / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "t_end / dt = " << ratio << " is not an integer step count";
    throw std::invalid_argument(os.str());
  }
  return static_cast<std::int64_t>(n);
}

BlowUpError::BlowUpError(double t, const std::string& what) : std::runtime_error(what), t_(t) {}

std::vector<double> linear_symbol(const GridSpec& grid) {
  grid.validate();
  SpectralField probe(grid);
  std::vector<double> m(grid.spectral_size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto k = probe.wavevector(i);
    if (2 * std::abs(k[0]) == grid.points[0]) {
      m[i] = 0.0;
      continue;
    }
    double norm2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const double xi = grid.frequency(a, k[a]);
      norm2 += xi * xi;
    }
    m[i] = grid.frequency(0, k[0]) * norm2;
  }
  return m;
}

SpectralField propagate_linear(const SpectralField& F, double s) {
  const auto m = linear_symbol(F.grid());
  SpectralField out = F;
  for (std::size_t i = 0; i < m.size(); ++i) out[i] *= std::polar(1.0, s * m[i]);
  return out;
}

RealField nonlinear_rhs(const RealField& u, const DampingProfile& profile, bool dealias) {
  if (!(u.grid() == profile.grid)) throw std::invalid_argument("nonlinear_rhs: field and damping grids differ");
  SpectralField sq = transform(0.5 * (u * u));
  if (dealias) dealias_in_place(sq);
  RealField out = inverse_transform(derivative(sq, 0, 1));
  out *= -1.0;
  out -= profile.a * u;
  return out;
}

Stepper::Stepper(std::shared_ptr<const DampingProfile> profile, double dt, Scheme scheme, bool dealias,
                 bool nonlinear)
    : profile_(std::move(profile)), dt_(dt), scheme_(scheme), dealias_(dealias), nonlinear_(nonlinear) {
  if (!profile_) throw std::invalid_argument("Stepper: null damping profile");
  if (!(dt != 0.0) || !std::isfinite(dt)) throw std::invalid_argument("Stepper: dt must be finite and nonzero");
  const GridSpec& g = profile_->grid;
  engine_ = FourierEngine::for_grid(g);
  damped_ = !profile_->is_zero();

  const auto m = linear_symbol(g);
  const std::size_t n = g.spectral_size();
  half_.resize(n);
  full_.resize(n);
  xi1_.resize(n);
  keep_.resize(n);
  SpectralField probe(g);
  for (std::size_t i = 0; i < n; ++i) {
    half_[i] = std::polar(1.0, 0.5 * dt * m[i]);
    full_[i] = std::polar(1.0, dt * m[i]);
    const auto k = probe.wavevector(i);
    xi1_[i] = 2 * std::abs(k[0]) == g.points[0] ? 0.0 : g.frequency(0, k[0]);
    keep_[i] = !dealias_ || dealias_keeps(g, k);
  }
  for (auto* f : {&k1_, &k2_, &k3_, &k4_, &stage_, &scratch_, &work_}) *f = SpectralField(g);
  u_ = RealField(g);
  product_ = RealField(g);
}

void Stepper::project(SpectralField& F) const {
  if (!dealias_) return;
  auto c = F.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!keep_[i]) c[i] = 0.0;
  }
}

void Stepper::check_finite(const SpectralField& U, double t) const {
  for (const auto& c : U.coeffs()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      std::ostringstream os;
      os << "numerical blow-up: non-finite spectral coefficient at t = " << t;
      throw BlowUpError(t, os.str());
    }
  }
}

void Stepper::tendency(const SpectralField& U, SpectralField& out, double t) {
  auto o = out.coeffs();
  std::fill(o.begin(), o.end(), std::complex<double>{});
  if (!nonlinear_ && !damped_) return;
  engine_->backward(U, u_, scratch_);
  std::size_t bad = 0;
  if (!u_.all_finite(&bad)) {
    const auto x = u_.position(bad);
    std::ostringstream os;
    os << "numerical blow-up: non-finite u near t = " << t << " at x = (" << x[0] << ", " << x[1] << ", " << x[2]
       << ")";
    throw BlowUpError(t, os.str());
  }
  const std::size_t n = out.size();
  const std::size_t npts = u_.size();
  if (nonlinear_) {
    for (std::size_t i = 0; i < npts; ++i) product_[i] = 0.5 * u_[i] * u_[i];
    engine_->forward(product_, work_);
    for (std::size_t i = 0; i < n; ++i) o[i] = std::complex<double>(0.0, -xi1_[i]) * work_[i];
  }
  if (damped_) {
    const RealField& a = profile_->a;
    for (std::size_t i = 0; i < npts; ++i) product_[i] = a[i] * u_[i];
    engine_->forward(product_, work_);
    for (std::size_t i = 0; i < n; ++i) o[i] -= work_[i];
  }
  project(out);
}

void Stepper::advance(SpectralField& U, double t) {
  const std::size_t n = U.size();
  const double h = dt_;
  if (scheme_ == Scheme::lawson_rk4) {
    tendency(U, k1_, t);
    for (std::size_t i = 0; i < n; ++i) stage_[i] = half_[i] * (U[i] + 0.5 * h * k1_[i]);
    tendency(stage_, k2_, t + 0.5 * h);
    for (std::size_t i = 0; i < n; ++i) stage_[i] = half_[i] * U[i] + 0.5 * h * k2_[i];
    tendency(stage_, k3_, t + 0.5 * h);
    for (std::size_t i = 0; i < n; ++i) stage_[i] = full_[i] * U[i] + h * half_[i] * k3_[i];
    tendency(stage_, k4_, t + h);
    for (std::size_t i = 0; i < n; ++i) {
      U[i] = full_[i] * U[i] + h / 6.0 * (full_[i] * k1_[i] + 2.0 * half_[i] * (k2_[i] + k3_[i]) + k4_[i]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) U[i] *= half_[i];
    tendency(U, k1_, t);
    for (std::size_t i = 0; i < n; ++i) stage_[i] = U[i] + 0.5 * h * k1_[i];
    tendency(stage_, k2_, t + 0.5 * h);
    for (std::size_t i = 0; i < n; ++i) U[i] = half_[i] * (U[i] + h * k2_[i]);
  }
  check_finite(U, t + h);
}

SimulationState step(SimulationState state) {
  state.config.validate();
  if (!state.profile) throw std::invalid_argument("step: state has no damping profile");
  if (!(state.u.grid() == state.profile->grid)) throw std::invalid_argument("step: field and damping grids differ");
  const SolverConfig& c = state.config;
  Stepper stepper(state.profile, c.dt, c.scheme, c.dealias, c.nonlinear);
  SpectralField U = transform(state.u);
  stepper.project(U);
  stepper.advance(U, state.t);
  state.u = inverse_transform(U);
  state.t += c.dt;
  return state;
}

SimulationState run(const RealField& u0, std::shared_ptr<const DampingProfile> profile, const SolverConfig& config) {
  if (!profile) throw std::invalid_argument("run: null damping profile");
  const Recorder recorder(*profile);
  return run(u0, std::move(profile), config, recorder);
}

SimulationState run(const RealField& u0, std::shared_ptr<const DampingProfile> profile, const SolverConfig& config,
                    const Recorder& recorder) {
  config.validate();
  if (!profile) throw std::invalid_argument("run: null damping profile");
  if (!(u0.grid() == profile->grid)) throw std::invalid_argument("run: initial datum and damping grids differ");
  const std::int64_t steps = config.step_count();

  SimulationState state;
  state.profile = profile;
  state.config = config;
  Stepper stepper(profile, config.dt, config.scheme, config.dealias, config.nonlinear);
  SpectralField U = transform(u0);
  stepper.project(U);
  state.history.reserve(static_cast<std::size_t>(steps / config.record_every + 2));
  state.history.push_back(recorder(0.0, U));
  for (std::int64_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * config.dt;
    stepper.advance(U, t);
    const std::int64_t done = s + 1;
    if (done % config.record_every == 0 || done == steps) {
      state.history.push_back(recorder(static_cast<double>(done) * config.dt, U));
    }
  }
  state.t = static_cast<double>(steps) * config.dt;
  state.u = inverse_transform(U);
  return state;
}

}  // namespace zkdamp
