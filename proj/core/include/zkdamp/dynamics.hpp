#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "zkdamp/damping.hpp"
#include "zkdamp/functionals.hpp"
#include "zkdamp/grid.hpp"
#include "zkdamp/spectral.hpp"

namespace zkdamp {

enum class Scheme { lawson_rk4, strang };

std::string to_string(Scheme scheme);
/// Accepts "lawson_rk4" and "strang".
Scheme parse_scheme(const std::string& name);

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::lawson_rk4;
  bool dealias = true;
  int record_every = 1;
  /// Switches off u u_x1 (dispersion-only or linear damped runs).
  bool nonlinear = true;

  /// Throws std::invalid_argument naming the offending field. t_end = 0 is
  /// allowed and means zero steps.
  void validate() const;
  /// Number of steps t_end / dt; throws unless it is an integer to 1e-9.
  [[nodiscard]] std::int64_t step_count() const;
};

/// Raised when a step produces a non-finite value.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double t, const std::string& what);
  [[nodiscard]] double time() const { return t_; }

 private:
  double t_;
};

/// m(xi) = xi1 |xi|^2 for every stored wavevector (zero on the x1 Nyquist
/// plane, where the odd x1 factor has no real representative).
std::vector<double> linear_symbol(const GridSpec& grid);

/// Multiplies each coefficient by exp(i s m(xi)).
SpectralField propagate_linear(const SpectralField& F, double s);

/// -1/2 d/dx1 (u^2) - a u, with u^2 dealiased before differentiation when
/// `dealias` is set.
RealField nonlinear_rhs(const RealField& u, const DampingProfile& profile, bool dealias);

/// Fixed-step integrator with precomputed propagator factors. Not thread-safe;
/// give each run its own instance.
class Stepper {
 public:
  /// `dt` may be negative for backward runs.
  Stepper(std::shared_ptr<const DampingProfile> profile, double dt, Scheme scheme, bool dealias, bool nonlinear);

  /// Advances u_hat by one step starting at time t. Throws BlowUpError.
  void advance(SpectralField& u_hat, double t);

  /// Projects onto the retained band (identity when dealiasing is off).
  void project(SpectralField& F) const;

  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] const DampingProfile& profile() const { return *profile_; }

 private:
  void tendency(const SpectralField& U, SpectralField& out, double t);
  void check_finite(const SpectralField& U, double t) const;

  std::shared_ptr<const DampingProfile> profile_;
  std::shared_ptr<const FourierEngine> engine_;
  double dt_;
  Scheme scheme_;
  bool dealias_;
  bool nonlinear_;
  bool damped_;
  std::vector<std::complex<double>> half_, full_;
  std::vector<double> xi1_;
  std::vector<unsigned char> keep_;
  SpectralField k1_, k2_, k3_, k4_, stage_, scratch_, work_;
  RealField u_, product_;
};

struct SimulationState {
  double t = 0.0;
  RealField u;
  std::shared_ptr<const DampingProfile> profile;
  SolverConfig config;
  History history;
};

/// One step of `state.config` applied to `state`; appends no record.
SimulationState step(SimulationState state);

/// Integrates to config.t_end, recording at t = 0, every record_every steps
/// and at the final step. The initial datum is projected onto the retained
/// band when dealiasing is on.
SimulationState run(const RealField& u0, std::shared_ptr<const DampingProfile> profile, const SolverConfig& config);
SimulationState run(const RealField& u0, std::shared_ptr<const DampingProfile> profile, const SolverConfig& config,
                    const Recorder& recorder);

}  // namespace zkdamp
