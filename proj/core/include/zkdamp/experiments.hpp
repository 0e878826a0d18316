#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zkdamp/damping.hpp"
#include "zkdamp/dynamics.hpp"
#include "zkdamp/fit.hpp"
#include "zkdamp/functionals.hpp"

namespace zkdamp {

/// 2D: 256^2, 3D: 64^3, half_length 16 pi per axis.
GridSpec default_grid(int dim);

struct InitialDataSpec {
  enum class Kind { gaussian, random, file };
  Kind kind = Kind::gaussian;
  double amplitude = 1.0;
  double sigma = 1.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::uint64_t seed = 1;
  int band = 8;
  double h1_norm = 1.0;
  std::filesystem::path path;
};

std::string to_string(InitialDataSpec::Kind kind);
RealField make_initial_data(const GridSpec& grid, const InitialDataSpec& spec);

struct DampingSpec {
  DampingKind kind = DampingKind::localized;
  double alpha0 = 0.5;
  double R = 4.0;
  double ramp_width = 1.0;
  double plateau = 0.5;
  std::filesystem::path table;
};

DampingProfile make_damping(const GridSpec& grid, const DampingSpec& spec);

/// Shared knobs of every suite. Negative dt / t_end select the suite's own
/// default; each suite fixes the damping kind its claim is about.
struct SuiteConfig {
  GridSpec grid = default_grid(2);
  double dt = -1.0;
  double t_end = -1.0;
  Scheme scheme = Scheme::lawson_rk4;
  bool dealias = true;
  InitialDataSpec initial;
  DampingSpec damping;
  double rho_r = 2.0;
  double rho_transition = kDefaultRhoTransition;
  std::uint64_t seed = 1;
  /// Observability ensemble size N (the table is also built for 2N).
  int ensemble = 20;
  double epsilon = 0.1;
  int calibration = 100;
  int validation = 100;
  /// Grid, step and wavenumber band of the observability ensemble. The grid
  /// is coarser than the default so that 6N runs stay at desk scale; the band
  /// keeps the random data finer than the undamped slab.
  GridSpec observability_grid = GridSpec::uniform(2, 16.0 * 3.14159265358979323846, 128);
  double observability_dt = 0.02;
  int observability_band = 24;
  /// Worker threads for ensembles; 0 picks the hardware concurrency.
  unsigned workers = 0;
  /// Progress messages; null silences them.
  std::ostream* log = nullptr;
};

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  /// "<", "<=", ">", ">=" or "expect-fail" for negative controls.
  std::string relation;
  bool pass = false;
};

struct ExperimentResult {
  std::string name;
  /// Every parameter that determines the run, as text.
  std::map<std::string, std::string> params;
  std::map<std::string, History> series;
  std::map<std::string, DecayFit> fits;
  std::map<std::string, double> metrics;
  std::vector<Check> checks;
  bool pass = false;

  /// FNV-1a over the sorted "key=value" lines of params, as 16 hex digits.
  [[nodiscard]] std::string params_hash() const;
  /// One JSON object (no trailing newline): suite, params_hash, pass,
  /// fitted constants, metrics, checks and params.
  [[nodiscard]] std::string summary_json() const;
  /// Appends `c` and folds it into `pass`.
  void add_check(Check c);
};

ExperimentResult suite_conservation(const SuiteConfig& config);
ExperimentResult suite_uniform_decay(const SuiteConfig& config);
ExperimentResult suite_localized_decay(const SuiteConfig& config);
ExperimentResult suite_smoothing(const SuiteConfig& config);
ExperimentResult suite_observability(const SuiteConfig& config);
ExperimentResult suite_inequalities(const SuiteConfig& config);
/// Dispersion-only isometry and dt-halving self-convergence of the stepper.
ExperimentResult suite_convergence(const SuiteConfig& config);

/// Registered suite names in execution order.
const std::vector<std::string>& suite_names();
/// Throws std::invalid_argument for an unknown name.
ExperimentResult run_suite(const std::string& name, const SuiteConfig& config);

}  // namespace zkdamp
