#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "zkdamp/experiments.hpp"

namespace zkdamp::cli {

/// Rejected configuration; the message names the offending key and location.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything one invocation needs. Keys are documented in the README; each
/// maps to exactly one field here.
struct RunConfig {
  GridSpec grid = default_grid(2);
  SolverConfig solver;
  /// Whether [solver] dt / t_end were given; suites otherwise use their own defaults.
  bool dt_set = false;
  bool t_end_set = false;
  DampingSpec damping;
  InitialDataSpec initial;
  double rho_r = 2.0;
  double rho_transition = kDefaultRhoTransition;
  std::string suite;
  std::uint64_t seed = 1;
  int ensemble = 20;
  double epsilon = 0.1;
  int calibration = 100;
  int validation = 100;
  /// Resolved per dimension: 128 points and band 24 in 2D, 32 and 8 in 3D.
  int observability_points = 128;
  int observability_band = 24;
  double observability_dt = 0.02;
  unsigned workers = 0;
  std::filesystem::path output_dir = "zkdamp-out";

  [[nodiscard]] SuiteConfig suite_config() const;
};

/// Parses a flat sectioned key = value document. Throws ConfigError on a
/// missing file, syntax error, unknown key, type mismatch or violated
/// precondition.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

}  // namespace zkdamp::cli
