#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zkdamp/grid.hpp"

namespace zkdamp {

enum class DampingKind { none, uniform, localized, custom };

std::string to_string(DampingKind kind);

/// Damping coefficient a(x) >= 0 with its analytic gradient.
///
/// For `localized` and `custom` profiles the lower bound alpha0 is required
/// only on the region |x1| > R. `none` is the undamped equation (a = 0).
struct DampingProfile {
  GridSpec grid;
  RealField a;
  std::vector<RealField> grad_a;
  double alpha0 = 0.0;
  double R = 0.0;
  double ramp_width = 0.0;
  double plateau = 0.0;
  DampingKind kind = DampingKind::none;

  [[nodiscard]] double sup_norm() const;
  [[nodiscard]] double grad_sup_norm() const;
  [[nodiscard]] bool is_zero() const;
};

DampingProfile make_no_damping(const GridSpec& grid);
DampingProfile make_uniform_damping(const GridSpec& grid, double alpha0);

/// a(x) = plateau * S((|x1| - (R - ramp_width)) / ramp_width) with the
/// smoothstep S(t) = t^2 (3 - 2t) clamped to [0, 1].
DampingProfile make_localized_damping(const GridSpec& grid, double alpha0, double R, double ramp_width,
                                      double plateau);

/// Custom profile from a two-column (x1, a) table, '#' comments allowed. The
/// table is interpolated linearly and held constant beyond its end points.
DampingProfile load_damping_table(const GridSpec& grid, std::istream& in, double alpha0, double R);
DampingProfile load_damping_table(const GridSpec& grid, const std::filesystem::path& path, double alpha0,
                                  double R);

struct DampingReport {
  double min_a = 0.0;
  double sup_a = 0.0;
  double sup_grad_a = 0.0;
  /// Minimum of a over the grid points with |x1| > R (over every point for
  /// uniform profiles). Infinity when the region holds no grid points.
  double min_outside_R = 0.0;
  bool pass = false;
  std::optional<std::array<double, 3>> violation;
  std::string message;
};

DampingReport validate_damping(const DampingProfile& profile);

enum class WeightKind { rho, psi };

/// Weight w(x1) sampled on the x1 axis with closed-form derivatives.
///
/// rho: w' = 1 on [-r, r]; beyond it w' = exp(-g(|x1| - r)) where g' is a C-infinity
/// step rising from 0 to 1 over `transition` and g' = 1 afterwards, so that
/// |w''| = g' w' <= w' and the tail is the exponential exp(-(|x1| - r - transition/2)).
/// w is shifted by its total variation so it stays positive.
///
/// psi: w = exp(x1 - x1_max), so w' = w'' = w''' = w.
struct WeightFunction {
  WeightKind kind = WeightKind::rho;
  double r = 0.0;
  double transition = 0.0;
  std::vector<double> x1;
  std::vector<double> w, d1, d2, d3;

  /// Spreads samples along x1 to a full-grid field.
  [[nodiscard]] RealField broadcast(const GridSpec& grid, const std::vector<double>& samples) const;
  [[nodiscard]] double sup_norm() const;
};

inline constexpr double kDefaultRhoTransition = 4.0;

WeightFunction make_weight(const GridSpec& grid, double r, WeightKind kind,
                           double transition = kDefaultRhoTransition);

/// Pointwise evaluation of the rho construction (value, d1, d2, d3).
std::array<double, 4> rho_weight_at(double x1, double r, double transition);

}  // namespace zkdamp
