#pragma once

#include <array>
#include <span>

#include "zkdamp/functionals.hpp"

namespace zkdamp {

struct DecayFit {
  double delta_hat = 0.0;
  /// Intercept of the fitted line minus ln q(0).
  double lnC_hat = 0.0;
  double r_squared = 0.0;
  std::array<double, 2> window{0.0, 0.0};
  std::size_t samples = 0;
};

/// Least-squares line through (t, ln q) over samples with t in window.
/// q(0) is the first sample of the whole series. Requires >= 5 samples in the
/// window, all positive.
DecayFit fit_decay(std::span<const double> t, std::span<const double> q, std::array<double, 2> window);

/// Convenience: fit a functional of the recorded history.
DecayFit fit_decay(const History& history, double (*value)(const EnergyRecord&), std::array<double, 2> window);

}  // namespace zkdamp
