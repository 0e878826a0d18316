#pragma once

#include <array>
#include <memory>
#include <vector>

#include "zkdamp/grid.hpp"

namespace zkdamp {

/// Forward transform. Rejects non-finite samples with std::domain_error.
SpectralField transform(const RealField& f);
RealField inverse_transform(const SpectralField& F);

/// Multiplies each coefficient by (i xi_axis)^order, order 1 or 2. The
/// Nyquist mode of `axis` is zeroed for odd orders.
SpectralField derivative(const SpectralField& F, int axis, int order);

/// Two-thirds rule: zero every mode with |k_i| > N_i/3 on some axis.
SpectralField dealias(const SpectralField& F);
void dealias_in_place(SpectralField& F);
[[nodiscard]] bool dealias_keeps(const GridSpec& grid, const std::array<int, 3>& k);

/// Rectangle rule cell_volume * sum(values).
double quadrature(const RealField& f);
double quadrature_weighted(const RealField& f, const RealField& w);

/// Physical-space gradient components of a spectral field.
std::vector<RealField> gradient(const SpectralField& F);

/// Alias-free grid product of two band-limited fields: inverse of
/// dealias(transform(f * g)).
RealField dealiased_product(const RealField& f, const RealField& g);

/// Per-grid cached FFTW plans. Execution is thread-safe; plan creation is
/// serialized internally. Most callers use the free functions above.
class FourierEngine {
 public:
  static std::shared_ptr<const FourierEngine> for_grid(const GridSpec& grid);

  explicit FourierEngine(const GridSpec& grid);
  ~FourierEngine();
  FourierEngine(const FourierEngine&) = delete;
  FourierEngine& operator=(const FourierEngine&) = delete;

  [[nodiscard]] const GridSpec& grid() const { return grid_; }

  /// Unchecked transforms into caller-owned storage. `scratch` must hold
  /// grid.spectral_size() entries; the input of backward() is preserved.
  void forward(const RealField& in, SpectralField& out) const;
  void backward(const SpectralField& in, RealField& out, SpectralField& scratch) const;

 private:
  struct Plans;
  GridSpec grid_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace zkdamp
