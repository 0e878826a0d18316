#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace zkdamp {

/// Periodic box [-L_i, L_i] sampled with an even number of points per axis.
///
/// Axis 0 is the propagation direction x1; the remaining axes are the
/// transverse variables. Storage is row-major with axis 0 slowest, so the
/// half-spectrum produced by the real-to-complex transform is taken along the
/// last axis.
struct GridSpec {
  int dim = 2;
  std::array<double, 3> half_length{0.0, 0.0, 0.0};
  std::array<int, 3> points{1, 1, 1};

  /// Isotropic grid; unused axes are set to a single point.
  static GridSpec uniform(int dim, double half_length, int points);

  /// Throws std::invalid_argument naming the violated invariant.
  void validate() const;

  [[nodiscard]] std::size_t size() const;
  /// Number of complex coefficients in the half-spectrum layout.
  [[nodiscard]] std::size_t spectral_size() const;
  [[nodiscard]] int spectral_points(int axis) const;

  [[nodiscard]] double spacing(int axis) const;
  [[nodiscard]] double cell_volume() const;
  [[nodiscard]] double volume() const;
  [[nodiscard]] double coordinate(int axis, int index) const;

  /// Signed integer wavenumber stored at position `index` along `axis` in the
  /// half-spectrum layout.
  [[nodiscard]] int wavenumber(int axis, int index) const;
  /// Physical frequency pi*k/L for integer wavenumber k.
  [[nodiscard]] double frequency(int axis, int k) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Real samples u(x) on a GridSpec.
class RealField {
 public:
  RealField() = default;
  explicit RealField(const GridSpec& grid, double fill = 0.0);
  RealField(const GridSpec& grid, std::vector<double> values);

  /// Samples f(x) at every grid point; `f` receives the coordinate triple
  /// (unused axes are zero).
  template <typename F>
  static RealField sample(const GridSpec& grid, F&& f);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<double> values() { return values_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// True when every sample is finite; `bad_index` receives the first failure.
  [[nodiscard]] bool all_finite(std::size_t* bad_index = nullptr) const;

  /// Coordinates of the flat sample index.
  [[nodiscard]] std::array<double, 3> position(std::size_t flat) const;
  [[nodiscard]] std::array<int, 3> multi_index(std::size_t flat) const;

  RealField& operator+=(const RealField& other);
  RealField& operator-=(const RealField& other);
  RealField& operator*=(double s);

 private:
  GridSpec grid_{};
  std::vector<double> values_;
};

RealField operator*(const RealField& a, const RealField& b);
RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double s, RealField a);

/// Fourier-series coefficients of a real field in half-spectrum layout.
///
/// coeffs are normalized so that f(x) = sum_k c_k exp(i xi_k . (x + L)); the
/// Hermitian half along the last axis is implicit.
class SpectralField {
 public:
  using Complex = std::complex<double>;

  SpectralField() = default;
  explicit SpectralField(const GridSpec& grid);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return coeffs_.size(); }
  [[nodiscard]] std::span<Complex> coeffs() { return coeffs_; }
  [[nodiscard]] std::span<const Complex> coeffs() const { return coeffs_; }
  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }

  /// Signed wavenumbers of a flat half-spectrum index.
  [[nodiscard]] std::array<int, 3> wavevector(std::size_t flat) const;

  /// Coefficient at arbitrary signed wavevector, reconstructing the hidden
  /// half through Hermitian symmetry. Wavenumbers are taken modulo N.
  [[nodiscard]] Complex at(std::array<int, 3> k) const;

  /// Multiplicity of a stored coefficient in the full spectrum (1 or 2).
  [[nodiscard]] double multiplicity(std::size_t flat) const;

  /// sum over the full spectrum of |c_k|^2.
  [[nodiscard]] double power() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator*=(double s);

 private:
  GridSpec grid_{};
  std::vector<Complex> coeffs_;
};

template <typename F>
RealField RealField::sample(const GridSpec& grid, F&& f) {
  RealField out(grid);
  const int n0 = grid.points[0], n1 = grid.points[1], n2 = grid.points[2];
  std::size_t flat = 0;
  for (int i = 0; i < n0; ++i) {
    const double x0 = grid.coordinate(0, i);
    for (int j = 0; j < n1; ++j) {
      const double x1 = grid.dim >= 2 ? grid.coordinate(1, j) : 0.0;
      for (int l = 0; l < n2; ++l) {
        const double x2 = grid.dim >= 3 ? grid.coordinate(2, l) : 0.0;
        out.values_[flat++] = f(std::array<double, 3>{x0, x1, x2});
      }
    }
  }
  return out;
}

}  // namespace zkdamp
