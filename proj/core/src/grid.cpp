#include "zkdamp/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace zkdamp {

GridSpec GridSpec::uniform(int dim, double half_length, int points) {
  GridSpec g;
  g.dim = dim;
  for (int a = 0; a < 3; ++a) {
    const bool active = a < dim;
    g.half_length[a] = active ? half_length : 0.0;
    g.points[a] = active ? points : 1;
  }
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("GridSpec: dim must be 2 or 3, got " + std::to_string(dim));
  }
  for (int a = 0; a < dim; ++a) {
    if (!(half_length[a] > 0.0) || !std::isfinite(half_length[a])) {
      std::ostringstream os;
      os << "GridSpec: half_length[" << a << "] must be positive and finite, got " << half_length[a];
      throw std::invalid_argument(os.str());
    }
    if (points[a] < 8 || points[a] % 2 != 0) {
      std::ostringstream os;
      os << "GridSpec: points[" << a << "] must be even and >= 8, got " << points[a];
      throw std::invalid_argument(os.str());
    }
  }
  for (int a = dim; a < 3; ++a) {
    if (points[a] != 1) {
      throw std::invalid_argument("GridSpec: inactive axes must have exactly one point");
    }
  }
}

std::size_t GridSpec::size() const {
  return static_cast<std::size_t>(points[0]) * points[1] * points[2];
}

int GridSpec::spectral_points(int axis) const {
  return axis == dim - 1 ? points[axis] / 2 + 1 : points[axis];
}

std::size_t GridSpec::spectral_size() const {
  std::size_t n = 1;
  for (int a = 0; a < 3; ++a) n *= static_cast<std::size_t>(spectral_points(a));
  return n;
}

double GridSpec::spacing(int axis) const { return 2.0 * half_length[axis] / points[axis]; }

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

double GridSpec::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= 2.0 * half_length[a];
  return v;
}

double GridSpec::coordinate(int axis, int index) const {
  return -half_length[axis] + index * spacing(axis);
}

int GridSpec::wavenumber(int axis, int index) const {
  if (axis >= dim) return 0;
  if (axis == dim - 1) return index;  // half-spectrum axis holds 0..N/2
  const int n = points[axis];
  return index <= n / 2 ? index : index - n;
}

double GridSpec::frequency(int axis, int k) const {
  if (axis >= dim) return 0.0;
  return std::numbers::pi * k / half_length[axis];
}

RealField::RealField(const GridSpec& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

RealField::RealField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("RealField: value count does not match grid size");
  }
}

bool RealField::all_finite(std::size_t* bad_index) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      if (bad_index) *bad_index = i;
      return false;
    }
  }
  return true;
}

std::array<int, 3> RealField::multi_index(std::size_t flat) const {
  const auto n1 = static_cast<std::size_t>(grid_.points[1]);
  const auto n2 = static_cast<std::size_t>(grid_.points[2]);
  return {static_cast<int>(flat / (n1 * n2)), static_cast<int>((flat / n2) % n1),
          static_cast<int>(flat % n2)};
}

std::array<double, 3> RealField::position(std::size_t flat) const {
  const auto idx = multi_index(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < grid_.dim; ++a) x[a] = grid_.coordinate(a, idx[a]);
  return x;
}

namespace {
void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grids do not match");
}
}  // namespace

RealField& RealField::operator+=(const RealField& other) {
  require_same_grid(grid_, other.grid_, "RealField::operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

RealField& RealField::operator-=(const RealField& other) {
  require_same_grid(grid_, other.grid_, "RealField::operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

RealField& RealField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

RealField operator*(const RealField& a, const RealField& b) {
  require_same_grid(a.grid(), b.grid(), "RealField product");
  RealField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double s, RealField a) { return a *= s; }

SpectralField::SpectralField(const GridSpec& grid) : grid_(grid), coeffs_(grid.spectral_size()) {}

std::array<int, 3> SpectralField::wavevector(std::size_t flat) const {
  const auto m1 = static_cast<std::size_t>(grid_.spectral_points(1));
  const auto m2 = static_cast<std::size_t>(grid_.spectral_points(2));
  const int i0 = static_cast<int>(flat / (m1 * m2));
  const int i1 = static_cast<int>((flat / m2) % m1);
  const int i2 = static_cast<int>(flat % m2);
  return {grid_.wavenumber(0, i0), grid_.wavenumber(1, i1), grid_.wavenumber(2, i2)};
}

SpectralField::Complex SpectralField::at(std::array<int, 3> k) const {
  const int last = grid_.dim - 1;
  for (int a = 0; a < grid_.dim; ++a) {
    const int n = grid_.points[a];
    k[a] = ((k[a] % n) + n) % n;  // 0..n-1
  }
  bool conjugate = false;
  if (k[last] > grid_.points[last] / 2) {
    conjugate = true;
    for (int a = 0; a < grid_.dim; ++a) k[a] = (grid_.points[a] - k[a]) % grid_.points[a];
  }
  const auto m1 = static_cast<std::size_t>(grid_.spectral_points(1));
  const auto m2 = static_cast<std::size_t>(grid_.spectral_points(2));
  const std::size_t flat = (static_cast<std::size_t>(k[0]) * m1 + k[1]) * m2 + k[2];
  return conjugate ? std::conj(coeffs_[flat]) : coeffs_[flat];
}

double SpectralField::multiplicity(std::size_t flat) const {
  const int last = grid_.dim - 1;
  const int k = wavevector(flat)[last];
  return (k == 0 || k == grid_.points[last] / 2) ? 1.0 : 2.0;
}

double SpectralField::power() const {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) s += multiplicity(i) * std::norm(coeffs_[i]);
  return s;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("SpectralField::operator+=: grids do not match");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

}  // namespace zkdamp
