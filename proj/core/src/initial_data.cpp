#include "zkdamp/initial_data.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "zkdamp/spectral.hpp"

namespace zkdamp {

RealField gaussian(const GridSpec& grid, double amplitude, double sigma, std::array<double, 3> center) {
  grid.validate();
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
  if (!std::isfinite(amplitude)) throw std::invalid_argument("gaussian: amplitude must be finite");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  return RealField::sample(grid, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
    return amplitude * std::exp(-r2 * inv);
  });
}

double h1_norm_sq(const RealField& u) {
  double s = quadrature(u * u);
  for (const auto& g : gradient(transform(u))) s += quadrature(g * g);
  return s;
}

RealField random_band_limited(const GridSpec& grid, std::uint64_t seed, int band, double h1_norm) {
  grid.validate();
  if (band < 1) throw std::invalid_argument("random_band_limited: band must be >= 1");
  if (!(h1_norm >= 0.0) || !std::isfinite(h1_norm)) {
    throw std::invalid_argument("random_band_limited: h1_norm must be finite and nonnegative");
  }
  for (int a = 0; a < grid.dim; ++a) {
    if (3 * band > grid.points[a]) {
      throw std::invalid_argument("random_band_limited: band exceeds the dealiased range of the grid");
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField F(grid);
  for (std::size_t i = 0; i < F.size(); ++i) {
    const auto k = F.wavevector(i);
    const int k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0 || k2 > band * band) continue;
    const double re = normal(rng);
    const double im = normal(rng);
    F[i] = {re, im};
  }
  // The round trip restores exact Hermitian symmetry on the self-conjugate planes.
  RealField u = inverse_transform(F);
  if (h1_norm == 0.0) return RealField(grid);
  const double current = std::sqrt(h1_norm_sq(u));
  u *= h1_norm / current;
  return u;
}

RealField load_field(const GridSpec& grid, const std::filesystem::path& path) {
  grid.validate();
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_field: cannot open " + path.string());
  std::vector<double> values;
  values.reserve(grid.size());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    std::string token;
    while (row >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(v)) {
        throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": bad value '" + token + "'");
      }
      values.push_back(v);
    }
  }
  if (values.size() != grid.size()) {
    throw std::invalid_argument("load_field: " + path.string() + " holds " + std::to_string(values.size()) +
                                " values, grid needs " + std::to_string(grid.size()));
  }
  return RealField(grid, std::move(values));
}

}  // namespace zkdamp
