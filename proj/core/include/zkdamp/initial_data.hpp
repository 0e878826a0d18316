#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "zkdamp/grid.hpp"

namespace zkdamp {

/// A exp(-|x - c|^2 / (2 sigma^2)).
RealField gaussian(const GridSpec& grid, double amplitude, double sigma, std::array<double, 3> center = {});

/// Zero-mean field whose Fourier coefficients are independent standard
/// normals on the integer wavevectors 0 < |k| <= band and zero elsewhere,
/// rescaled so that ||u||_{H^1} = h1_norm. Deterministic in `seed`.
RealField random_band_limited(const GridSpec& grid, std::uint64_t seed, int band, double h1_norm);

/// ||u||_{H^1}^2 = int u^2 + int |grad u|^2 with a spectral gradient.
double h1_norm_sq(const RealField& u);

/// Reads grid values in row-major order (axis 0 slowest), whitespace
/// separated, '#' starting a comment line.
RealField load_field(const GridSpec& grid, const std::filesystem::path& path);

}  // namespace zkdamp
