#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nodegen/domain.hpp"

namespace nodegen {

/// Spherical coordinates: azimuth in [0, 2pi) from +x in the xy-plane,
/// polar angle in [0, pi] from +z.
struct Spherical {
  double r = 0.0;
  double azimuth = 0.0;
  double polar = 0.0;
};

Spherical to_spherical(ConstPoint x);

/// Gridded surface radii. Row index l runs over azimuth (a = l B), column
/// index m over polar angle (p = m B); rows = 2 cols and B = pi / cols.
class ElevationGrid {
 public:
  ElevationGrid(std::size_t rows, std::size_t cols, double outer_radius, std::vector<double> radii);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double angular_step() const noexcept { return step_; }
  double outer_radius() const noexcept { return outer_; }
  double radius(std::size_t row, std::size_t col) const { return radii_[row * cols_ + col]; }
  const std::vector<double>& radii() const noexcept { return radii_; }

  /// Interpolated surface radius in direction (azimuth, polar).
  double surface_radius(double azimuth, double polar) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  double step_;
  double outer_;
  std::vector<double> radii_;
};

/// Point inclusion for the shell between the interpolated surface and the
/// outer sphere: surface(a, p) < r < outer (both strict).
bool elevation_inclusion(const ElevationGrid& grid, const Spherical& x);
bool elevation_inclusion(const ElevationGrid& grid, ConstPoint x);

/// Base radius 1 plus a seeded sum of Gaussian bumps on the sphere, scaled so
/// that max |radius - 1| equals amplitude.
ElevationGrid synthetic_elevation(std::size_t rows, std::size_t cols, double amplitude,
                                  std::uint64_t seed, double outer_radius = 1.1);

/// Domain in physical coordinates with bounding box [-outer, outer]^3.
Domain elevation_domain(ElevationGrid grid);

void write_elevation(const ElevationGrid& grid, const std::string& path);
ElevationGrid read_elevation(const std::string& path);
/// One grid row (fixed azimuth) of radii per CSV line.
ElevationGrid read_elevation_csv(const std::string& path, double outer_radius);

}  // namespace nodegen
