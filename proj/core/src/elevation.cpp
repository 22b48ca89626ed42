#include "nodegen/elevation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "nodegen/rng.hpp"

namespace nodegen {

namespace {

constexpr char kMagic[4] = {'E', 'L', 'E', 'V'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in, std::size_t& offset) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParseError("truncated elevation file", offset);
  offset += sizeof(T);
  return value;
}

}  // namespace

Spherical to_spherical(ConstPoint x) {
  if (x.size() != 3) throw ConfigError("spherical coordinates need d = 3");
  for (double v : x)
    if (std::isnan(v)) throw InputError("NaN coordinate");
  Spherical s;
  s.r = norm(x);
  double a = std::atan2(x[1], x[0]);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  if (a >= 2.0 * std::numbers::pi) a = 0.0;
  s.azimuth = a;
  s.polar = s.r > 0.0 ? std::acos(std::clamp(x[2] / s.r, -1.0, 1.0)) : 0.0;
  return s;
}

ElevationGrid::ElevationGrid(std::size_t rows, std::size_t cols, double outer_radius,
                             std::vector<double> radii)
    : rows_(rows), cols_(cols), outer_(outer_radius), radii_(std::move(radii)) {
  if (rows_ < 2 || cols_ < 1) throw ConfigError("elevation grid is too small");
  if (rows_ != 2 * cols_) throw ConfigError("elevation grid needs rows = 2 * cols");
  if (radii_.size() != rows_ * cols_) throw ConfigError("elevation grid size mismatch");
  for (double r : radii_)
    if (!(r > 0.0 && r < outer_)) throw ConfigError("elevation radii must lie in (0, outer_radius)");
  step_ = std::numbers::pi / static_cast<double>(cols_);
}

double ElevationGrid::surface_radius(double azimuth, double polar) const {
  auto l = static_cast<std::size_t>(std::floor(azimuth / step_));
  l %= rows_;
  auto m_signed = static_cast<long long>(std::floor(polar / step_));
  const auto m = static_cast<std::size_t>(std::clamp<long long>(m_signed, 0, static_cast<long long>(cols_) - 1));
  // The polar seam has no row m + 1; clamp to the last column.
  const std::size_t m_next = std::min(m + 1, cols_ - 1);
  const std::size_t l_next = (l + 1) % rows_;
  const double a1 = static_cast<double>(l) * step_;
  const double p1 = static_cast<double>(m) * step_;
  const double r1 = radius(l, m);
  const double r2 = radius(l_next, m);
  const double r3 = radius(l, m_next);
  return r1 + (azimuth - a1) / step_ * (r2 - r1) + (polar - p1) / step_ * (r3 - r1);
}

bool elevation_inclusion(const ElevationGrid& grid, const Spherical& x) {
  if (std::isnan(x.r) || std::isnan(x.azimuth) || std::isnan(x.polar))
    throw InputError("NaN coordinate");
  if (!(x.r > 0.0)) throw DomainError("elevation inclusion needs r > 0");
  return grid.surface_radius(x.azimuth, x.polar) < x.r && x.r < grid.outer_radius();
}

bool elevation_inclusion(const ElevationGrid& grid, ConstPoint x) {
  return elevation_inclusion(grid, to_spherical(x));
}

ElevationGrid synthetic_elevation(std::size_t rows, std::size_t cols, double amplitude,
                                  std::uint64_t seed, double outer_radius) {
  if (rows < 4 || cols < 4) throw ConfigError("synthetic elevation needs rows, cols >= 4");
  if (!(amplitude >= 0.0 && amplitude < outer_radius - 1.0))
    throw ConfigError("synthetic elevation amplitude must lie in [0, outer_radius - 1)");
  constexpr int kBumps = 12;
  Rng rng(seed);
  struct Bump {
    double x, y, z, width, weight;
  };
  std::vector<Bump> bumps;
  for (int b = 0; b < kBumps; ++b) {
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double rxy = std::sqrt(1.0 - z * z);
    bumps.push_back({rxy * std::cos(phi), rxy * std::sin(phi), z, rng.uniform(0.15, 0.6),
                     rng.uniform(-1.0, 1.0)});
  }
  const double step = std::numbers::pi / static_cast<double>(cols);
  std::vector<double> field(rows * cols, 0.0);
  double peak = 0.0;
  for (std::size_t l = 0; l < rows; ++l) {
    const double a = static_cast<double>(l) * step;
    for (std::size_t m = 0; m < cols; ++m) {
      const double p = static_cast<double>(m) * step;
      const double ux = std::sin(p) * std::cos(a);
      const double uy = std::sin(p) * std::sin(a);
      const double uz = std::cos(p);
      double v = 0.0;
      for (const Bump& b : bumps) {
        const double chord2 = (ux - b.x) * (ux - b.x) + (uy - b.y) * (uy - b.y) + (uz - b.z) * (uz - b.z);
        v += b.weight * std::exp(-chord2 / (2.0 * b.width * b.width));
      }
      field[l * cols + m] = v;
      peak = std::max(peak, std::abs(v));
    }
  }
  std::vector<double> radii(rows * cols, 1.0);
  if (amplitude > 0.0 && peak > 0.0)
    for (std::size_t i = 0; i < radii.size(); ++i) radii[i] = 1.0 + amplitude * field[i] / peak;
  return ElevationGrid(rows, cols, outer_radius, std::move(radii));
}

Domain elevation_domain(ElevationGrid grid) {
  Domain dom;
  dom.dim = 3;
  dom.bounding_box = Box::cube(3, -grid.outer_radius(), grid.outer_radius());
  auto shared = std::make_shared<const ElevationGrid>(std::move(grid));
  dom.inside = [shared](ConstPoint x) {
    const Spherical s = to_spherical(x);
    if (!(s.r > 0.0)) return false;  // the center lies inside the planet
    return elevation_inclusion(*shared, s);
  };
  return dom;
}

void write_elevation(const ElevationGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.cols()));
  put<double>(out, grid.outer_radius());
  for (double r : grid.radii()) put<double>(out, r);
  if (!out) throw IoError("write failed for " + path);
}

ElevationGrid read_elevation(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::size_t offset = 0;
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw ParseError("bad elevation magic", 0);
  offset = 4;
  const auto version = get<std::uint32_t>(in, offset);
  if (version != kVersion) throw ParseError("unsupported elevation version", 4);
  const auto rows = get<std::uint32_t>(in, offset);
  const auto cols = get<std::uint32_t>(in, offset);
  const auto outer = get<double>(in, offset);
  std::vector<double> radii(static_cast<std::size_t>(rows) * cols);
  for (double& r : radii) r = get<double>(in, offset);
  return ElevationGrid(rows, cols, outer, std::move(radii));
}

ElevationGrid read_elevation_csv(const std::string& path, double outer_radius) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<double> radii;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      const std::string cell = line.substr(pos, comma - pos);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw ParseError("invalid radius '" + cell + "'", line_start + pos);
      }
      radii.push_back(v);
      ++count;
      pos = comma + 1;
    }
    if (cols == 0) cols = count;
    if (count != cols) throw ParseError("ragged elevation row", line_start);
    ++rows;
  }
  return ElevationGrid(rows, cols, outer_radius, std::move(radii));
}

}  // namespace nodegen
