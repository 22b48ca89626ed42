#include "nodegen/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "nodegen/error.hpp"
#include "nodegen/parallel.hpp"
#include "nodegen/rng.hpp"
#include "nodegen/spatial_index.hpp"

namespace nodegen {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) r *= base;
  return r;
}

// Offsets in {-1,0,1}^d for the chosen adjacency, the zero offset included.
std::vector<std::vector<int>> neighbor_offsets(std::size_t d, Adjacency adjacency) {
  std::vector<std::vector<int>> out;
  out.push_back(std::vector<int>(d, 0));
  if (adjacency == Adjacency::Face) {
    for (std::size_t k = 0; k < d; ++k)
      for (int s : {-1, 1}) {
        std::vector<int> o(d, 0);
        o[k] = s;
        out.push_back(o);
      }
    return out;
  }
  const std::size_t total = ipow(3, d);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<int> o(d);
    std::size_t code = c;
    bool zero = true;
    for (std::size_t k = 0; k < d; ++k) {
      o[k] = static_cast<int>(code % 3) - 1;
      code /= 3;
      zero = zero && o[k] == 0;
    }
    if (!zero) out.push_back(o);
  }
  return out;
}

}  // namespace

const char* to_string(Adjacency adjacency) { return adjacency == Adjacency::Face ? "face" : "vertex"; }

Adjacency parse_adjacency(const std::string& name) {
  if (name == "face") return Adjacency::Face;
  if (name == "vertex") return Adjacency::Vertex;
  throw ConfigError("unknown adjacency '" + name + "' (expected face or vertex)");
}

QmcSource::QmcSource(QmcFamily family, std::size_t dim, std::vector<PointSet> configs, SeparationTable table)
    : family_(family), dim_(dim), configs_(std::move(configs)), table_(std::move(table)), lambda_(table_) {
  if (configs_.size() != table_.n_max()) throw ConfigError("configuration count does not match the table");
}

QmcSource QmcSource::lattice(std::size_t n_max, const LatticeParams& params, std::size_t d) {
  std::vector<PointSet> configs(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) configs[n - 1] = irrational_lattice(n, params, d);
  return QmcSource(QmcFamily::IrrationalLattice, d, std::move(configs), tabulate_lattice_separation(n_max, params, d));
}

QmcSource QmcSource::minimizers(std::size_t n_max, const TorusMinimizerParams& params, std::size_t d,
                                const std::string& fixture_dir) {
  auto configs = torus_minimizers(n_max, params, d, fixture_dir);
  auto table = tabulate_minimizer_separation(configs);
  return QmcSource(QmcFamily::TorusMinimizer, d, std::move(configs), std::move(table));
}

QmcSource QmcSource::from_configs(QmcFamily family, std::vector<PointSet> configs, SeparationTable table) {
  if (configs.empty()) throw ConfigError("no configurations supplied");
  const std::size_t d = configs.front().dim();
  return QmcSource(family, d, std::move(configs), std::move(table));
}

VoxelGrid::VoxelGrid(std::size_t dim, std::size_t m_per_side) : dim_(dim), m_(m_per_side) {
  if (dim < 1) throw ConfigError("voxel grid dimension must be positive");
  if (m_per_side < 1) throw ConfigError("voxel count per side must be at least 1");
  count_ = ipow(m_, dim_);
  rho_bar.assign(count_, 0.0);
  selected.assign(count_, 0);
  node_count.assign(count_, 0);
}

std::vector<std::size_t> VoxelGrid::multi_index(std::size_t m) const {
  std::vector<std::size_t> idx(dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    idx[k] = m % m_;
    m /= m_;
  }
  return idx;
}

std::size_t VoxelGrid::flat_index(const std::vector<std::size_t>& idx) const {
  std::size_t m = 0;
  for (std::size_t k = dim_; k-- > 0;) m = m * m_ + idx[k];
  return m;
}

Vec VoxelGrid::corner(std::size_t m) const {
  Vec c(dim_);
  const auto idx = multi_index(m);
  for (std::size_t k = 0; k < dim_; ++k) c[k] = static_cast<double>(idx[k]) / static_cast<double>(m_);
  return c;
}

Vec VoxelGrid::center(std::size_t m) const {
  Vec c = corner(m);
  for (double& v : c) v += 0.5 / static_cast<double>(m_);
  return c;
}

std::size_t select_voxels(VoxelGrid& grid, const Domain& domain, Adjacency adjacency) {
  const std::size_t d = grid.dim();
  const std::size_t M = grid.m_per_side();
  const std::size_t corners = ipow(M + 1, d);
  std::vector<std::uint8_t> corner_inside(corners, 0);
  parallel_for(corners, [&](std::size_t b, std::size_t e) {
    Vec x(d);
    for (std::size_t c = b; c < e; ++c) {
      std::size_t code = c;
      for (std::size_t k = 0; k < d; ++k) {
        x[k] = static_cast<double>(code % (M + 1)) / static_cast<double>(M);
        code /= M + 1;
      }
      corner_inside[c] = domain.contains(x) ? 1 : 0;
    }
  });

  const std::size_t n = grid.voxel_count();
  std::vector<std::uint8_t> touches(n, 0);
  const std::size_t vertex_count = ipow(2, d);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t m = b; m < e; ++m) {
      const auto idx = grid.multi_index(m);
      for (std::size_t v = 0; v < vertex_count && !touches[m]; ++v) {
        std::size_t c = 0;
        for (std::size_t k = d; k-- > 0;) c = c * (M + 1) + idx[k] + ((v >> k) & 1);
        if (corner_inside[c]) touches[m] = 1;
      }
    }
  });

  const auto offsets = neighbor_offsets(d, adjacency);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    std::vector<std::size_t> nb(d);
    for (std::size_t m = b; m < e; ++m) {
      const auto idx = grid.multi_index(m);
      std::uint8_t sel = 0;
      for (const auto& o : offsets) {
        bool valid = true;
        for (std::size_t k = 0; k < d && valid; ++k) {
          const long v = static_cast<long>(idx[k]) + o[k];
          valid = v >= 0 && v < static_cast<long>(M);
          nb[k] = static_cast<std::size_t>(v);
        }
        if (valid && touches[grid.flat_index(nb)]) {
          sel = 1;
          break;
        }
      }
      grid.selected[m] = sel;
    }
  });
  return corners;
}

std::size_t voxel_node_count(double rho_bar, std::size_t M, const LambdaInverse& lambda) {
  if (!(rho_bar > 0.0)) throw DomainError("voxel density average must be positive");
  return lambda(rho_bar * static_cast<double>(M));
}

PointSet fill_voxel(const VoxelGrid& grid, std::size_t m, std::size_t n, const QmcSource& source, double c_d,
                    std::uint64_t seed) {
  const std::size_t d = grid.dim();
  PointSet out(d);
  if (n == 0) return out;
  n = std::min(n, source.n_max());
  const double M = static_cast<double>(grid.m_per_side());
  const bool lattice = source.family() == QmcFamily::IrrationalLattice;
  const double nref = static_cast<double>(lattice ? source.n_max() : n);
  const double f = 1.0 - c_d * std::pow(nref, -1.0 / static_cast<double>(d));
  const double h = 0.5 * (1.0 - f);

  std::vector<std::size_t> sigma(d);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  if (lattice) {
    Rng rng(mix_seed(seed, m));
    rng.shuffle(sigma.begin(), sigma.end());
  }
  const Vec corner = grid.corner(m);
  const PointSet& base = source.config(n);
  out.reserve(n);
  Vec p(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = base[i];
    for (std::size_t k = 0; k < d; ++k) p[k] = corner[k] + (f * q[sigma[k]] + h) / M;
    out.push_back(p);
  }
  return out;
}

SaturationResult saturate(const VoxelGrid& grid, const PointSet& existing, const RadialDensity& rho) {
  SaturationResult result;
  const std::size_t d = grid.dim();
  const std::size_t M = grid.m_per_side();
  result.added = PointSet(d);
  std::optional<KdTree> tree;
  if (!existing.empty()) tree.emplace(existing);

  struct Candidate {
    double rho;
    std::size_t m;
  };
  std::vector<Candidate> candidates;
  for (std::size_t m = 0; m < grid.voxel_count(); ++m) {
    if (!grid.selected[m] || grid.node_count[m] != 0) continue;
    const Vec z = grid.center(m);
    candidates.push_back({rho(z), m});
    ++result.density_evaluations;
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.rho < b.rho || (a.rho == b.rho && a.m < b.m);
  });

  std::vector<std::uint8_t> occupied(grid.voxel_count(), 0);
  std::vector<std::size_t> accepted;
  const double side = grid.side();

  auto far_from_accepted = [&](const Vec& z, std::size_t m, double r) {
    const double reach = std::ceil(r / side);
    double box = 1.0;
    for (std::size_t k = 0; k < d; ++k) box *= 2.0 * reach + 1.0;
    const double r2 = r * r;
    if (box > static_cast<double>(accepted.size())) {
      for (std::size_t a : accepted)
        if (squared_distance(z, grid.center(a)) <= r2) return false;
      return true;
    }
    const auto idx = grid.multi_index(m);
    const long R = static_cast<long>(reach);
    std::vector<long> lo(d), hi(d), cur(d);
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::max<long>(0, static_cast<long>(idx[k]) - R);
      hi[k] = std::min<long>(static_cast<long>(M) - 1, static_cast<long>(idx[k]) + R);
      cur[k] = lo[k];
    }
    std::vector<std::size_t> nb(d);
    while (true) {
      for (std::size_t k = 0; k < d; ++k) nb[k] = static_cast<std::size_t>(cur[k]);
      const std::size_t q = grid.flat_index(nb);
      if (occupied[q] && squared_distance(z, grid.center(q)) <= r2) return false;
      std::size_t k = 0;
      while (k < d && ++cur[k] > hi[k]) {
        cur[k] = lo[k];
        ++k;
      }
      if (k == d) break;
    }
    return true;
  };

  // Each pass re-derives the candidate set from the current nodes. Rejections
  // are permanent because nodes are only ever added, so the second pass
  // confirms the fixed point.
  std::vector<std::uint8_t> done(grid.voxel_count(), 0);
  while (true) {
    ++result.passes;
    std::size_t added_this_pass = 0;
    for (const auto& c : candidates) {
      if (done[c.m]) continue;
      const Vec z = grid.center(c.m);
      if (tree && !(tree->nearest_distance(z) > c.rho)) continue;
      if (!far_from_accepted(z, c.m, c.rho)) continue;
      occupied[c.m] = 1;
      done[c.m] = 1;
      accepted.push_back(c.m);
      result.added.push_back(z);
      result.voxels.push_back(c.m);
      ++added_this_pass;
    }
    if (added_this_pass == 0) break;
  }
  return result;
}

PointSet cleanup(const PointSet& nodes, const Domain& domain) {
  PointSet out(nodes.dim());
  out.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (domain.contains(nodes[i])) out.push_back(nodes[i]);
  return out;
}

std::size_t auto_voxel_count(const Domain& domain, const RadialDensity& rho, const QmcSource& source) {
  const std::size_t d = domain.dim;
  const PointSet probes = halton(4096, d);
  double rho_min = std::numeric_limits<double>::infinity();
  double rho_min_any = rho_min;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double r = rho(probes[i]);
    rho_min_any = std::min(rho_min_any, r);
    if (domain.contains(probes[i])) rho_min = std::min(rho_min, r);
  }
  if (!std::isfinite(rho_min)) rho_min = rho_min_any;
  if (!(rho_min > 0.0)) throw DomainError("density must be positive");
  const double target = source.lambda().mean_separation(source.n_max());
  const double M = std::ceil(target / rho_min);
  return static_cast<std::size_t>(std::clamp(M, 4.0, 256.0));
}

LayoutPlan plan_layout(const Domain& domain, const RadialDensity& rho, const LayoutConfig& config,
                       const QmcSource& source) {
  const std::size_t d = domain.dim;
  if (source.dim() != d) throw ConfigError("Q-MC source dimension differs from the domain");
  if (!(config.c_d * std::pow(static_cast<double>(source.n_max()), -1.0 / static_cast<double>(d)) < 1.0))
    throw ConfigError("inset constant c_d too large: the inset factor must stay positive");
  const std::size_t M = config.M ? config.M : auto_voxel_count(domain, rho, source);
  LayoutPlan plan{VoxelGrid(d, M)};
  VoxelGrid& grid = plan.grid;
  plan.inclusion_tests = select_voxels(grid, domain, config.adjacency);

  // Density only at corners of selected voxels, each corner once.
  const std::size_t corners = ipow(M + 1, d);
  std::vector<std::uint8_t> needed(corners, 0);
  const std::size_t vertex_count = ipow(2, d);
  auto corner_code = [&](const std::vector<std::size_t>& idx, std::size_t v) {
    std::size_t c = 0;
    for (std::size_t k = d; k-- > 0;) c = c * (M + 1) + idx[k] + ((v >> k) & 1);
    return c;
  };
  for (std::size_t m = 0; m < grid.voxel_count(); ++m) {
    if (!grid.selected[m]) continue;
    const auto idx = grid.multi_index(m);
    for (std::size_t v = 0; v < vertex_count; ++v) needed[corner_code(idx, v)] = 1;
  }
  std::vector<double> corner_rho(corners, 0.0);
  parallel_for(corners, [&](std::size_t b, std::size_t e) {
    Vec x(d);
    for (std::size_t c = b; c < e; ++c) {
      if (!needed[c]) continue;
      std::size_t code = c;
      for (std::size_t k = 0; k < d; ++k) {
        x[k] = static_cast<double>(code % (M + 1)) / static_cast<double>(M);
        code /= M + 1;
      }
      corner_rho[c] = rho(x);
    }
  });
  plan.corner_density_evaluations = static_cast<std::size_t>(std::count(needed.begin(), needed.end(), 1));

  parallel_for(grid.voxel_count(), [&](std::size_t b, std::size_t e) {
    for (std::size_t m = b; m < e; ++m) {
      if (!grid.selected[m]) continue;
      const auto idx = grid.multi_index(m);
      double sum = 0.0;
      for (std::size_t v = 0; v < vertex_count; ++v) sum += corner_rho[corner_code(idx, v)];
      grid.rho_bar[m] = sum / static_cast<double>(vertex_count);
      grid.node_count[m] = static_cast<std::uint32_t>(voxel_node_count(grid.rho_bar[m], M, source.lambda()));
    }
  });
  for (std::size_t m = 0; m < grid.voxel_count(); ++m) plan.predicted_nodes += grid.node_count[m];
  return plan;
}

LayoutResult build_layout(const Domain& domain, const RadialDensity& rho, const LayoutConfig& config,
                          const QmcSource& source) {
  LayoutResult result{plan_layout(domain, rho, config, source), PointSet(domain.dim)};
  const VoxelGrid& grid = result.plan.grid;
  std::vector<std::size_t> filled_voxels;
  for (std::size_t m = 0; m < grid.voxel_count(); ++m)
    if (grid.selected[m] && grid.node_count[m] > 0) filled_voxels.push_back(m);

  std::vector<PointSet> parts(filled_voxels.size());
  parallel_for(filled_voxels.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      parts[i] = fill_voxel(grid, filled_voxels[i], grid.node_count[filled_voxels[i]], source, config.c_d, config.seed);
  });
  PointSet all(domain.dim);
  all.reserve(result.plan.predicted_nodes);
  for (const auto& p : parts) all.append(p);
  result.filled = all.size();

  SaturationResult sat = saturate(grid, all, rho);
  result.saturated = sat.added.size();
  result.saturate_density_evaluations = sat.density_evaluations;
  all.append(sat.added);

  result.nodes = cleanup(all, domain);
  result.removed = all.size() - result.nodes.size();
  return result;
}

std::string layout_json(const LayoutResult& result) {
  const VoxelGrid& grid = result.plan.grid;
  nlohmann::json j;
  j["dimension"] = grid.dim();
  j["voxels_per_side"] = grid.m_per_side();
  j["filled_nodes"] = result.filled;
  j["saturated_nodes"] = result.saturated;
  j["removed_nodes"] = result.removed;
  j["final_nodes"] = result.nodes.size();
  j["corner_density_evaluations"] = result.plan.corner_density_evaluations;
  j["saturate_density_evaluations"] = result.saturate_density_evaluations;
  std::size_t selected = 0;
  auto& voxels = j["voxels"] = nlohmann::json::array();
  for (std::size_t m = 0; m < grid.voxel_count(); ++m) {
    if (!grid.selected[m]) continue;
    ++selected;
    voxels.push_back({{"index", m}, {"rho_bar", grid.rho_bar[m]}, {"count", grid.node_count[m]}});
  }
  j["selected_voxels"] = selected;
  return j.dump(1);
}

}  // namespace nodegen
