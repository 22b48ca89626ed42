#include "nodegen/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "nodegen/analysis.hpp"
#include "nodegen/elevation.hpp"
#include "nodegen/error.hpp"
#include "nodegen/expression.hpp"
#include "nodegen/node_io.hpp"
#include "nodegen/parallel.hpp"
#include "nodegen/rng.hpp"

namespace nodegen {

namespace {

Vec center_of(const RunConfig& c) { return c.center.empty() ? Vec(c.dimension, 0.0) : c.center; }

double shell_outer(const RunConfig& c) { return std::exp(c.shell_c * c.shell_layers); }

std::size_t sphere_count(const RunConfig& c, double C) {
  if (c.sphere_nodes) return c.sphere_nodes;
  return static_cast<std::size_t>(std::llround(4.0 * std::numbers::pi / (C * C * std::sqrt(3.0) / 2.0)));
}

ElevationGrid load_grid(const RunConfig& c) {
  if (c.elevation_file.empty())
    return synthetic_elevation(c.elevation_rows, c.elevation_cols, c.amplitude, c.elevation_seed, c.outer_radius);
  const auto& f = c.elevation_file;
  if (f.size() >= 4 && f.compare(f.size() - 4, 4, ".csv") == 0) return read_elevation_csv(f, c.outer_radius);
  return read_elevation(f);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text << '\n';
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace

Scenario make_scenario(const RunConfig& c, double scale) {
  if (!(scale > 0.0)) throw ConfigError("density scale must be positive");
  const std::size_t d = c.dimension;
  Scenario sc;
  if (c.domain == "cube") {
    sc.domain = cube_domain(Box::cube(d, c.box_lo, c.box_hi));
  } else if (c.domain == "ball") {
    const Vec o = center_of(c);
    sc.domain = ball_domain(o, c.radius);
  } else if (c.domain == "elevation-shell") {
    sc.domain = elevation_domain(load_grid(c));
  } else {
    const double C = c.shell_c * scale;
    const double outer = shell_outer(c);
    const Vec o = center_of(c);
    const double lo = 1.0 + c.shell_inset * C;
    const double hi = outer * (1.0 - c.shell_inset * C);
    if (!(hi > lo)) throw ConfigError("shell inset leaves no interior");
    sc.domain = shell_domain(o, lo, hi);
    // Keep the bounding box of the full shell so both spheres share the frame.
    sc.domain.bounding_box = Box{Vec(d, -outer), Vec(d, outer)};
    for (std::size_t k = 0; k < d; ++k) {
      sc.domain.bounding_box.lo[k] += o[k];
      sc.domain.bounding_box.hi[k] += o[k];
    }
    const std::size_t count = sphere_count(c, C);
    sc.pinned = sphere_nodes(count, o, 1.0);
    sc.pinned.append(sphere_nodes(count, o, outer));
  }

  if (c.density == "constant") {
    sc.rho = constant_density(c.density_value * scale);
  } else if (c.density == "point-cloud") {
    auto cloud = random_point_cloud(c.cloud_points, sc.domain.bounding_box, c.cloud_seed, c.cloud_divisor);
    sc.rho = scaled_density(make_point_cloud_density(std::move(cloud)), scale);
  } else if (c.density == "shell") {
    sc.rho = make_shell_density(c.shell_c * scale, center_of(c));
  } else {
    sc.rho = scaled_density(make_expression_density(c.expression, c.lipschitz), scale);
  }
  return sc;
}

LatticeParams lattice_params(const RunConfig& c) {
  LatticeParams p;
  if (c.lattice == "golden")
    p = LatticeParams::for_dimension(c.dimension);
  else if (c.lattice == "sqrt3-sqrt5")
    p = LatticeParams::sqrt3_sqrt5();
  else if (c.lattice == "caption")
    p = LatticeParams::caption_pair();
  else {
    p = LatticeParams::random_pair(c.seed);
    if (c.dimension != 3) {
      Rng rng(mix_seed(c.seed, 0x1a77));
      p.alphas.clear();
      for (std::size_t j = 0; j + 1 < c.dimension; ++j) p.alphas.push_back(rng.uniform());
    }
  }
  p.validate(c.dimension);
  return p;
}

QmcSource make_source(const RunConfig& c) {
  if (c.family == "il") return QmcSource::lattice(c.n_max, lattice_params(c), c.dimension);
  const std::string dir = c.fixtures.empty() ? default_fixture_dir() : c.fixtures;
  return QmcSource::minimizers(c.n_max, TorusMinimizerParams::for_dimension(c.dimension), c.dimension, dir);
}

LayoutConfig layout_config(const RunConfig& c) {
  LayoutConfig l;
  l.M = c.m;
  l.c_d = c.c_d;
  l.adjacency = parse_adjacency(c.adjacency);
  l.seed = c.seed;
  return l;
}

RepelConfig repel_config(const RunConfig& c) {
  RepelConfig r;
  r.s = c.s;
  r.K = c.k;
  r.T = c.iterations();
  r.C2 = c.c2;
  r.refresh_every = c.refresh;
  r.use_full_gradient = c.full_gradient;
  r.boundary_weakening = c.boundary_weakening;
  return r;
}

std::size_t layout_node_count(const RunConfig& c, const QmcSource& source, double scale) {
  const Scenario sc = make_scenario(c, scale);
  const UnitFrame frame(sc.domain.bounding_box);
  const auto layout = build_layout(frame.to_unit(sc.domain), frame.to_unit(sc.rho), layout_config(c), source);
  return layout.nodes.size() + sc.pinned.size();
}

double calibrate_density_scale(const RunConfig& c, const QmcSource& source) {
  if (c.n_target == 0) return 1.0;
  const double target = static_cast<double>(c.n_target);
  double scale = 1.0;
  double best_scale = 1.0;
  double best_err = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 16; ++it) {
    const double n = static_cast<double>(layout_node_count(c, source, scale));
    const double err = std::abs(n - target) / target;
    if (err < best_err) {
      best_err = err;
      best_scale = scale;
    }
    if (err < 0.002 || n == 0.0) break;
    scale *= std::cbrt(n / target);
  }
  return best_scale;
}

GenerateResult generate(const RunConfig& c) {
  if (c.threads) set_thread_count(c.threads);
  const QmcSource source = make_source(c);
  return generate(c, source);
}

GenerateResult generate(const RunConfig& c, const QmcSource& source) {
  c.validate();
  GenerateResult res;
  res.density_scale = calibrate_density_scale(c, source);
  res.scenario = make_scenario(c, res.density_scale);
  const Scenario& sc = res.scenario;
  const UnitFrame frame(sc.domain.bounding_box);
  const Domain unit_domain = frame.to_unit(sc.domain);
  const RadialDensity unit_rho = frame.to_unit(sc.rho);

  res.layout = build_layout(unit_domain, unit_rho, layout_config(c), source);
  NodeSet nodes(res.layout.nodes);
  if (!sc.pinned.empty()) nodes.append(frame.to_unit(sc.pinned), true);
  res.initial = NodeSet(frame.from_unit(nodes.positions));
  res.initial.pinned = nodes.pinned;

  const RepelConfig rc = repel_config(c);
  if (rc.T > 0 && nodes.size() >= 2) {
    nodes = run_repel(nodes, rc, unit_domain, unit_rho, [&](const StepStats& s) {
      StepStats p = s;
      p.min_sep *= frame.side();
      res.diagnostics.push_back(p);
    });
  }
  if (!sc.pinned.empty())
    nodes.boundary = nodes.pinned;
  else
    nodes.boundary = detect_boundary(nodes.positions, unit_domain);

  res.nodes = NodeSet(frame.from_unit(nodes.positions));
  res.nodes.pinned = nodes.pinned;
  res.nodes.boundary = nodes.boundary;
  if (c.physical && c.domain == "transformed-shell") {
    const Vec o = center_of(c);
    const double scale = c.physical_layer / c.shell_c;  // h / C
    for (std::size_t i = 0; i < res.nodes.size(); ++i) {
      auto x = res.nodes.positions[i];
      double r = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) r += (x[k] - o[k]) * (x[k] - o[k]);
      r = std::sqrt(r);
      const double phys = c.physical_inner_radius + scale * std::log(r);
      for (std::size_t k = 0; k < x.size(); ++k) x[k] = (x[k] - o[k]) * (phys / r);
    }
  }
  return res;
}

void write_outputs(const RunConfig& c, const GenerateResult& res) {
  if (!c.output.empty()) write_nodes(res.nodes, c.output);
  if (!c.diagnostics.empty()) write_diagnostics_csv(res.diagnostics, c.diagnostics);
  if (!c.layout_json.empty()) write_text(c.layout_json, layout_json(res.layout));
  if (!c.stats.empty() && res.nodes.size() >= 2) {
    const std::size_t k = std::min<std::size_t>(12, res.nodes.size() - 1);
    const NnStats nn = nn_distances(res.nodes.positions, k);
    if (c.physical && c.domain == "transformed-shell") {
      write_text(c.stats, stats_json(nn, nullptr));
    } else {
      const RatioStats rs = ratio_stats(res.nodes.positions, res.scenario.rho);
      write_text(c.stats, stats_json(nn, &rs));
    }
  }
}

}  // namespace nodegen
