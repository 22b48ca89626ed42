#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nodegen/config.hpp"
#include "nodegen/domain.hpp"
#include "nodegen/layout.hpp"
#include "nodegen/node_set.hpp"
#include "nodegen/repel.hpp"

namespace nodegen {

/// Domain, density and pinned nodes of a run, in physical coordinates.
struct Scenario {
  Domain domain;
  RadialDensity rho;
  PointSet pinned;
};

/// Builds the scenario with rho multiplied by `density_scale`.
Scenario make_scenario(const RunConfig& config, double density_scale);

LatticeParams lattice_params(const RunConfig& config);
QmcSource make_source(const RunConfig& config);
LayoutConfig layout_config(const RunConfig& config);
RepelConfig repel_config(const RunConfig& config);

struct GenerateResult {
  NodeSet nodes;  // physical coordinates (or physical radii for --physical shells)
  Scenario scenario;
  std::vector<StepStats> diagnostics;
  LayoutResult layout;  // unit-cube frame
  NodeSet initial;      // layout plus pinned nodes before repel, physical coordinates
  double density_scale = 1.0;
};

/// Layout-only node count (pinned nodes included) for a density scale.
std::size_t layout_node_count(const RunConfig& config, const QmcSource& source, double density_scale);

/// Density scale making the layout produce about config.n_target nodes
/// (1 when n_target is 0).
double calibrate_density_scale(const RunConfig& config, const QmcSource& source);

/// Layout, saturation, cleanup, repel and boundary detection.
GenerateResult generate(const RunConfig& config, const QmcSource& source);
GenerateResult generate(const RunConfig& config);

/// Writes the node file, diagnostics, layout dump and statistics requested by the config.
void write_outputs(const RunConfig& config, const GenerateResult& result);

}  // namespace nodegen
