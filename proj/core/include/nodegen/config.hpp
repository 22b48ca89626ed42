#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nodegen {

/// Everything cmd_generate needs. Every field has a key that is used both in
/// config files and as the long CLI flag of the same name.
struct RunConfig {
  std::string preset;
  std::size_t dimension = 3;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  /// 0 keeps the density as given; otherwise rho is rescaled so the layout
  /// predicts about this many nodes.
  std::size_t n_target = 0;

  // density: constant | point-cloud | shell | expression
  std::string density = "constant";
  double density_value = 0.05;
  std::string expression;
  double lipschitz = 1.0;
  std::size_t cloud_points = 100;
  double cloud_divisor = 20.0;
  std::uint64_t cloud_seed = 1;
  /// Tangential resolution C in radians (2 degrees by default).
  double shell_c = 0.034906585039886591;

  // domain: cube | ball | elevation-shell | transformed-shell
  std::string domain = "cube";
  double box_lo = 0.0;
  double box_hi = 1.0;
  std::vector<double> center;  // empty means the origin for balls and shells
  double radius = 0.5;
  std::string elevation_file;
  std::size_t elevation_rows = 720;
  std::size_t elevation_cols = 360;
  double amplitude = 0.02;
  double outer_radius = 1.1;
  std::uint64_t elevation_seed = 1;
  /// Transformed shell: H / h, number of vertical layers (outer radius exp(C H / h)).
  double shell_layers = 30.0;
  /// Interior nodes stay this many local separations away from the pinned spheres.
  double shell_inset = 0.8;
  /// Pinned nodes per boundary sphere; 0 picks 4 pi / (C^2 sqrt(3) / 2).
  std::size_t sphere_nodes = 0;
  bool physical = false;
  double physical_inner_radius = 6371220.0;
  double physical_layer = 400.0;

  // layout
  std::size_t m = 0;
  std::string family = "il";
  double c_d = 1.0;
  std::string adjacency = "face";
  std::size_t n_max = 100;
  std::string lattice = "golden";
  std::string fixtures;

  // repel
  double s = 5.0;
  std::size_t k = 30;
  std::optional<std::size_t> t;  // unset: 30 for constant densities, 200 otherwise
  double c2 = 10.0;
  std::size_t refresh = 10;
  double boundary_weakening = 1.0;
  bool full_gradient = false;

  // output
  std::string output;
  std::string diagnostics;
  std::string layout_json;
  std::string stats;

  /// Sets one field from its textual key; throws ConfigError for unknown
  /// keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  /// Every accepted key, in declaration order.
  static const std::vector<std::string>& keys();
  /// One-line help per key (same order as keys()).
  static const std::vector<std::string>& key_help();

  std::size_t iterations() const;
  void validate() const;
};

/// Names accepted by apply_preset.
const std::vector<std::string>& preset_names();

/// Overwrites the fields that define a preset: point-cloud, shell, earth, cube, ball.
void apply_preset(RunConfig& config, const std::string& name);

/// Parses key = value lines with optional [section] headers ('#' starts a
/// comment). Section names are informational only.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Defaults, then the preset (from either source, CLI winning), then the
/// file entries, then the CLI entries.
RunConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& file_entries,
                         const std::vector<std::pair<std::string, std::string>>& cli_entries);

}  // namespace nodegen
