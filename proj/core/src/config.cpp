#include "nodegen/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "nodegen/error.hpp"

namespace nodegen {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> to_vec(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(to_double(key, trim(cell)));
  return out;
}

struct Field {
  const char* key;
  const char* help;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define NG_STR(member) [](RunConfig& c, const std::string& v) { c.member = v; }
#define NG_DBL(member, name) [](RunConfig& c, const std::string& v) { c.member = to_double(name, v); }
#define NG_SIZE(member, name) \
  [](RunConfig& c, const std::string& v) { c.member = static_cast<std::size_t>(to_u64(name, v)); }
#define NG_U64(member, name) [](RunConfig& c, const std::string& v) { c.member = to_u64(name, v); }
#define NG_BOOL(member, name) [](RunConfig& c, const std::string& v) { c.member = to_bool(name, v); }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"preset", "named example configuration", NG_STR(preset)},
      {"dimension", "space dimension d", NG_SIZE(dimension, "dimension")},
      {"seed", "global seed", NG_U64(seed, "seed")},
      {"threads", "worker cap (0 = all cores)",
       [](RunConfig& c, const std::string& v) { c.threads = static_cast<unsigned>(to_u64("threads", v)); }},
      {"n-target", "rescale rho to about this many nodes (0 = as given)", NG_SIZE(n_target, "n-target")},
      {"density", "constant | point-cloud | shell | expression", NG_STR(density)},
      {"density-value", "value of a constant density", NG_DBL(density_value, "density-value")},
      {"expression", "density formula in x, y, z", NG_STR(expression)},
      {"lipschitz", "declared Lipschitz bound of an expression density", NG_DBL(lipschitz, "lipschitz")},
      {"cloud-points", "size of the fixed point cloud", NG_SIZE(cloud_points, "cloud-points")},
      {"cloud-divisor", "point-cloud density divisor", NG_DBL(cloud_divisor, "cloud-divisor")},
      {"cloud-seed", "seed of the point cloud", NG_U64(cloud_seed, "cloud-seed")},
      {"shell-c", "tangential resolution C of the transformed shell (radians)", NG_DBL(shell_c, "shell-c")},
      {"domain", "cube | ball | elevation-shell | transformed-shell", NG_STR(domain)},
      {"box-lo", "lower corner coordinate of a cube domain", NG_DBL(box_lo, "box-lo")},
      {"box-hi", "upper corner coordinate of a cube domain", NG_DBL(box_hi, "box-hi")},
      {"center", "comma-separated center of a ball", [](RunConfig& c, const std::string& v) { c.center = to_vec("center", v); }},
      {"radius", "ball radius", NG_DBL(radius, "radius")},
      {"elevation-file", "ELEV binary or CSV elevation grid (empty = synthetic)", NG_STR(elevation_file)},
      {"elevation-rows", "synthetic grid rows (azimuth)", NG_SIZE(elevation_rows, "elevation-rows")},
      {"elevation-cols", "synthetic grid columns (polar)", NG_SIZE(elevation_cols, "elevation-cols")},
      {"amplitude", "synthetic elevation amplitude", NG_DBL(amplitude, "amplitude")},
      {"outer-radius", "outer radius of the elevation shell", NG_DBL(outer_radius, "outer-radius")},
      {"elevation-seed", "seed of the synthetic elevation", NG_U64(elevation_seed, "elevation-seed")},
      {"shell-layers", "H / h of the transformed shell", NG_DBL(shell_layers, "shell-layers")},
      {"shell-inset", "gap between interior nodes and pinned spheres, in local separations",
       NG_DBL(shell_inset, "shell-inset")},
      {"sphere-nodes", "pinned nodes per boundary sphere (0 = automatic)", NG_SIZE(sphere_nodes, "sphere-nodes")},
      {"physical", "write transformed-shell nodes in physical radii", NG_BOOL(physical, "physical")},
      {"physical-inner-radius", "physical inner radius of the shell", NG_DBL(physical_inner_radius, "physical-inner-radius")},
      {"physical-layer", "physical vertical resolution h", NG_DBL(physical_layer, "physical-layer")},
      {"m", "voxels per side (0 = automatic)", NG_SIZE(m, "m")},
      {"family", "il | riesz", NG_STR(family)},
      {"c-d", "voxel inset constant", NG_DBL(c_d, "c-d")},
      {"adjacency", "face | vertex", NG_STR(adjacency)},
      {"n-max", "largest elementary configuration", NG_SIZE(n_max, "n-max")},
      {"lattice", "golden | sqrt3-sqrt5 | caption | random", NG_STR(lattice)},
      {"fixtures", "minimizer fixture directory", NG_STR(fixtures)},
      {"s", "Riesz exponent", NG_DBL(s, "s")},
      {"k", "nearest neighbors in the repel sum", NG_SIZE(k, "k")},
      {"t", "repel iterations",
       [](RunConfig& c, const std::string& v) { c.t = static_cast<std::size_t>(to_u64("t", v)); }},
      {"c2", "step offset C2", NG_DBL(c2, "c2")},
      {"refresh", "neighbor refresh interval", NG_SIZE(refresh, "refresh")},
      {"boundary-weakening", "force factor of pinned nodes", NG_DBL(boundary_weakening, "boundary-weakening")},
      {"full-gradient", "include the density-gradient term", NG_BOOL(full_gradient, "full-gradient")},
      {"output", "node file (.csv or binary)", NG_STR(output)},
      {"diagnostics", "per-iteration CSV", NG_STR(diagnostics)},
      {"layout-json", "voxel layout dump", NG_STR(layout_json)},
      {"stats", "statistics JSON of the final node set", NG_STR(stats)},
  };
  return f;
}

#undef NG_STR
#undef NG_DBL
#undef NG_SIZE
#undef NG_U64
#undef NG_BOOL

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields())
    if (key == f.key) {
      f.set(*this, trim(value));
      return;
    }
  throw ConfigError("unknown configuration key '" + key + "'");
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.emplace_back(f.key);
    return out;
  }();
  return k;
}

const std::vector<std::string>& RunConfig::key_help() {
  static const std::vector<std::string> h = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.emplace_back(f.help);
    return out;
  }();
  return h;
}

std::size_t RunConfig::iterations() const {
  if (t) return *t;
  return density == "constant" ? 30 : 200;
}

void RunConfig::validate() const {
  if (dimension < 2) throw ConfigError("dimension must be at least 2");
  static const std::vector<std::string> densities = {"constant", "point-cloud", "shell", "expression"};
  static const std::vector<std::string> domains = {"cube", "ball", "elevation-shell", "transformed-shell"};
  if (std::find(densities.begin(), densities.end(), density) == densities.end())
    throw ConfigError("unknown density '" + density + "'");
  if (std::find(domains.begin(), domains.end(), domain) == domains.end())
    throw ConfigError("unknown domain '" + domain + "'");
  if (density == "constant" && !(density_value > 0.0)) throw ConfigError("constant density must be positive");
  if (density == "expression" && expression.empty()) throw ConfigError("expression density needs 'expression'");
  if (density == "point-cloud" && cloud_points < 2) throw ConfigError("point cloud needs at least 2 points");
  if (!(box_hi > box_lo)) throw ConfigError("box-hi must exceed box-lo");
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  if (!center.empty() && center.size() != dimension) throw ConfigError("center must have 'dimension' coordinates");
  if ((domain == "elevation-shell" || domain == "transformed-shell") && dimension != 3)
    throw ConfigError("shell domains are three-dimensional");
  if (domain == "transformed-shell" && density != "shell")
    throw ConfigError("the transformed shell uses the shell density");
  if (!(shell_c > 0.0)) throw ConfigError("shell-c must be positive");
  if (!(shell_layers > 0.0)) throw ConfigError("shell-layers must be positive");
  if (!(shell_inset >= 0.0)) throw ConfigError("shell-inset must be non-negative");
  if (family != "il" && family != "riesz") throw ConfigError("family must be il or riesz");
  if (adjacency != "face" && adjacency != "vertex") throw ConfigError("adjacency must be face or vertex");
  if (n_max < 1) throw ConfigError("n-max must be at least 1");
  if (lattice != "golden" && lattice != "sqrt3-sqrt5" && lattice != "caption" && lattice != "random")
    throw ConfigError("unknown lattice preset '" + lattice + "'");
  if (lattice != "golden" && lattice != "random" && dimension != 3)
    throw ConfigError("named lattice pairs are three-dimensional");
  if (!(s > static_cast<double>(dimension))) throw ConfigError("s must exceed the dimension");
  if (k < 1) throw ConfigError("k must be at least 1");
  if (!(c2 > 0.0)) throw ConfigError("c2 must be positive");
  if (refresh < 1) throw ConfigError("refresh must be at least 1");
  if (!(boundary_weakening > 0.0 && boundary_weakening <= 1.0))
    throw ConfigError("boundary-weakening must lie in (0, 1]");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"point-cloud", "shell", "earth", "cube", "ball"};
  return names;
}

void apply_preset(RunConfig& c, const std::string& name) {
  c.preset = name;
  if (name == "point-cloud") {
    c.domain = "cube";
    c.box_lo = -1.0;
    c.box_hi = 1.0;
    c.density = "point-cloud";
    c.cloud_points = 100;
    c.cloud_divisor = 20.0;
    c.n_target = 50000;
    // The normalized partial step drifts nodes up the density gradient; the
    // full gradient with Riesz voxels and a longer step offset holds rho/Delta.
    c.family = "riesz";
    c.full_gradient = true;
    c.c2 = 100.0;
    c.k = 30;
    c.t = 200;
  } else if (name == "shell") {
    c.domain = "transformed-shell";
    c.density = "shell";
    c.n_target = 40000;
    c.family = "riesz";
    c.k = 30;
    c.t = 200;
    c.boundary_weakening = 0.5;
    c.full_gradient = true;
  } else if (name == "earth") {
    c.domain = "elevation-shell";
    c.density = "constant";
    c.outer_radius = 1.1;
    c.amplitude = 0.02;
    c.n_target = 100000;
    c.family = "il";
    c.k = 33;
    c.t = 29;
  } else if (name == "cube") {
    c.domain = "cube";
    c.box_lo = 0.0;
    c.box_hi = 1.0;
    c.density = "constant";
    c.n_target = 100000;
    c.family = "il";
    c.k = 33;
    c.t = 29;
  } else if (name == "ball") {
    c.domain = "ball";
    c.center.clear();
    c.radius = 1.0;
    c.density = "constant";
    c.n_target = 20000;
    c.family = "il";
    c.k = 30;
    c.t = 30;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    const auto& keys = RunConfig::keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& file_entries,
                         const std::vector<std::pair<std::string, std::string>>& cli_entries) {
  RunConfig c;
  std::string preset;
  for (const auto& [k, v] : file_entries)
    if (k == "preset") preset = v;
  for (const auto& [k, v] : cli_entries)
    if (k == "preset") preset = v;
  if (!preset.empty()) apply_preset(c, preset);
  for (const auto& [k, v] : file_entries)
    if (k != "preset") c.set(k, v);
  for (const auto& [k, v] : cli_entries)
    if (k != "preset") c.set(k, v);
  c.validate();
  return c;
}

}  // namespace nodegen
