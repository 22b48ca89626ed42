#include "nodegen/qmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "nodegen/error.hpp"
#include "nodegen/node_io.hpp"
#include "nodegen/parallel.hpp"
#include "nodegen/rng.hpp"

#ifndef NODEGEN_DEFAULT_FIXTURE_DIR
#define NODEGEN_DEFAULT_FIXTURE_DIR "fixtures"
#endif

namespace nodegen {

namespace {

double frac(double v) { return v - std::floor(v); }

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

// Minimum-image difference, each component in [-0.5, 0.5].
inline double wrap_diff(double a) { return a - std::nearbyint(a); }

inline double wrap_unit(double v) {
  v -= std::floor(v);
  return v >= 1.0 ? 0.0 : v;
}

double periodic_sq(const double* x, const double* y, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double t = wrap_diff(x[k] - y[k]);
    s += t * t;
  }
  return s;
}

// r2^(-e) with a multiply-and-sqrt path when 2e is a small integer (s = d + 2 always is).
inline double inv_pow_half(double r2, double e) {
  const double twice = 2.0 * e;
  if (twice == std::floor(twice) && twice >= 0.0 && twice <= 32.0) {
    const int k = static_cast<int>(twice);
    double v = 1.0;
    for (int i = 0; i < k / 2; ++i) v *= r2;
    if (k % 2) v *= std::sqrt(r2);
    return 1.0 / v;
  }
  return std::pow(r2, -e);
}

double pair_energy(double r2, double s) { return inv_pow_half(r2, 0.5 * s); }

double energy_of(const std::vector<double>& x, std::size_t n, std::size_t d, double s) {
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e += pair_energy(periodic_sq(&x[i * d], &x[j * d], d), s);
  return e;
}

// Energy gradient (d E / d x_i) for every point plus periodic nearest distances.
void gradient_of(const std::vector<double>& x, std::size_t n, std::size_t d, double s,
                 std::vector<double>& grad, std::vector<double>& nearest) {
  grad.assign(n * d, 0.0);
  nearest.assign(n, 1.0);
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        diff[k] = wrap_diff(x[i * d + k] - x[j * d + k]);
        r2 += diff[k] * diff[k];
      }
      if (r2 == 0.0) throw DegeneratePairError(i, j);
      const double r = std::sqrt(r2);
      nearest[i] = std::min(nearest[i], r);
      nearest[j] = std::min(nearest[j], r);
      const double c = -s * inv_pow_half(r2, 0.5 * s + 1.0);
      for (std::size_t k = 0; k < d; ++k) {
        grad[i * d + k] += c * diff[k];
        grad[j * d + k] -= c * diff[k];
      }
    }
  }
}

double max_point_norm(const std::vector<double>& g, std::size_t n, std::size_t d) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += g[i * d + k] * g[i * d + k];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

struct Trajectory {
  std::vector<double> x;
  double energy = 0.0;
  bool converged = false;
  std::vector<double> history;
};

// Barzilai-Borwein descent with monotone backtracking. Returns the number of
// iterations spent; sets tr.converged if the gradient becomes negligible.
std::size_t bb_polish(Trajectory& tr, std::size_t n, std::size_t d, double s, double tolerance,
                      std::size_t max_iterations) {
  std::vector<double> grad, nearest, grad_new, nearest_new, step(n * d), trial(n * d);
  gradient_of(tr.x, n, d, s, grad, nearest);
  double typical = s * std::pow(mean_of(nearest), -(s + 1.0));
  double gmax = max_point_norm(grad, n, d);
  if (gmax <= tolerance * typical) {
    tr.converged = true;
    return 0;
  }
  double alpha = 0.01 * mean_of(nearest) / gmax;
  std::size_t it = 0;
  for (; it < max_iterations; ++it) {
    double a = std::min(alpha, 0.1 * mean_of(nearest) / gmax);
    bool accepted = false;
    double e = 0.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (std::size_t q = 0; q < n * d; ++q) {
        step[q] = -a * grad[q];
        trial[q] = wrap_unit(tr.x[q] + step[q]);
      }
      e = energy_of(trial, n, d, s);
      if (e <= tr.energy) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) break;
    gradient_of(trial, n, d, s, grad_new, nearest_new);
    double sy = 0.0, ss = 0.0;
    for (std::size_t q = 0; q < n * d; ++q) {
      const double y = grad_new[q] - grad[q];
      sy += step[q] * y;
      ss += step[q] * step[q];
    }
    const bool stalled = e == tr.energy;
    tr.x.swap(trial);
    tr.energy = e;
    tr.history.push_back(e);
    grad.swap(grad_new);
    nearest.swap(nearest_new);
    gmax = max_point_norm(grad, n, d);
    typical = s * std::pow(mean_of(nearest), -(s + 1.0));
    if (gmax <= tolerance * typical) {
      tr.converged = true;
      return it + 1;
    }
    if (stalled) break;
    alpha = sy > 0.0 ? ss / sy : 2.0 * a;
  }
  return it + 1;
}

// Single-point axis moves of length h. The step doubles after an improving
// sweep (up to h_max) and halves after a sweep without one. Returns sweeps used.
std::size_t compass_polish(Trajectory& tr, std::size_t n, std::size_t d, double s, double& h, double h_min,
                           double h_max, std::size_t max_sweeps) {
  const auto point_energy = [&](std::size_t i, const double* xi) {
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) e += pair_energy(periodic_sq(xi, &tr.x[j * d], d), s);
    return e;
  };
  std::vector<double> saved, moved(d);
  std::size_t sweep = 0;
  while (sweep < max_sweeps && h >= h_min) {
    ++sweep;
    saved = tr.x;
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      double* xi = &tr.x[i * d];
      double ei = point_energy(i, xi);
      for (std::size_t k = 0; k < d; ++k) {
        for (double sign : {1.0, -1.0}) {
          std::copy(xi, xi + d, moved.begin());
          moved[k] = wrap_unit(moved[k] + sign * h);
          const double en = point_energy(i, moved.data());
          if (en < ei - 1e-12 * tr.energy) {
            std::copy(moved.begin(), moved.end(), xi);
            ei = en;
            improved = true;
            break;
          }
        }
      }
    }
    const double e = improved ? energy_of(tr.x, n, d, s) : tr.energy;
    if (!improved || e > tr.energy) {
      tr.x.swap(saved);
      h *= 0.5;
      continue;
    }
    tr.energy = e;
    tr.history.push_back(e);
    h = std::min(2.0 * h, h_max);
    // Hand back to the gradient method once the configuration moves freely.
    if (h == h_max) break;
  }
  return sweep;
}

Trajectory minimize_once(std::size_t n, std::size_t d, const TorusMinimizerParams& p,
                         std::uint64_t seed) {
  Rng rng(seed);
  Trajectory tr;
  tr.x.resize(n * d);
  for (double& v : tr.x) v = rng.uniform();
  const double s = p.s_exponent;
  if (n == 1) {
    tr.converged = true;
    return tr;
  }
  tr.energy = energy_of(tr.x, n, d, s);
  tr.history.push_back(tr.energy);

  std::vector<double> grad, nearest, trial(n * d);

  // Normalized steps of length Delta_i / (t + t0), halved until the energy
  // does not increase.
  double scale = 1.0;
  for (std::size_t t = 0; t < p.schedule_iterations; ++t) {
    gradient_of(tr.x, n, d, s, grad, nearest);
    bool accepted = false;
    for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) {
        double gn = 0.0;
        for (std::size_t k = 0; k < d; ++k) gn += grad[i * d + k] * grad[i * d + k];
        gn = std::sqrt(gn);
        const double step = gn > 1e-30 ? scale * nearest[i] / (static_cast<double>(t) + p.step_offset) / gn : 0.0;
        for (std::size_t k = 0; k < d; ++k) trial[i * d + k] = wrap_unit(tr.x[i * d + k] - step * grad[i * d + k]);
      }
      const double e = energy_of(trial, n, d, s);
      if (e <= tr.energy) {
        tr.x.swap(trial);
        tr.energy = e;
        tr.history.push_back(e);
        accepted = true;
      } else {
        scale *= 0.5;
      }
    }
    if (!accepted) break;
  }

  // The minimum-image energy has kinks where a coordinate difference crosses
  // 1/2 and minimizers like to sit on them. Barzilai-Borwein steps stall
  // there, so alternate them with a gradient-free compass search until a
  // compass sweep at the finest step finds no improving axis move.
  const double spacing = mean_of(nearest);
  const double h_max = 0.05 * spacing, h_min = 1e-7 * spacing;
  double h = h_max;
  std::size_t budget = 20 * p.max_iterations;
  while (budget > 0) {
    budget -= std::min(budget, bb_polish(tr, n, d, s, p.gradient_tolerance, p.max_iterations));
    if (tr.converged || budget == 0) break;
    const std::size_t used = compass_polish(tr, n, d, s, h, h_min, h_max, std::min<std::size_t>(budget, 200));
    budget -= std::min(budget, used);
    if (h < h_min) {
      tr.converged = true;
      break;
    }
  }
  return tr;
}

std::string format_exponent(double s) {
  if (s == std::floor(s)) return std::to_string(static_cast<long long>(s));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", s);
  return buf;
}

}  // namespace

const char* to_string(QmcFamily family) {
  return family == QmcFamily::IrrationalLattice ? "il" : "riesz";
}

QmcFamily parse_family(const std::string& name) {
  if (name == "il" || name == "lattice" || name == "irrational-lattice") return QmcFamily::IrrationalLattice;
  if (name == "riesz" || name == "minimizer" || name == "torus-minimizer") return QmcFamily::TorusMinimizer;
  throw ConfigError("unknown Q-MC family '" + name + "' (expected il or riesz)");
}

LatticeParams LatticeParams::golden() { return {{std::sqrt(2.0), (std::sqrt(5.0) - 1.0) / std::sqrt(2.0)}}; }

LatticeParams LatticeParams::sqrt3_sqrt5() { return {{std::sqrt(3.0), std::sqrt(5.0)}}; }

LatticeParams LatticeParams::caption_pair() { return {{0.179373654819913, 0.531793804909494}}; }

LatticeParams LatticeParams::random_pair(std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x1a77));
  LatticeParams p;
  p.alphas = {rng.uniform(), rng.uniform()};
  return p;
}

LatticeParams LatticeParams::for_dimension(std::size_t d) {
  if (d == 3) return golden();
  if (d < 2 || d - 1 > std::size(kPrimes)) throw ConfigError("no default lattice parameters for this dimension");
  LatticeParams p;
  for (std::size_t j = 0; j + 1 < d; ++j) p.alphas.push_back(std::sqrt(static_cast<double>(kPrimes[j])));
  return p;
}

void LatticeParams::validate(std::size_t d) const {
  if (d < 2) throw ConfigError("lattice dimension must be at least 2");
  if (alphas.size() != d - 1)
    throw ConfigError("lattice needs " + std::to_string(d - 1) + " alpha parameters, got " +
                      std::to_string(alphas.size()));
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    if (!std::isfinite(alphas[j]) || alphas[j] == 0.0) throw ConfigError("lattice alphas must be finite and nonzero");
    for (std::size_t k = 0; k < j; ++k)
      if (alphas[j] == alphas[k]) throw ConfigError("lattice alphas must be pairwise distinct");
  }
  if (!(c1_offset > 0.0)) throw ConfigError("lattice offset C1 must be positive");
}

PointSet irrational_lattice(std::size_t n, const LatticeParams& params, std::size_t d) {
  params.validate(d);
  PointSet out(d);
  out.reserve(n);
  Vec p(d);
  for (std::size_t i = 1; i <= n; ++i) {
    const double di = static_cast<double>(i);
    p[0] = frac(params.c1_offset + di / static_cast<double>(n));
    for (std::size_t j = 1; j < d; ++j) p[j] = frac(di * params.alphas[j - 1]);
    out.push_back(p);
  }
  return out;
}

PointSet halton(std::size_t n, std::size_t d) {
  if (d < 1 || d > 10) throw ConfigError("halton supports 1 <= d <= 10");
  PointSet out(d);
  out.reserve(n);
  Vec p(d);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const unsigned b = kPrimes[k];
      double f = 1.0, r = 0.0;
      for (std::size_t m = i; m > 0; m /= b) {
        f /= b;
        r += f * static_cast<double>(m % b);
      }
      p[k] = r;
    }
    out.push_back(p);
  }
  return out;
}

double periodic_distance(ConstPoint x, ConstPoint y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    // |x - y| first so that swapping the arguments gives the same bits.
    const double t = frac(std::abs(x[k] - y[k]));
    const double m = std::min(t, 1.0 - t);
    s += m * m;
  }
  return std::sqrt(s);
}

TorusMinimizerParams TorusMinimizerParams::for_dimension(std::size_t d) {
  TorusMinimizerParams p;
  p.s_exponent = static_cast<double>(d) + 2.0;
  return p;
}

double periodic_riesz_energy(const PointSet& points, double s) {
  return energy_of(points.coords(), points.size(), points.dim(), s);
}

MinimizerResult periodic_riesz_minimizer(std::size_t n, const TorusMinimizerParams& params, std::size_t d) {
  if (d < 1) throw ConfigError("minimizer dimension must be positive");
  if (!(params.s_exponent > static_cast<double>(d)))
    throw ConfigError("torus minimizer exponent must exceed the dimension");
  if (params.step_offset <= 0.0) throw ConfigError("step offset must be positive");
  MinimizerResult best;
  best.points = PointSet(d);
  if (n == 0) {
    best.converged = true;
    return best;
  }
  const std::size_t restarts = std::max<std::size_t>(1, params.restarts);
  bool have = false;
  Trajectory winner;
  for (std::size_t r = 0; r < restarts; ++r) {
    Trajectory t = minimize_once(n, d, params, mix_seed(mix_seed(params.seed, n), r));
    if (!have || t.energy < winner.energy) {
      winner = std::move(t);
      have = true;
    }
  }
  best.points = PointSet(d, std::move(winner.x));
  best.energy = winner.energy;
  best.converged = winner.converged;
  best.energy_history = std::move(winner.history);
  return best;
}

std::vector<double> SeparationTable::regularized_means() const {
  std::vector<double> m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    double v = entries[i].mean_sep;
    if (i > 0) v = std::min(v, m[i - 1] * (1.0 - 1e-9));
    m[i] = v;
  }
  return m;
}

SeparationEntry translated_copies_separation(const PointSet& points) {
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  SeparationEntry e;
  if (n == 0) return e;
  std::size_t copies = 1;
  for (std::size_t k = 0; k < d; ++k) copies *= 3;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<int> offset(d);
  for (std::size_t c = 0; c < copies; ++c) {
    std::size_t code = c;
    bool central = true;
    for (std::size_t k = 0; k < d; ++k) {
      offset[k] = static_cast<int>(code % 3) - 1;
      code /= 3;
      central = central && offset[k] == 0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = points[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (central && i == j) continue;
        const auto xj = points[j];
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double t = xi[k] - (xj[k] + offset[k]);
          s += t * t;
        }
        nearest[i] = std::min(nearest[i], s);
      }
    }
  }
  double sum = 0.0, mn = std::numeric_limits<double>::infinity();
  for (double s : nearest) {
    const double r = std::sqrt(s);
    sum += r;
    mn = std::min(mn, r);
  }
  e.mean_sep = sum / static_cast<double>(n);
  e.min_sep = mn;
  return e;
}

SeparationEntry periodic_separation(const PointSet& points) {
  const std::size_t n = points.size();
  SeparationEntry e;
  if (n == 0) return e;
  std::vector<double> nearest(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = periodic_distance(points[i], points[j]);
      nearest[i] = std::min(nearest[i], r);
      nearest[j] = std::min(nearest[j], r);
    }
  e.mean_sep = mean_of(nearest);
  e.min_sep = *std::min_element(nearest.begin(), nearest.end());
  return e;
}

SeparationTable tabulate_lattice_separation(std::size_t n_max, const LatticeParams& params, std::size_t d) {
  if (n_max < 1) throw ConfigError("n_max must be at least 1");
  params.validate(d);
  SeparationTable table;
  table.family = QmcFamily::IrrationalLattice;
  table.entries.resize(n_max);
  parallel_for(n_max, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      table.entries[i] = translated_copies_separation(irrational_lattice(i + 1, params, d));
  });
  return table;
}

SeparationTable tabulate_minimizer_separation(const std::vector<PointSet>& configs) {
  if (configs.empty()) throw ConfigError("need at least one minimizer configuration");
  SeparationTable table;
  table.family = QmcFamily::TorusMinimizer;
  table.entries.resize(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (configs[i].size() != i + 1)
      throw ConfigError("minimizer configuration " + std::to_string(i + 1) + " has " +
                        std::to_string(configs[i].size()) + " points");
    table.entries[i] = periodic_separation(configs[i]);
  }
  return table;
}

void write_separation_csv(const SeparationTable& table, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open " + path + " for writing");
  std::fprintf(f, "n,mean_sep,min_sep\n");
  for (std::size_t i = 0; i < table.entries.size(); ++i)
    std::fprintf(f, "%zu,%.17g,%.17g\n", i + 1, table.entries[i].mean_sep, table.entries[i].min_sep);
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

SeparationTable read_separation_csv(const std::string& path, QmcFamily family) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(in, line) || line != "n,mean_sep,min_sep")
    throw ParseError("expected header n,mean_sep,min_sep", 0);
  offset += line.size() + 1;
  SeparationTable table;
  table.family = family;
  while (std::getline(in, line)) {
    const std::size_t start = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    unsigned long long n = 0;
    double mean = 0.0, mn = 0.0;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%llu,%lf,%lf%c", &n, &mean, &mn, &tail) != 3)
      throw ParseError("malformed separation row", start);
    if (n != table.entries.size() + 1) throw ParseError("separation rows must list n = 1, 2, ... in order", start);
    table.entries.push_back({mean, mn});
  }
  if (table.entries.empty()) throw ParseError("separation table has no rows", offset);
  return table;
}

LambdaInverse::LambdaInverse(const SeparationTable& table)
    : n_max_(table.n_max()), means_(table.regularized_means()), curve_({0.0}, {0.0}) {
  if (n_max_ == 0) throw ConfigError("separation table is empty");
  for (double m : means_)
    if (!(m > 0.0)) throw NumericError("separation table has a non-positive mean");
  std::vector<double> x(means_.rbegin(), means_.rend());
  std::vector<double> y(n_max_);
  for (std::size_t i = 0; i < n_max_; ++i) y[i] = static_cast<double>(n_max_ - i);
  curve_ = Pchip(std::move(x), std::move(y));
}

std::size_t LambdaInverse::operator()(double r) const {
  if (std::isnan(r) || r <= 0.0) throw DomainError("lambda inverse needs a positive argument");
  if (r > 1.0) return 0;
  if (r <= means_.back()) return n_max_;
  const double v = std::nearbyint(curve_(r));
  return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n_max_)));
}

std::string default_fixture_dir() {
  if (const char* env = std::getenv("NODEGEN_FIXTURES"); env && *env) return env;
  return NODEGEN_DEFAULT_FIXTURE_DIR;
}

std::string minimizer_fixture_path(const std::string& fixture_dir, std::size_t d, double s, std::size_t n) {
  std::ostringstream os;
  os << fixture_dir << "/minimizers/d" << d << "_s" << format_exponent(s) << "/n" << n << ".nods";
  return os.str();
}

PointSet torus_minimizer_cached(std::size_t n, const TorusMinimizerParams& params, std::size_t d,
                                const std::string& fixture_dir, bool write_missing) {
  const std::string path = minimizer_fixture_path(fixture_dir, d, params.s_exponent, n);
  if (!fixture_dir.empty() && std::filesystem::exists(path)) {
    NodeSet cached = read_nods(path);
    if (cached.dim() != d || cached.size() != n) throw IoError("fixture " + path + " has the wrong shape");
    return std::move(cached.positions);
  }
  PointSet pts = periodic_riesz_minimizer(n, params, d).points;
  if (write_missing && !fixture_dir.empty()) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    write_nods(NodeSet(pts), path, false);
  }
  return pts;
}

std::vector<PointSet> torus_minimizers(std::size_t n_max, const TorusMinimizerParams& params, std::size_t d,
                                       const std::string& fixture_dir, bool write_missing) {
  std::vector<PointSet> out(n_max);
  parallel_for(n_max, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = torus_minimizer_cached(i + 1, params, d, fixture_dir, write_missing);
  });
  return out;
}

}  // namespace nodegen
