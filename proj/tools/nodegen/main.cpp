#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nodegen/analysis.hpp"
#include "nodegen/config.hpp"
#include "nodegen/elevation.hpp"
#include "nodegen/error.hpp"
#include "nodegen/node_io.hpp"
#include "nodegen/parallel.hpp"
#include "nodegen/pipeline.hpp"
#include "nodegen/qmc.hpp"
#include "nodegen/rbffd.hpp"

using namespace nodegen;
using Entries = std::vector<std::pair<std::string, std::string>>;

namespace {

int report(const std::string& category, const std::string& message, int code) {
  nlohmann::json j{{"error", category}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << std::endl;
  return code;
}

std::vector<std::size_t> parse_k_range(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.find(':') != std::string::npos) {
    std::size_t a = 0, b = 0, step = 0;
    if (std::sscanf(text.c_str(), "%zu:%zu:%zu", &a, &b, &step) != 3 || step == 0 || b < a)
      throw ConfigError("K range must look like start:stop:step");
    for (std::size_t k = a; k <= b; k += step) out.push_back(k);
    return out;
  }
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(static_cast<std::size_t>(std::stoul(cell)));
  if (out.empty()) throw ConfigError("empty K list");
  return out;
}

// Registers one string option per RunConfig key; returns the storage.
std::map<std::string, std::string>& add_run_options(CLI::App* app, std::map<std::string, std::string>& store,
                                                    const std::vector<std::string>& skip = {}) {
  const auto& keys = RunConfig::keys();
  const auto& help = RunConfig::key_help();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (std::find(skip.begin(), skip.end(), keys[i]) != skip.end()) continue;
    app->add_option("--" + keys[i], store[keys[i]], help[i]);
  }
  return store;
}

Entries collect(CLI::App* app, const std::map<std::string, std::string>& store) {
  Entries out;
  for (const auto& key : RunConfig::keys()) {
    const auto* opt = app->get_option_no_throw("--" + key);
    if (opt && opt->count() > 0) out.emplace_back(key, store.at(key));
  }
  return out;
}

std::string fixture_dir_or_default(const std::string& dir) { return dir.empty() ? default_fixture_dir() : dir; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-density node generation via stratified Q-MC layouts and truncated Riesz repulsion"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker cap (0 = all cores)");

  // tabulate
  auto* tab = app.add_subcommand("tabulate", "tabulate periodized separations of a Q-MC family");
  std::string tab_family = "il", tab_lattice = "golden", tab_out = "separation.csv", tab_fixtures;
  std::size_t tab_nmax = 100;
  std::uint64_t tab_seed = 1;
  tab->add_option("--family", tab_family, "il | riesz");
  tab->add_option("--n-max", tab_nmax, "largest n");
  tab->add_option("--lattice", tab_lattice, "golden | sqrt3-sqrt5 | caption | random");
  tab->add_option("--seed", tab_seed, "seed of the random lattice pair");
  tab->add_option("--fixtures", tab_fixtures, "minimizer fixture directory");
  tab->add_option("--out", tab_out, "output CSV");

  // generate
  auto* gen = app.add_subcommand("generate", "generate a node set");
  std::string gen_config;
  std::map<std::string, std::string> gen_store;
  gen->add_option("--config", gen_config, "key = value configuration file");
  add_run_options(gen, gen_store, {"threads"});

  // analyze
  auto* ana = app.add_subcommand("analyze", "statistics of a node file");
  std::string ana_input, ana_config, ana_stats, ana_dist, ana_holes;
  std::size_t ana_k = 12, ana_hole_samples = 0, ana_hole_steps = 200;
  double ana_scale = 1.0;
  std::map<std::string, std::string> ana_store;
  ana->add_option("--input", ana_input, "node file (.csv or binary)")->required();
  ana->add_option("--config", ana_config, "configuration describing the density and domain");
  ana->add_option("--nn", ana_k, "number of nearest neighbors");
  ana->add_option("--density-scale", ana_scale, "density scale reported by generate");
  ana->add_option("--stats-json", ana_stats, "aggregate JSON (default: stdout)");
  ana->add_option("--distances-csv", ana_dist, "per-node distances");
  ana->add_option("--holes-csv", ana_holes, "per-sample hole radii");
  ana->add_option("--hole-samples", ana_hole_samples, "hole-radius samples (0 = skip)");
  ana->add_option("--hole-steps", ana_hole_steps, "ascent steps per hole sample");
  add_run_options(ana, ana_store, {"threads", "k", "t", "output", "diagnostics", "layout-json", "stats"});

  // rbf-bench
  auto* rbf = app.add_subcommand("rbf-bench", "condition numbers of joint PHS stencil systems");
  std::string rbf_k = "20:200:20", rbf_out = "conditioning.csv", rbf_fixtures;
  std::size_t rbf_trials = 100;
  std::uint64_t rbf_seed = 1;
  double rbf_sigma = 0.1;
  rbf->add_option("--k", rbf_k, "stencil sizes as start:stop:step or a comma list");
  rbf->add_option("--trials", rbf_trials, "random centers per K");
  rbf->add_option("--seed", rbf_seed, "seed of the center draw");
  rbf->add_option("--sigma", rbf_sigma, "standard deviation of the center draw");
  rbf->add_option("--fixtures", rbf_fixtures, "minimizer fixture directory");
  rbf->add_option("--out", rbf_out, "output CSV");

  // appendix
  auto* apx = app.add_subcommand("appendix", "mean separations and mean/min ratios of lattice presets and minimizers");
  std::size_t apx_nmax = 100;
  std::uint64_t apx_seed = 1;
  std::string apx_dir = ".", apx_fixtures;
  apx->add_option("--n-max", apx_nmax, "largest n");
  apx->add_option("--seed", apx_seed, "seed of the random pair");
  apx->add_option("--fixtures", apx_fixtures, "minimizer fixture directory");
  apx->add_option("--out-dir", apx_dir, "directory for mean_sep.csv and ratio.csv");

  // minimizers
  auto* mins = app.add_subcommand("minimizers", "compute and store periodic Riesz minimizer fixtures");
  std::size_t mins_nmax = 100;
  std::vector<std::size_t> mins_extra;
  std::string mins_dir;
  bool mins_force = false;
  mins->add_option("--n-max", mins_nmax, "fixtures for n = 1..n-max");
  mins->add_option("--extra", mins_extra, "additional single sizes (e.g. 1000)");
  mins->add_option("--fixtures", mins_dir, "fixture directory");
  mins->add_flag("--force", mins_force, "recompute existing fixtures");

  // elevation
  auto* elev = app.add_subcommand("elevation", "write a synthetic elevation grid");
  std::size_t elev_rows = 720, elev_cols = 360;
  double elev_amp = 0.02, elev_outer = 1.1;
  std::uint64_t elev_seed = 1;
  std::string elev_out = "elevation.elev";
  elev->add_option("--rows", elev_rows, "azimuth rows (2 x cols)");
  elev->add_option("--cols", elev_cols, "polar columns");
  elev->add_option("--amplitude", elev_amp, "maximum deviation from radius 1");
  elev->add_option("--outer-radius", elev_outer, "outer radius");
  elev->add_option("--seed", elev_seed, "bump seed");
  elev->add_option("--out", elev_out, "output ELEV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report("config", e.what(), 2);
  }

  try {
    if (threads) set_thread_count(threads);

    if (*tab) {
      SeparationTable table;
      if (parse_family(tab_family) == QmcFamily::IrrationalLattice) {
        RunConfig c;
        c.lattice = tab_lattice;
        c.seed = tab_seed;
        table = tabulate_lattice_separation(tab_nmax, lattice_params(c), 3);
      } else {
        const auto configs = torus_minimizers(tab_nmax, TorusMinimizerParams::for_dimension(3), 3,
                                              fixture_dir_or_default(tab_fixtures));
        table = tabulate_minimizer_separation(configs);
      }
      write_separation_csv(table, tab_out);
      std::cout << nlohmann::json{{"rows", table.n_max()}, {"output", tab_out}}.dump() << std::endl;
      return 0;
    }

    if (*gen) {
      const RunConfig c = resolve_config(gen_config.empty() ? Entries{} : read_config_file(gen_config), collect(gen, gen_store));
      const auto start = std::chrono::steady_clock::now();
      const GenerateResult res = generate(c);
      write_outputs(c, res);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      nlohmann::json j;
      j["nodes"] = res.nodes.size();
      j["pinned"] = res.scenario.pinned.size();
      j["voxels_per_side"] = res.layout.plan.grid.m_per_side();
      j["layout_nodes"] = res.layout.nodes.size();
      j["saturated"] = res.layout.saturated;
      j["density_scale"] = res.density_scale;
      j["iterations"] = res.diagnostics.size();
      j["seconds"] = secs;
      if (!c.output.empty()) j["output"] = c.output;
      std::cout << j.dump(2) << std::endl;
      return 0;
    }

    if (*ana) {
      const NodeSet nodes = read_nodes(ana_input);
      const NnStats nn = nn_distances(nodes.positions, ana_k);
      const Entries cli = collect(ana, ana_store);
      const bool have_density = !ana_config.empty() || !cli.empty();
      RatioStats rs;
      std::optional<Scenario> sc;
      if (have_density) {
        const RunConfig c = resolve_config(ana_config.empty() ? Entries{} : read_config_file(ana_config), cli);
        sc = make_scenario(c, ana_scale);
        rs = ratio_stats(nodes.positions, sc->rho);
      }
      const std::string json = stats_json(nn, have_density ? &rs : nullptr);
      if (ana_stats.empty()) {
        std::cout << json << std::endl;
      } else {
        std::ofstream(ana_stats) << json << '\n';
      }
      if (!ana_dist.empty()) write_distances_csv(nn, ana_dist);
      if (ana_hole_samples > 0) {
        Domain dom = sc ? sc->domain : Domain{};
        if (!sc) {
          Box box{Vec(nodes.dim(), std::numeric_limits<double>::infinity()),
                  Vec(nodes.dim(), -std::numeric_limits<double>::infinity())};
          for (std::size_t i = 0; i < nodes.size(); ++i)
            for (std::size_t k = 0; k < nodes.dim(); ++k) {
              box.lo[k] = std::min(box.lo[k], nodes.positions[i][k]);
              box.hi[k] = std::max(box.hi[k], nodes.positions[i][k]);
            }
          dom = cube_domain(box);
        }
        const auto holes = hole_radius_estimate(nodes.positions, dom, ana_hole_samples, ana_hole_steps, 1);
        if (!ana_holes.empty()) write_holes_csv(holes, ana_holes);
      }
      return 0;
    }

    if (*rbf) {
      ConditioningConfig cc;
      cc.K_values = parse_k_range(rbf_k);
      cc.trials = rbf_trials;
      cc.seed = rbf_seed;
      cc.center_sigma = rbf_sigma;
      std::vector<std::pair<std::string, PointSet>> pops;
      pops.emplace_back("riesz", torus_minimizer_cached(1000, TorusMinimizerParams::for_dimension(3), 3,
                                                        fixture_dir_or_default(rbf_fixtures)));
      pops.emplace_back("halton", halton(1000, 3));
      pops.emplace_back("cartesian", cartesian_grid(10, 3));
      const auto rows = conditioning_experiment(pops, cc);
      write_conditioning_csv(rows, rbf_out);
      nlohmann::json summary = nlohmann::json::array();
      for (std::size_t i = 0; i < cc.K_values.size(); ++i) {
        const auto& r = rows[i];
        const auto& h = rows[cc.K_values.size() + i];
        const auto& g = rows[2 * cc.K_values.size() + i];
        summary.push_back({{"K", r.K},
                           {"riesz", r.avg_cond},
                           {"halton", h.avg_cond},
                           {"cartesian", g.avg_cond},
                           {"riesz_le_cartesian", r.avg_cond <= g.avg_cond}});
      }
      std::cout << summary.dump(2) << std::endl;
      return 0;
    }

    if (*apx) {
      std::vector<std::pair<std::string, SeparationTable>> tables;
      tables.emplace_back("golden", tabulate_lattice_separation(apx_nmax, LatticeParams::golden(), 3));
      tables.emplace_back("sqrt3_sqrt5", tabulate_lattice_separation(apx_nmax, LatticeParams::sqrt3_sqrt5(), 3));
      tables.emplace_back("caption_pair", tabulate_lattice_separation(apx_nmax, LatticeParams::caption_pair(), 3));
      tables.emplace_back("random_pair", tabulate_lattice_separation(apx_nmax, LatticeParams::random_pair(apx_seed), 3));
      tables.emplace_back("riesz", tabulate_minimizer_separation(torus_minimizers(
                                       apx_nmax, TorusMinimizerParams::for_dimension(3), 3,
                                       fixture_dir_or_default(apx_fixtures))));
      std::filesystem::create_directories(apx_dir);
      std::FILE* mean = std::fopen((apx_dir + "/mean_sep.csv").c_str(), "w");
      std::FILE* ratio = std::fopen((apx_dir + "/ratio.csv").c_str(), "w");
      if (!mean || !ratio) throw IoError("cannot write appendix CSVs in " + apx_dir);
      std::fprintf(mean, "n");
      std::fprintf(ratio, "n");
      for (const auto& [name, t] : tables) {
        std::fprintf(mean, ",%s", name.c_str());
        std::fprintf(ratio, ",%s", name.c_str());
      }
      std::fprintf(mean, "\n");
      std::fprintf(ratio, "\n");
      for (std::size_t n = 1; n <= apx_nmax; ++n) {
        std::fprintf(mean, "%zu", n);
        std::fprintf(ratio, "%zu", n);
        for (const auto& [name, t] : tables) {
          std::fprintf(mean, ",%.17g", t.at(n).mean_sep);
          std::fprintf(ratio, ",%.17g", t.at(n).mean_sep / t.at(n).min_sep);
        }
        std::fprintf(mean, "\n");
        std::fprintf(ratio, "\n");
      }
      std::fclose(mean);
      std::fclose(ratio);
      std::cout << nlohmann::json{{"rows", apx_nmax}, {"out_dir", apx_dir}}.dump() << std::endl;
      return 0;
    }

    if (*mins) {
      const std::string dir = fixture_dir_or_default(mins_dir);
      const auto params = TorusMinimizerParams::for_dimension(3);
      std::vector<std::size_t> sizes;
      for (std::size_t n = 1; n <= mins_nmax; ++n) sizes.push_back(n);
      sizes.insert(sizes.end(), mins_extra.begin(), mins_extra.end());
      if (mins_force)
        for (std::size_t n : sizes) std::filesystem::remove(minimizer_fixture_path(dir, 3, params.s_exponent, n));
      parallel_for(sizes.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) torus_minimizer_cached(sizes[i], params, 3, dir, true);
      });
      std::cout << nlohmann::json{{"fixtures", sizes.size()}, {"dir", dir}}.dump() << std::endl;
      return 0;
    }

    if (*elev) {
      write_elevation(synthetic_elevation(elev_rows, elev_cols, elev_amp, elev_seed, elev_outer), elev_out);
      std::cout << nlohmann::json{{"rows", elev_rows}, {"cols", elev_cols}, {"output", elev_out}}.dump() << std::endl;
      return 0;
    }
  } catch (const Error& e) {
    return report(e.category(), e.what(), static_cast<int>(e.kind()));
  } catch (const std::exception& e) {
    return report("internal", e.what(), 3);
  }
  return 0;
}
