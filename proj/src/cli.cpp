#include "slv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "slv/brownian_path.hpp"
#include "slv/classify3d.hpp"
#include "slv/decomposition.hpp"
#include "slv/errors.hpp"
#include "slv/io.hpp"
#include "slv/lv_dynamics.hpp"
#include "slv/measures.hpp"
#include "slv/parallel.hpp"
#include "slv/presets.hpp"
#include "slv/rng.hpp"
#include "slv/sde_integrators.hpp"
#include "slv/turbulence.hpp"

namespace slv {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Strict config reading: unknown keys are errors and every complaint names
// the offending field.
// ---------------------------------------------------------------------------

void check_keys(const json& obj, const std::string& path,
                const std::vector<std::string>& allowed) {
  if (!obj.is_object()) throw config_error(path + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw config_error("unknown config key: " + path + "." + key);
    }
  }
}

double require_number(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw config_error("missing config key: " + path + "." + key);
  if (!obj[key].is_number()) throw config_error(path + "." + key + ": expected a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& path, const std::string& key, double value) {
  if (!obj.contains(key)) return value;
  if (!obj[key].is_number()) throw config_error(path + "." + key + ": expected a number");
  return obj[key].get<double>();
}

long integer_or(const json& obj, const std::string& path, const std::string& key, long value) {
  if (!obj.contains(key)) return value;
  if (!obj[key].is_number_integer()) throw config_error(path + "." + key + ": expected an integer");
  return obj[key].get<long>();
}

Vec vec_or(const json& obj, const std::string& path, const std::string& key, Vec value) {
  if (!obj.contains(key) || obj[key].is_null()) return value;
  if (!obj[key].is_array()) throw config_error(path + "." + key + ": expected an array");
  Vec out;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) throw config_error(path + "." + key + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

struct LoadedConfig {
  json root;
  LVSystem system;
  Vec y0;
  std::uint64_t seed = 20240101;
};

LVSystem parse_system(const json& root, Vec* y0_out) {
  if (!root.contains("system")) throw config_error("missing config key: system");
  const json& sys = root["system"];
  check_keys(sys, "system", {"preset", "r", "matrix", "convention", "sigma", "calculus"});

  std::optional<LVSystem> system;
  if (sys.contains("preset")) {
    if (!sys["preset"].is_string()) throw config_error("system.preset: expected a string");
    const auto& preset = find_preset(sys["preset"].get<std::string>());
    system = preset.system;
    if (y0_out->empty()) *y0_out = preset.y0;
  }
  if (sys.contains("matrix")) {
    if (system.has_value()) {
      throw config_error("system.matrix: preset and matrix are mutually exclusive");
    }
    const double r = require_number(sys, "system", "r");
    if (!(r > 0.0)) throw config_error("system.r: must be positive");
    if (!sys["matrix"].is_array()) throw config_error("system.matrix: expected an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : sys["matrix"]) {
      if (!row.is_array()) throw config_error("system.matrix: expected an array of rows");
      rows.emplace_back();
      for (const auto& v : row) rows.back().push_back(v.get<double>());
    }
    std::string convention = "competitive";
    if (sys.contains("convention")) convention = sys["convention"].get<std::string>();
    if (convention == "competitive") {
      system = LVSystem::competitive_from(r, rows, 0.0, Calculus::stratonovich, "custom");
    } else if (convention == "interaction") {
      system = LVSystem::from_interactions(r, rows, 0.0, Calculus::stratonovich, "custom");
    } else {
      throw config_error("system.convention: expected competitive or interaction");
    }
  }
  if (!system.has_value()) {
    throw config_error("system: needs either preset or matrix");
  }
  if (sys.contains("r") && !sys.contains("matrix")) {
    const double r = require_number(sys, "system", "r");
    if (!(r > 0.0)) throw config_error("system.r: must be positive");
    system->r = r;
  }
  if (sys.contains("sigma")) {
    system->sigma = require_number(sys, "system", "sigma");
  }
  if (sys.contains("calculus")) {
    const std::string c = sys["calculus"].get<std::string>();
    if (c == "ito") {
      system->calculus = Calculus::ito;
    } else if (c == "stratonovich") {
      system->calculus = Calculus::stratonovich;
    } else {
      throw config_error("system.calculus: expected ito or stratonovich");
    }
  }
  return *system;
}

LoadedConfig load_config(const std::string& file, const std::string& section) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot read config file: " + file);
  json root;
  try {
    in >> root;
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  check_keys(root, "config", {"system", "y0", "seed", section});

  LoadedConfig out;
  out.root = root;
  out.y0 = vec_or(root, "config", "y0", {});
  out.system = parse_system(root, &out.y0);
  if (out.y0.empty()) throw config_error("missing config key: y0");
  if (static_cast<int>(out.y0.size()) != out.system.n) {
    throw config_error("y0: dimension does not match the system");
  }
  for (double v : out.y0) {
    if (v < 0.0) throw config_error("y0: components must be nonnegative");
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer()) throw config_error("seed: expected an integer");
    out.seed = root["seed"].get<std::uint64_t>();
  }
  return out;
}

const json& experiment_section(const LoadedConfig& cfg, const std::string& name) {
  if (!cfg.root.contains(name)) {
    throw config_error("missing config key: " + name);
  }
  return cfg.root[name];
}

struct CommonFlags {
  std::string config_file;
  std::string out_dir = "out";
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned threads = 0;
  bool check = false;

  unsigned effective_threads() const { return threads == 0 ? default_threads() : threads; }
};

void add_common(CLI::App* cmd, CommonFlags* flags, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", flags->config_file, "experiment config (JSON)");
  if (needs_config) opt->required();
  cmd->add_option("--out-dir", flags->out_dir, "output directory");
  cmd->add_option("--format", flags->format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", flags->seed, "override the config seed")
      ->each([flags](const std::string&) { flags->seed_set = true; });
  cmd->add_option("--threads", flags->threads, "worker threads (0 = hardware)");
  cmd->add_flag("--check", flags->check, "exit 4 when the acceptance gate fails");
}

TableFormat table_format(const CommonFlags& flags) {
  return flags.format == "json" ? TableFormat::json : TableFormat::csv;
}

fs::path prepare_out_dir(const CommonFlags& flags) {
  fs::path dir(flags.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw config_error("cannot create output directory: " + dir.string());
  return dir;
}

std::uint64_t pick_seed(const CommonFlags& flags, const LoadedConfig& cfg) {
  return flags.seed_set ? flags.seed : cfg.seed;
}

double rel_deviation(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    norm += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(1e-12, std::sqrt(norm));
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns the process exit code.
// ---------------------------------------------------------------------------

int run_simulate(const CommonFlags& flags) {
  const auto cfg = load_config(flags.config_file, "simulate");
  const json& sec = experiment_section(cfg, "simulate");
  check_keys(sec, "simulate", {"kind", "T", "step", "stride", "method"});
  const double horizon = require_number(sec, "simulate", "T");
  const double step = number_or(sec, "simulate", "step", 1e-3);
  const int stride = static_cast<int>(integer_or(sec, "simulate", "stride", 1));
  const std::string kind = sec.contains("kind") ? sec["kind"].get<std::string>() : "sde";
  const std::string method =
      sec.contains("method") ? sec["method"].get<std::string>() : "milstein";
  const std::uint64_t seed = pick_seed(flags, cfg);

  const auto dir = prepare_out_dir(flags);
  Trajectory trajectory;
  long clamp_events = -1;
  if (kind == "ode") {
    trajectory = integrate_ode(cfg.system, cfg.y0, horizon, {.step = step, .record_stride = stride});
  } else if (kind == "sde") {
    const auto path = BrownianPath::sample(seed, 0.0, horizon, step);
    const SdeOptions options{.record_stride = stride};
    const auto result = method == "euler"
                            ? euler_maruyama(cfg.system, path, cfg.y0, horizon, options)
                            : milstein(cfg.system, path, cfg.y0, horizon, options);
    trajectory = result.trajectory;
    clamp_events = result.clamp_events;
  } else if (kind == "decomposition") {
    const auto path = BrownianPath::sample(seed, 0.0, horizon, step);
    trajectory = phi_trajectory(cfg.system, path, cfg.y0, 1.0, horizon, stride);
  } else {
    throw config_error("simulate.kind: expected ode, sde, or decomposition");
  }

  write_trajectory_table(dir, table_format(flags), trajectory);
  json summary;
  summary["final_time"] = trajectory.times.back();
  summary["final_state"] = trajectory.state_vec(trajectory.size() - 1);
  if (clamp_events >= 0) summary["clamp_events"] = clamp_events;
  write_json(dir / "summary.json", summary);
  write_manifest(dir, "simulate", cfg.root, seed, flags.effective_threads());
  return 0;
}

int run_decompose_check(const CommonFlags& flags) {
  const auto cfg = load_config(flags.config_file, "decompose-check");
  const json& sec = experiment_section(cfg, "decompose-check");
  check_keys(sec, "decompose-check",
             {"T", "step", "refinements", "tolerance", "ratio_band", "method", "stride",
              "paths"});
  const double horizon = require_number(sec, "decompose-check", "T");
  const double step = number_or(sec, "decompose-check", "step", 1e-3);
  const int refinements = static_cast<int>(integer_or(sec, "decompose-check", "refinements", 2));
  const double tolerance = number_or(sec, "decompose-check", "tolerance", 1e-2);
  const int stride = static_cast<int>(integer_or(sec, "decompose-check", "stride", 10));
  const std::string method =
      sec.contains("method") ? sec["method"].get<std::string>() : "milstein";
  Vec band = vec_or(sec, "decompose-check", "ratio_band",
                    method == "milstein" ? Vec{1.5, 3.0} : Vec{1.2, 2.8});
  const int paths = static_cast<int>(integer_or(sec, "decompose-check", "paths", 1));
  const std::uint64_t seed = pick_seed(flags, cfg);

  const auto dir = prepare_out_dir(flags);
  TableWriter csv(dir, "decompose_check", table_format(flags),
                  {"level", "step", "max_rel_dev", "ratio_vs_prev"});

  // Deviations per level, averaged over the path ensemble (a single noisy
  // path makes the strong-order ratio itself noisy).
  std::vector<double> deviations(static_cast<std::size_t>(refinements) + 1, 0.0);
  std::vector<std::vector<double>> per_path(static_cast<std::size_t>(paths));
  parallel_for(static_cast<std::size_t>(paths), flags.effective_threads(), [&](std::size_t p) {
    auto path = BrownianPath::sample(paths == 1 ? seed : derive_seed(seed, p), 0.0, horizon, step);
    auto& row = per_path[p];
    for (int level = 0; level <= refinements; ++level) {
      const int eff_stride = stride << level;
      const auto phi = phi_trajectory(cfg.system, path, cfg.y0, 1.0, horizon, eff_stride);
      const SdeOptions options{.record_stride = eff_stride};
      const auto direct = method == "euler"
                              ? euler_maruyama(cfg.system, path, cfg.y0, horizon, options)
                              : milstein(cfg.system, path, cfg.y0, horizon, options);
      double worst = 0.0;
      for (std::size_t k = 0; k < phi.size(); ++k) {
        worst = std::max(worst, rel_deviation(phi.state(k), direct.trajectory.state(k)));
      }
      row.push_back(worst);
      if (level < refinements) path = path.refine();
    }
  });
  for (const auto& row : per_path) {
    for (std::size_t l = 0; l < row.size(); ++l) deviations[l] += row[l] / paths;
  }
  for (int level = 0; level <= refinements; ++level) {
    const auto l = static_cast<std::size_t>(level);
    csv.row({static_cast<double>(level), step / (1 << level), deviations[l],
             level > 0 ? deviations[l - 1] / deviations[l] : 0.0});
  }

  bool pass = deviations.front() < tolerance;
  json ratios = json::array();
  for (std::size_t l = 1; l < deviations.size(); ++l) {
    const double ratio = deviations[l - 1] / deviations[l];
    ratios.push_back(ratio);
    if (ratio < band[0] || ratio > band[1]) pass = false;
  }

  json summary;
  summary["method"] = method;
  summary["max_rel_dev"] = deviations.front();
  summary["tolerance"] = tolerance;
  summary["refinement_ratios"] = ratios;
  summary["ratio_band"] = band;
  summary["pass"] = pass;
  write_json(dir / "summary.json", summary);
  write_manifest(dir, "decompose-check", cfg.root, seed, flags.effective_threads());
  return flags.check && !pass ? 4 : 0;
}

int run_pullback(const CommonFlags& flags) {
  const auto cfg = load_config(flags.config_file, "pullback");
  const json& sec = experiment_section(cfg, "pullback");
  check_keys(sec, "pullback", {"times", "step", "window", "seeds", "tolerance", "anchor"});
  const Vec times = vec_or(sec, "pullback", "times", {50.0, 100.0, 200.0});
  const double step = number_or(sec, "pullback", "step", 1e-2);
  const double window = number_or(sec, "pullback", "window", 200.0);
  const int seeds = static_cast<int>(integer_or(sec, "pullback", "seeds", 20));
  const double tolerance = number_or(sec, "pullback", "tolerance", 1e-3);
  const Vec anchor = vec_or(sec, "pullback", "anchor", simplex_project(cfg.y0));
  const std::uint64_t seed0 = pick_seed(flags, cfg);

  const double t_max = *std::max_element(times.begin(), times.end());
  const auto dir = prepare_out_dir(flags);
  TableWriter csv(dir, "pullback", table_format(flags), {"seed", "t", "gap"});

  std::vector<std::vector<double>> gaps(static_cast<std::size_t>(seeds));
  parallel_for(static_cast<std::size_t>(seeds), flags.effective_threads(), [&](std::size_t s) {
    const auto path = BrownianPath::sample(derive_seed(seed0, s),
                                           -std::max(window, t_max), 0.0, step);
    const auto u = u_random_equilibrium(cfg.system.logistic_params(), path, window);
    auto& row = gaps[s];
    for (double t : times) {
      const auto phi = phi_pullback(cfg.system, path, cfg.y0, 1.0, t);
      double d = 0.0;
      for (std::size_t i = 0; i < phi.size(); ++i) {
        const double target = u.value * anchor[i];
        d += (phi[i] - target) * (phi[i] - target);
      }
      row.push_back(std::sqrt(d));
    }
  });

  int pass_count = 0;
  for (std::size_t s = 0; s < gaps.size(); ++s) {
    for (std::size_t j = 0; j < times.size(); ++j) {
      csv.row({static_cast<double>(s), times[j], gaps[s][j]});
    }
    if (gaps[s].back() < tolerance) ++pass_count;
  }

  json summary;
  summary["times"] = times;
  summary["tolerance"] = tolerance;
  summary["passes_at_final_time"] = pass_count;
  summary["seeds"] = seeds;
  const bool pass = pass_count == seeds;
  summary["pass"] = pass;
  write_json(dir / "summary.json", summary);
  write_manifest(dir, "pullback", cfg.root, seed0, flags.effective_threads());
  return flags.check && !pass ? 4 : 0;
}

int run_stationary(const CommonFlags& flags) {
  const auto cfg = load_config(flags.config_file, "stationary");
  const json& sec = experiment_section(cfg, "stationary");
  check_keys(sec, "stationary",
             {"T", "step", "paths", "samples_per_path", "burn_in", "anchor", "ray_tolerance",
              "axes_tolerance", "check"});
  const double horizon = require_number(sec, "stationary", "T");
  const double step = number_or(sec, "stationary", "step", 1e-2);
  const int paths = static_cast<int>(integer_or(sec, "stationary", "paths", 200));
  const int spp = static_cast<int>(integer_or(sec, "stationary", "samples_per_path", 50));
  const double burn_in = number_or(sec, "stationary", "burn_in", -1.0);
  const Vec anchor = vec_or(sec, "stationary", "anchor", simplex_project(cfg.y0));
  const double ray_tol = number_or(sec, "stationary", "ray_tolerance", 1e-3);
  const double axes_tol = number_or(sec, "stationary", "axes_tolerance", 0.05);
  const std::uint64_t seed = pick_seed(flags, cfg);

  const auto measure = empirical_time_average(
      cfg.system, cfg.y0, horizon, paths,
      {.step = step, .burn_in = burn_in, .samples_per_path = spp, .seed = seed,
       .threads = flags.effective_threads()});

  const auto dir = prepare_out_dir(flags);
  write_measure_table(dir, table_format(flags), measure);

  json summary;
  summary["samples"] = measure.size();
  summary["mean"] = measure.mean();
  summary["ray_mass"] = ray_mass(measure, anchor, ray_tol);
  double ks = -1.0;
  try {
    const auto params = cfg.system.logistic_params();
    ks = ks_distance(measure.radial_marginal(anchor),
                     [&](double x) { return stationary_cdf(params, x); });
    summary["radial_ks"] = ks;
  } catch (const std::exception&) {
    summary["radial_ks"] = nullptr;  // degenerate law at sigma = 0
  }
  const auto axes = axes_masses(measure, axes_tol);
  summary["axes_mass"] = axes.axes_mass;
  summary["boundary_mass"] = axes.boundary_mass;
  summary["interior_face_mass"] = axes.interior_face_mass;

  bool pass = true;
  if (sec.contains("check")) {
    const json& chk = sec["check"];
    check_keys(chk, "stationary.check", {"ray_mass_min", "ks_max", "axes_mass_min"});
    if (chk.contains("ray_mass_min") &&
        summary["ray_mass"].get<double>() < chk["ray_mass_min"].get<double>()) {
      pass = false;
    }
    if (chk.contains("ks_max") && (ks < 0.0 || ks > chk["ks_max"].get<double>())) pass = false;
    if (chk.contains("axes_mass_min") &&
        axes.axes_mass < chk["axes_mass_min"].get<double>()) {
      pass = false;
    }
  }
  summary["pass"] = pass;
  write_json(dir / "summary.json", summary);
  write_manifest(dir, "stationary", cfg.root, seed, flags.effective_threads());
  return flags.check && !pass ? 4 : 0;
}

int run_sweep_sigma(const CommonFlags& flags) {
  const auto cfg = load_config(flags.config_file, "sweep-sigma");
  const json& sec = experiment_section(cfg, "sweep-sigma");
  check_keys(sec, "sweep-sigma",
             {"sigmas", "T", "paths", "step", "samples_per_path", "anchor", "ball_radius",
              "orbit", "replications", "check"});
  const Vec sigmas = vec_or(sec, "sweep-sigma", "sigmas", {0.4, 0.2, 0.1});
  const double horizon = require_number(sec, "sweep-sigma", "T");
  const int paths = static_cast<int>(integer_or(sec, "sweep-sigma", "paths", 100));
  const double step = number_or(sec, "sweep-sigma", "step", 1e-2);
  const int spp = static_cast<int>(integer_or(sec, "sweep-sigma", "samples_per_path", 40));
  const int reps = static_cast<int>(integer_or(sec, "sweep-sigma", "replications", 1));
  const std::uint64_t seed = pick_seed(flags, cfg);

  SigmaSweepOptions options;
  options.average = {.step = step, .samples_per_path = spp, .seed = seed,
                     .threads = flags.effective_threads()};
  options.anchor = vec_or(sec, "sweep-sigma", "anchor", {});
  options.ball_radius = number_or(sec, "sweep-sigma", "ball_radius", 0.1);

  ClosedOrbit orbit;
  if (sec.contains("orbit") && !sec["orbit"].is_null()) {
    const json& orb = sec["orbit"];
    check_keys(orb, "sweep-sigma.orbit", {"transient", "scan", "step"});
    orbit = find_closed_orbit(cfg.system, cfg.y0,
                              number_or(orb, "sweep-sigma.orbit", "transient", 120.0),
                              number_or(orb, "sweep-sigma.orbit", "step", 1e-3),
                              number_or(orb, "sweep-sigma.orbit", "scan", 100.0));
    options.orbit = &orbit;
  }

  const auto dir = prepare_out_dir(flags);
  TableWriter csv(dir, "sweep", table_format(flags),
                  {"sigma", "replication", "mean_dist_to_anchor", "mass_in_ball", "radial_std",
                   "phase_ks"});

  // Median over replications, one row per (sigma, rep).
  std::vector<std::vector<SigmaSweepEntry>> all(static_cast<std::size_t>(reps));
  for (int rep = 0; rep < reps; ++rep) {
    options.average.seed = derive_seed(seed, static_cast<std::uint64_t>(rep));
    all[static_cast<std::size_t>(rep)] =
        sigma_sweep(cfg.system, cfg.y0, {sigmas.begin(), sigmas.end()}, horizon, paths, options);
    for (const auto& e : all[static_cast<std::size_t>(rep)]) {
      csv.row({e.sigma, static_cast<double>(rep), e.mean_dist_to_anchor, e.mass_in_ball,
               e.radial_std, e.phase_ks});
    }
  }

  auto median_of = [&](std::size_t sigma_idx, auto field) {
    std::vector<double> v;
    for (int rep = 0; rep < reps; ++rep) {
      v.push_back(field(all[static_cast<std::size_t>(rep)][sigma_idx]));
    }
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };

  json per_sigma = json::array();
  std::vector<double> ks_medians, ball_medians;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    json one;
    one["sigma"] = sigmas[i];
    one["median_phase_ks"] = median_of(i, [](const SigmaSweepEntry& e) { return e.phase_ks; });
    one["median_mass_in_ball"] =
        median_of(i, [](const SigmaSweepEntry& e) { return e.mass_in_ball; });
    one["median_radial_std"] =
        median_of(i, [](const SigmaSweepEntry& e) { return e.radial_std; });
    ks_medians.push_back(one["median_phase_ks"].get<double>());
    ball_medians.push_back(one["median_mass_in_ball"].get<double>());
    per_sigma.push_back(std::move(one));
  }

  bool pass = true;
  if (sec.contains("check")) {
    const json& chk = sec["check"];
    check_keys(chk, "sweep-sigma.check", {"phase_ks_decreasing", "mass_increasing"});
    if (chk.value("phase_ks_decreasing", false)) {
      for (std::size_t i = 1; i < ks_medians.size(); ++i) {
        if (!(ks_medians[i] < ks_medians[i - 1])) pass = false;
      }
    }
    if (chk.value("mass_increasing", false)) {
      for (std::size_t i = 1; i < ball_medians.size(); ++i) {
        if (!(ball_medians[i] > ball_medians[i - 1])) pass = false;
      }
    }
  }

  json summary;
  summary["per_sigma"] = per_sigma;
  summary["pass"] = pass;
  write_json(dir / "summary.json", summary);
  write_manifest(dir, "sweep-sigma", cfg.root, seed, flags.effective_threads());
  return flags.check && !pass ? 4 : 0;
}

int run_classify(const CommonFlags& flags) {
  const auto cfg = load_config(flags.config_file, "classify");
  const json& sec = experiment_section(cfg, "classify");
  check_keys(sec, "classify",
             {"interior_points", "boundary_points", "horizon_factor", "step", "orbit_scan",
              "max_total_steps", "check"});
  ClassifyBudget budget;
  budget.interior_points = static_cast<int>(integer_or(sec, "classify", "interior_points", 15));
  budget.boundary_points = static_cast<int>(integer_or(sec, "classify", "boundary_points", 9));
  budget.horizon_factor = number_or(sec, "classify", "horizon_factor", 300.0);
  budget.step = number_or(sec, "classify", "step", 1e-2);
  budget.orbit_scan = number_or(sec, "classify", "orbit_scan", 600.0);
  budget.max_total_steps = integer_or(sec, "classify", "max_total_steps", 50'000'000);

  const auto report = classify(cfg.system, budget);
  const auto dir = prepare_out_dir(flags);
  write_json(dir / "report.json", report.to_json());
  write_manifest(dir, "classify", cfg.root, pick_seed(flags, cfg), flags.effective_threads());

  bool pass = true;
  if (sec.contains("check")) {
    const json& chk = sec["check"];
    check_keys(chk, "classify.check", {"category"});
    if (chk.contains("category") && to_string(report.category) != chk["category"].get<std::string>()) {
      pass = false;
    }
  }
  return flags.check && !pass ? 4 : 0;
}

int run_turbulence(const CommonFlags& flags) {
  const auto cfg = load_config(flags.config_file, "turbulence");
  const json& sec = experiment_section(cfg, "turbulence");
  check_keys(sec, "turbulence",
             {"horizon", "paths", "radius", "step", "det_step", "det_stride", "det_horizon",
              "check"});
  NonuniqueOptions options;
  const double horizon = require_number(sec, "turbulence", "horizon");
  const int paths = static_cast<int>(integer_or(sec, "turbulence", "paths", 100));
  options.radius = number_or(sec, "turbulence", "radius", 0.5);
  options.step = number_or(sec, "turbulence", "step", 1e-3);
  options.det_step = number_or(sec, "turbulence", "det_step", 1e-3);
  options.det_stride = static_cast<int>(integer_or(sec, "turbulence", "det_stride", 5));
  options.det_horizon = number_or(sec, "turbulence", "det_horizon", -1.0);
  options.seed = pick_seed(flags, cfg);
  options.threads = flags.effective_threads();

  const auto result = nonunique_time_averages(cfg.system, cfg.y0, paths, horizon, options);

  const auto dir = prepare_out_dir(flags);
  TableWriter csv(dir, "turbulence", table_format(flags),
                  {"n", "T_in", "T_out", "fraction", "avg_at_Tout", "avg_at_Sout"});
  const auto fractions = dwell_fractions(result.a1);
  for (std::size_t n = 0; n < result.a1.entries.size(); ++n) {
    const auto& [t_in, t_out] = result.a1.entries[n];
    std::vector<std::optional<double>> cells = {static_cast<double>(n + 1), t_in, t_out,
                                                fractions[n]};
    cells.push_back(n < result.det_avg_T.size() ? std::optional(result.det_avg_T[n])
                                                : std::nullopt);
    cells.push_back(n < result.det_avg_S.size() ? std::optional(result.det_avg_S[n])
                                                : std::nullopt);
    csv.row_opt(cells);
  }

  // Occupation fractions at the last complete exit per center (the late-cycle
  // dwell concentration readout).
  const auto det_traj =
      integrate_ode(cfg.system, cfg.y0,
                    options.det_horizon > 0.0 ? options.det_horizon : 1.35 * horizon,
                    {.step = options.det_step, .record_stride = options.det_stride});
  json per_center = json::array();
  std::vector<double> last_occupations;
  for (int v = 0; v < 3; ++v) {
    Vec center(3, 0.0);
    center[static_cast<std::size_t>(v)] = 1.0;
    const auto record = dwell_times(det_traj, center, options.radius);
    // Only exits inside the experiment horizon count as "late cycle";
    // occupation through straddling dwells is still exact via the record.
    double t_last = -1.0;
    std::size_t pairs = 0;
    for (const auto& e : record.entries) {
      if (e.second <= horizon) {
        t_last = e.second;
        ++pairs;
      }
    }
    json one;
    one["center"] = v + 1;
    one["complete_pairs"] = pairs;
    if (t_last > 0.0) {
      const double occ = record.occupation_fraction(t_last);
      one["last_T_out"] = t_last;
      one["occupation_at_last_T_out"] = occ;
      last_occupations.push_back(occ);
    }
    per_center.push_back(std::move(one));
  }

  json summary;
  summary["per_center"] = per_center;
  summary["det_avg_T"] = result.det_avg_T;
  summary["det_avg_S"] = result.det_avg_S;
  summary["sto_avg_T"] = result.sto_avg_T;
  summary["sto_avg_S"] = result.sto_avg_S;
  summary["sto_avg_T_stop"] = result.sto_avg_T_stop;
  summary["subsequence_T_limit"] = result.sto_avg_T.back();
  summary["subsequence_S_limit"] = result.sto_avg_S.back();
  summary["gap_at_largest"] = result.gap_at_largest;

  bool pass = true;
  if (sec.contains("check")) {
    const json& chk = sec["check"];
    check_keys(chk, "turbulence.check", {"fraction_band", "min_gap"});
    if (chk.contains("fraction_band")) {
      const Vec band = vec_or(chk, "turbulence.check", "fraction_band", {0.39, 0.45});
      for (double occ : last_occupations) {
        if (occ < band[0] || occ > band[1]) pass = false;
      }
      if (last_occupations.size() != 3) pass = false;
    }
    if (chk.contains("min_gap") && result.gap_at_largest < chk["min_gap"].get<double>()) {
      pass = false;
    }
  }
  summary["pass"] = pass;
  write_json(dir / "summary.json", summary);
  write_manifest(dir, "turbulence", cfg.root, options.seed, flags.effective_threads());
  return flags.check && !pass ? 4 : 0;
}

int run_examples(bool list, const std::string& show) {
  if (list) {
    for (const auto& p : presets()) {
      std::cout << p.name << " - " << p.description << "\n";
    }
    return 0;
  }
  if (!show.empty()) {
    const auto& p = find_preset(show);
    json j;
    j["name"] = p.name;
    j["description"] = p.description;
    j["r"] = p.system.r;
    std::vector<std::vector<double>> b(static_cast<std::size_t>(p.system.n));
    for (int i = 0; i < p.system.n; ++i) {
      for (int k = 0; k < p.system.n; ++k) {
        b[static_cast<std::size_t>(i)].push_back(p.system.competitive_at(i, k));
      }
    }
    j["matrix"] = b;
    j["convention"] = "competitive";
    j["sigma"] = p.system.sigma;
    j["calculus"] = p.system.calculus == Calculus::ito ? "ito" : "stratonovich";
    j["y0"] = p.y0;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "use --list or --show NAME\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"stochastic Lotka-Volterra laboratory"};
  app.require_subcommand(1);

  CommonFlags simulate_flags, decompose_flags, pullback_flags, stationary_flags, sweep_flags,
      classify_flags, turbulence_flags;

  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory (ode/sde/decomposition)");
  add_common(simulate, &simulate_flags);
  auto* decompose = app.add_subcommand("decompose-check",
                                       "pathwise comparison of the decomposition against a direct scheme");
  add_common(decompose, &decompose_flags);
  auto* pullback = app.add_subcommand("pullback", "pull-back convergence to u(w) times the limit point");
  add_common(pullback, &pullback_flags);
  auto* stationary = app.add_subcommand("stationary", "empirical stationary measure with diagnostics");
  add_common(stationary, &stationary_flags);
  auto* sweep = app.add_subcommand("sweep-sigma", "small-noise sweep of the stationary sample");
  add_common(sweep, &sweep_flags);
  auto* classify_cmd = app.add_subcommand("classify", "three-species competitive classification");
  add_common(classify_cmd, &classify_flags);
  auto* turbulence = app.add_subcommand("turbulence", "dwell times and subsequence averages");
  add_common(turbulence, &turbulence_flags);

  bool list = false;
  std::string show;
  auto* examples = app.add_subcommand("examples", "built-in presets");
  examples->add_flag("--list", list, "list preset names");
  examples->add_option("--show", show, "print one preset as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      CLI::App dummy;
      return app.exit(e);
    }
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(simulate_flags);
    if (decompose->parsed()) return run_decompose_check(decompose_flags);
    if (pullback->parsed()) return run_pullback(pullback_flags);
    if (stationary->parsed()) return run_stationary(stationary_flags);
    if (sweep->parsed()) return run_sweep_sigma(sweep_flags);
    if (classify_cmd->parsed()) return run_classify(classify_flags);
    if (turbulence->parsed()) return run_turbulence(turbulence_flags);
    if (examples->parsed()) return run_examples(list, show);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const budget_error& e) {
    std::cerr << "numeric budget error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace slv
