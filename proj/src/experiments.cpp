#include "platoon/experiments.hpp"

#include <Eigen/Core>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "platoon/csv.hpp"
#include "platoon/errors.hpp"
#include "platoon/hash.hpp"
#include "platoon/reachability.hpp"

#ifndef PLATOON_VERSION
#define PLATOON_VERSION "0.0.0"
#endif

namespace platoon::experiments {

namespace fs = std::filesystem;
using stability::Mode;

const char* name(Experiment e) {
  switch (e) {
    case Experiment::freq_stability:
      return "freq-stability";
    case Experiment::min_headway:
      return "min-headway";
    case Experiment::mc_stability:
      return "mc-stability";
    case Experiment::attacker_sweep:
      return "attacker-sweep";
    case Experiment::min_power:
      return "min-power";
    case Experiment::reach:
      return "reach";
  }
  return "?";
}

std::vector<Experiment> all_experiments() {
  return {Experiment::freq_stability, Experiment::min_headway, Experiment::mc_stability,
          Experiment::attacker_sweep, Experiment::min_power,   Experiment::reach};
}

std::optional<Experiment> parse_name(const std::string& s) {
  for (Experiment e : all_experiments()) {
    if (s == name(e)) return e;
  }
  return std::nullopt;
}

const std::string* Artifacts::result(const std::string& key) const {
  for (const auto& [k, v] : results) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::vector<scenario::AccelProfile> build_profiles(const config::ExperimentConfig& cfg) {
  const double h = cfg.string.sample_interval;
  stability::ProfileSource src;
  src.multisine = cfg.profile.multisine;
  switch (cfg.profile.kind) {
    case config::ProfileKind::multisine:
      break;
    case config::ProfileKind::piecewise:
      src.fixed = scenario::piecewise_profile(cfg.profile.breakpoints, cfg.mc.horizon, h);
      break;
    case config::ProfileKind::csv: {
      scenario::AccelProfile p = scenario::read_profile_csv(cfg.profile.csv_path);
      if (std::fabs(p.h - h) > 1e-9 * h) {
        throw ConfigError("profile.csv_path", "sample interval differs from string.sample_interval_s");
      }
      src.fixed = std::move(p);
      break;
    }
  }
  return stability::make_profiles(src, cfg.mc.spec(), h);
}

namespace {

double to_dbm(double watts) { return scenario::convert_units(watts, scenario::Unit::watt, scenario::Unit::dbm); }

double dbm_or_neg_inf(double watts) {
  return watts > 0.0 ? to_dbm(watts) : -std::numeric_limits<double>::infinity();
}

class Run {
 public:
  Run(Experiment e, const config::ExperimentConfig& cfg) : e_(e), cfg_(cfg) {
    art_.dir = cfg.output_dir;
    fs::create_directories(art_.dir);
  }

  /// Registers an output file for the manifest and returns its path.
  fs::path track(const std::string& file) {
    art_.csv_files.push_back(art_.dir / file);
    return art_.csv_files.back();
  }

  CsvWriter csv(const std::string& file, std::initializer_list<std::string_view> header) {
    return CsvWriter(track(file), header);
  }

  void result(std::string key, std::string value) { art_.results.emplace_back(std::move(key), std::move(value)); }
  void result(std::string key, double value) { result(std::move(key), format_number(value)); }
  void result(std::string key, bool value) { result(std::move(key), std::string(value ? "true" : "false")); }

  Artifacts finish() {
    using nlohmann::json;
    // The output location is not part of the experiment's identity.
    config::ExperimentConfig canonical = cfg_;
    canonical.output_dir = ".";
    const std::string cfg_text = config::serialize_config(canonical);
    {
      std::ofstream out(art_.dir / "config.json", std::ios::binary | std::ios::trunc);
      out << cfg_text;
    }
    json m;
    m["tool"] = "platoon";
    m["experiment"] = name(e_);
    m["seed"] = cfg_.mc.seed;
    m["config_file"] = "config.json";
    m["config_sha256"] = sha256_hex(cfg_text);
    m["monte_carlo"] = {{"profiles", cfg_.mc.profiles},
                        {"runs", cfg_.mc.runs},
                        {"horizon_s", cfg_.mc.horizon}};
    m["versions"] = {
        {"platoon", PLATOON_VERSION},
        {"compiler", __VERSION__},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                      "." + std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"crypto", crypto_backend_version()}};
    json outputs = json::array();
    for (const auto& f : art_.csv_files) {
      outputs.push_back({{"file", f.filename().string()}, {"sha256", sha256_file(f)}});
    }
    m["outputs"] = outputs;
    json results = json::object();
    for (const auto& [k, v] : art_.results) results[k] = v;
    m["results"] = results;

    art_.manifest = art_.dir / "manifest.json";
    std::ofstream out(art_.manifest, std::ios::binary | std::ios::trunc);
    out << m.dump(2) << "\n";
    return art_;
  }

 private:
  Experiment e_;
  const config::ExperimentConfig& cfg_;
  Artifacts art_;
};

void freq_stability(Run& run, const config::ExperimentConfig& cfg) {
  auto curves = run.csv("gamma_curves.csv", {"omega_rad_s", "mag", "hd_s", "mode"});
  auto sups = run.csv("gamma_sup.csv", {"mode", "hd_s", "sup_mag", "omega_at_sup_rad_s", "stable"});
  for (Mode m : cfg.experiment.modes) {
    const stability::GammaSpec spec{m, cfg.string.params};
    for (double hd : cfg.experiment.gamma_hd) {
      for (const auto& pt : stability::gamma_curve(spec, hd, cfg.experiment.gamma_points)) {
        curves.row(pt.omega, pt.mag, hd, stability::to_string(m));
      }
      const auto sup = stability::sup_gamma(spec, hd);
      sups.row(stability::to_string(m), hd, sup.value, sup.omega, sup.value <= 1.0);
    }
  }
}

void min_headway(Run& run, const config::ExperimentConfig& cfg) {
  auto out = run.csv("min_headway.csv", {"mode", "min_hd_s", "tol_s", "sup_mag_at_min"});
  for (Mode m : cfg.experiment.modes) {
    const stability::GammaSpec spec{m, cfg.string.params};
    stability::HeadwaySearch search;
    search.tol = cfg.experiment.headway_tol;
    const double hd = stability::min_headway(spec, search);
    const double sup = stability::sup_gamma(spec, hd).value;
    out.row(stability::to_string(m), hd, search.tol, sup);
    run.result(std::string("min_headway_s.") + stability::to_string(m), hd);
  }
}

void write_errors(CsvWriter& csv, const std::vector<double>& errors) {
  for (std::size_t i = 0; i < errors.size(); ++i) csv.row(i + 1, errors[i]);
}

void mc_stability(Run& run, const config::ExperimentConfig& cfg, const stability::ExecPolicy& exec) {
  const auto sc = cfg.scenario();
  const auto model = plant::discretize(sc.string);
  const auto profiles = build_profiles(cfg);
  const auto rep = stability::mc_stability(model, sc, profiles, cfg.mc.spec(), exec);
  auto errs = run.csv("mean_max_errors.csv", {"vehicle", "mean_max_e_m"});
  write_errors(errs, rep.mean_max_error);
  auto summary = run.csv("stability_summary.csv",
                         {"mode", "hd_s", "profiles", "runs", "horizon_s", "seed", "verdict"});
  summary.row(stability::to_string(sc.mode), sc.string.params.hd, cfg.mc.profiles, cfg.mc.runs,
              cfg.mc.horizon, cfg.mc.seed, rep.verdict);
  run.result("mean_string_stable", rep.verdict);
}

void attacker_sweep(Run& run, const config::ExperimentConfig& cfg, const stability::ExecPolicy& exec) {
  const auto sc = cfg.scenario();
  const auto model = plant::discretize(sc.string);
  const auto profiles = build_profiles(cfg);
  const auto reports = stability::attacker_location_sweep(model, sc, profiles, cfg.mc.spec(),
                                                          cfg.experiment.positions, exec);
  auto sweep = run.csv("attacker_sweep.csv", {"j", "vehicle", "value"});
  auto verdicts = run.csv("attacker_verdicts.csv", {"j", "verdict"});
  for (const auto& [j, rep] : reports) {
    for (std::size_t i = 0; i < rep.mean_max_error.size(); ++i) sweep.row(j, i + 1, rep.mean_max_error[i]);
    verdicts.row(j, rep.verdict);
    run.result("stable.j" + std::to_string(j), rep.verdict);
  }
}

void min_power(Run& run, const config::ExperimentConfig& cfg, const stability::ExecPolicy& exec) {
  const auto sc = cfg.scenario();
  const auto profiles = build_profiles(cfg);
  const auto& e = cfg.experiment;
  const auto table = stability::min_transmit_power(sc, profiles, cfg.mc.spec(), e.power_hd,
                                                   e.pj_grid, e.pt_grid, exec);
  auto summary = run.csv("min_power.csv", {"hd_s", "Pj_dBm", "min_Pt_dBm", "feasible", "monotone_in_pt"});
  auto grid = run.csv("min_power_grid.csv", {"hd_s", "Pj_dBm", "Pt_dBm", "stable"});
  bool all_monotone = true;
  for (const auto& cell : table.cells) {
    const double pj_dbm = dbm_or_neg_inf(cell.pj);
    if (cell.min_pt) {
      summary.row(cell.hd, pj_dbm, to_dbm(*cell.min_pt), true, cell.monotone);
    } else {
      summary.row(cell.hd, pj_dbm, "", false, cell.monotone);
    }
    for (std::size_t k = 0; k < table.pt_grid.size(); ++k) {
      grid.row(cell.hd, pj_dbm, to_dbm(table.pt_grid[k]), static_cast<bool>(cell.stable[k]));
    }
    all_monotone = all_monotone && cell.monotone;
  }
  run.result("feasibility_monotone_in_pt", all_monotone);
}

void reach(Run& run, const config::ExperimentConfig& cfg, const stability::ExecPolicy& exec) {
  using namespace reachability;
  const auto base = cfg.scenario();
  const auto model = plant::discretize(base.string);
  config::ExperimentConfig one = cfg;
  one.mc.profiles = 1;
  const scenario::AccelProfile profile = build_profiles(one).front();
  const auto env = bound_trajectories(model, base.string, profile);

  scenario::write_profile_csv(profile, run.track("lead_profile.csv"));
  auto envelope = run.csv("envelope.csv", {"k", "t_s", "lower_m", "upper_m", "nominal_m"});
  for (std::size_t k = 0; k < env.lower.size(); ++k) {
    envelope.row(k, static_cast<double>(k) * env.h, env.lower[k], env.upper[k], env.nominal[k]);
  }

  auto bundle = run.csv("trajectories.csv", {"scenario", "run_id", "k", "d1_m"});
  auto safety = run.csv("safety.csv", {"scenario", "runs", "fraction_unsafe", "mean_first_hit_s"});
  auto contain = run.csv("containment.csv", {"scenario", "runs", "violations", "runs_violating",
                                             "worst_excursion_m", "contained"});
  stability::McSpec mc = one.mc.spec();
  const std::vector<scenario::AccelProfile> profiles{profile};
  for (int id : cfg.experiment.reach_scenarios) {
    const auto which = static_cast<ReachScenario>(id);
    const auto sc = make_reach_scenario(base, which);
    const auto runs = stability::run_batch(model, sc, profiles, mc, exec, stability::RecordLevel::traces);
    const std::size_t saved = std::min(runs.size(), cfg.experiment.saved_trajectories);
    for (std::size_t r = 0; r < saved; ++r) {
      for (std::size_t k = 0; k < runs[r].d1.size(); ++k) bundle.row(id, r, k, runs[r].d1[k]);
    }
    const auto verdict = safety_summary(runs);
    safety.row(id, runs.size(), verdict.fraction_unsafe_runs, verdict.mean_first_hit_s);
    const auto c = envelope_check(runs, env, cfg.experiment.envelope_slack, exec);
    contain.row(id, c.runs, c.violations, c.runs_violating, c.worst_excursion, c.contained());
    const std::string tag = std::string(".") + to_string(which);
    run.result("fraction_unsafe" + tag, verdict.fraction_unsafe_runs);
    run.result("contained" + tag, c.contained());
  }
}

}  // namespace

Artifacts run_experiment(Experiment e, const config::ExperimentConfig& cfg,
                         const stability::ExecPolicy& exec) {
  cfg.validate();
  Run run(e, cfg);
  switch (e) {
    case Experiment::freq_stability:
      freq_stability(run, cfg);
      break;
    case Experiment::min_headway:
      min_headway(run, cfg);
      break;
    case Experiment::mc_stability:
      mc_stability(run, cfg, exec);
      break;
    case Experiment::attacker_sweep:
      attacker_sweep(run, cfg, exec);
      break;
    case Experiment::min_power:
      min_power(run, cfg, exec);
      break;
    case Experiment::reach:
      reach(run, cfg, exec);
      break;
  }
  return run.finish();
}

}  // namespace platoon::experiments
