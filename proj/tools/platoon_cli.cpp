// Command-line front end: one subcommand per experiment family.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "platoon/config.hpp"
#include "platoon/errors.hpp"
#include "platoon/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int workers = 0;
  std::optional<std::string> scale;
};

int run(platoon::experiments::Experiment which, const Options& opt) {
  using namespace platoon;
  config::ExperimentConfig cfg = config::load_config(opt.config_path);
  if (opt.scale) config::apply_scale(cfg.mc, *opt.scale == "paper" ? config::Scale::paper : config::Scale::desk);
  if (opt.seed) cfg.mc.seed = *opt.seed;
  if (opt.out) cfg.output_dir = *opt.out;
  cfg.validate();

  stability::ExecPolicy exec;
  exec.parallel = opt.workers != 1;
  exec.workers = opt.workers;

  const auto art = experiments::run_experiment(which, cfg, exec);
  std::cout << experiments::name(which) << ": wrote " << art.csv_files.size() << " file(s) to "
            << art.dir.string() << "\n";
  for (const auto& [k, v] : art.results) std::cout << "  " << k << " = " << v << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  using platoon::experiments::Experiment;
  CLI::App app{"CACC platoon string-stability, jamming and reachability experiments"};
  app.require_subcommand(1);

  Options opt;
  std::optional<Experiment> chosen;
  for (Experiment e : platoon::experiments::all_experiments()) {
    CLI::App* sub = app.add_subcommand(platoon::experiments::name(e));
    sub->add_option("--config", opt.config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "master seed; overrides mc.seed");
    sub->add_option("--out", opt.out, "output directory; overrides output_dir");
    sub->add_option("--workers", opt.workers, "OpenMP threads (1 = serial reference path, 0 = default)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--scale", opt.scale, "Monte-Carlo preset")->check(CLI::IsMember({"paper", "desk"}));
    sub->callback([&chosen, e] { chosen = e; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    return run(*chosen, opt);
  } catch (const platoon::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const platoon::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what();
    if (e.profile()) std::cerr << " (profile " << *e.profile();
    if (e.run()) std::cerr << ", run " << *e.run();
    if (e.profile()) std::cerr << ", step " << e.step() << ")";
    std::cerr << "\n";
    return kExitNumeric;
  } catch (const platoon::NoSolution& e) {
    std::cerr << "no solution: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
