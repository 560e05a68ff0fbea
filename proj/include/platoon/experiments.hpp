#pragma once

// Experiment runners behind the CLI subcommands. Each writes its CSVs and a
// manifest.json into the configured output directory.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "platoon/config.hpp"
#include "platoon/stability.hpp"

namespace platoon::experiments {

enum class Experiment { freq_stability, min_headway, mc_stability, attacker_sweep, min_power, reach };

/// CLI spelling, e.g. "min-headway".
const char* name(Experiment e);
std::optional<Experiment> parse_name(const std::string& s);
std::vector<Experiment> all_experiments();

struct Artifacts {
  std::filesystem::path dir;
  std::vector<std::filesystem::path> csv_files;
  std::filesystem::path manifest;
  /// Headline results also recorded in the manifest, as (key, value) text.
  std::vector<std::pair<std::string, std::string>> results;

  const std::string* result(const std::string& key) const;
};

/// Lead profiles for the Monte-Carlo experiments as configured.
std::vector<scenario::AccelProfile> build_profiles(const config::ExperimentConfig& cfg);

Artifacts run_experiment(Experiment e, const config::ExperimentConfig& cfg,
                         const stability::ExecPolicy& exec);

}  // namespace platoon::experiments
