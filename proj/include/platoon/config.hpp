#pragma once

// Experiment configuration: JSON schema with unit-suffixed keys, parsed into
// SI/linear values and serialized back in canonical SI form.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "platoon/channel.hpp"
#include "platoon/plant.hpp"
#include "platoon/scenario.hpp"
#include "platoon/stability.hpp"

namespace platoon::config {

enum class ProfileKind { multisine, piecewise, csv };

struct ProfileConfig {
  ProfileKind kind = ProfileKind::multisine;
  scenario::MultiSineSpec multisine{};
  std::vector<scenario::Breakpoint> breakpoints = scenario::default_reach_breakpoints();
  std::filesystem::path csv_path{};

  bool operator==(const ProfileConfig&) const = default;
};

/// Knobs read by individual subcommands; each has a default.
struct ExperimentKnobs {
  std::vector<stability::Mode> modes{stability::Mode::acc, stability::Mode::cacc};
  stability::Mode mode = stability::Mode::cacc;
  stability::DeliveryOverride delivery = stability::DeliveryOverride::none;
  std::vector<double> gamma_hd{0.2, 0.5, 1.0, 1.5, 2.0, 2.2, 3.0};  // [s]
  std::size_t gamma_points = stability::kOmegaGridPoints;
  double headway_tol = 1e-3;  // [s]
  std::vector<std::size_t> positions{1, 2, 3, 4, 5, 6};
  std::vector<double> power_hd{0.5, 1.0, 1.5, 2.0};               // [s]
  std::vector<double> pj_grid{1e-7, 1e-6, 1e-5, 1e-4};             // [W]
  std::vector<double> pt_grid{1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};  // [W]
  std::vector<int> reach_scenarios{1, 2, 3};
  double envelope_slack = 1e-6;  // [m]
  std::size_t saved_trajectories = 20;

  bool operator==(const ExperimentKnobs&) const = default;
};

struct McConfig {
  std::size_t profiles = 20;
  std::size_t runs = 200;
  double horizon = 100.0;  // [s]
  std::uint64_t seed = 0;

  bool operator==(const McConfig&) const = default;
  stability::McSpec spec() const { return {profiles, runs, horizon, seed}; }
};

struct ExperimentConfig {
  plant::StringConfig string{};
  channel::ChannelParams channel{};
  channel::JammerParams jammer{};
  ProfileConfig profile{};
  McConfig mc{};
  ExperimentKnobs experiment{};
  std::filesystem::path output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  stability::Scenario scenario() const;
  void validate() const;
};

/// Parses JSON text. Unknown keys, missing `mc.seed`, conflicting unit
/// variants and invariant violations raise ConfigError naming the key.
/// Relative CSV paths are resolved against `base_dir`.
ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir = {});

ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON (SI keys, sorted, two-space indent, trailing newline).
std::string serialize_config(const ExperimentConfig& cfg);

enum class Scale { desk, paper };

/// Monte-Carlo preset: desk 20×200×100 s, paper 1000×10000×500 s.
void apply_scale(McConfig& mc, Scale scale);

}  // namespace platoon::config
