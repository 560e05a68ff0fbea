#pragma once

// Deterministic bounds on the lead–follower gap under arbitrary hold
// patterns on link 1, Monte-Carlo containment checks and safety verdicts.

#include <optional>
#include <span>
#include <vector>

#include "platoon/plant.hpp"
#include "platoon/scenario.hpp"
#include "platoon/stability.hpp"

namespace platoon::reachability {

struct BoundProfiles {
  std::vector<double> run_max;
  std::vector<double> run_min;
};

/// Prefix maximum and minimum of the command samples.
BoundProfiles bound_profiles(std::span<const double> u_l);

struct ReachEnvelope {
  std::vector<double> lower;    // d₁ with ũ₀ forced to run_max
  std::vector<double> upper;    // d₁ with ũ₀ forced to run_min
  std::vector<double> nominal;  // d₁ with perfect delivery
  BoundProfiles bounds;
  double h = 0.0;
};

/// d₁ trace (K+1 entries) when follower 1 is fed `u_tilde0[k]` on its
/// feedforward link and every other link delivers perfectly.
std::vector<double> forced_d1(const plant::DiscreteModel& model, const plant::StringConfig& cfg,
                              const scenario::AccelProfile& profile,
                              std::span<const double> u_tilde0);

ReachEnvelope bound_trajectories(const plant::DiscreteModel& model, const plant::StringConfig& cfg,
                                 const scenario::AccelProfile& profile);

struct ContainmentReport {
  std::size_t runs = 0;
  std::size_t violations = 0;       // (run, step) pairs outside the slackened envelope
  std::size_t runs_violating = 0;
  double worst_excursion = 0.0;     // largest distance outside [lower, upper] [m]
  bool contained() const { return violations == 0; }
};

/// Per-run, per-step test lower[k] − slack ≤ d₁[k] ≤ upper[k] + slack. Runs
/// need d₁ traces whose length matches the envelope.
ContainmentReport envelope_check(std::span<const stability::TrajectoryRecord> runs,
                                 const ReachEnvelope& env, double slack,
                                 const stability::ExecPolicy& exec = {});

struct SafetyVerdict {
  bool unsafe_hit = false;
  std::optional<std::size_t> first_hit_step;
  double fraction_unsafe_runs = 0.0;
  double mean_first_hit_s = 0.0;  // over unsafe runs only; 0 when none
};

/// First state index with some d_i ≤ 0.
SafetyVerdict safety_check(const stability::TrajectoryRecord& run);
SafetyVerdict safety_summary(std::span<const stability::TrajectoryRecord> runs);

enum class ReachScenario { fading_only = 1, always_on_jam = 2, decel_triggered = 3 };

const char* to_string(ReachScenario s);

/// Jammer hovering over vehicle 1 and aimed only at link 1, with the policy
/// of the chosen scenario.
stability::Scenario make_reach_scenario(const stability::Scenario& base, ReachScenario which);

/// Pointwise mean of the d₁ traces.
std::vector<double> mean_d1(std::span<const stability::TrajectoryRecord> runs);

/// Lead acceleration state a₀ at each state index 0..K (independent of
/// delivery, so one deterministic pass suffices).
std::vector<double> lead_accel_trace(const plant::DiscreteModel& model,
                                     const plant::StringConfig& cfg,
                                     const scenario::AccelProfile& profile);

}  // namespace platoon::reachability
