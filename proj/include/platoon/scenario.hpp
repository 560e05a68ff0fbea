#pragma once

// Lead-vehicle command profiles, jammer activity policies and unit handling.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "platoon/channel.hpp"
#include "platoon/plant.hpp"

namespace platoon::scenario {

struct MultiSineSpec {
  std::size_t n_components = 20;
  double f_lo = 0.01;  // [Hz]
  double f_hi = 0.5;   // [Hz]
  double a_max = 2.0;  // [m/s²]

  /// Checks 0 < f_lo < f_hi ≤ 1/(2h) and the remaining field bounds.
  void validate(double h) const;
  bool operator==(const MultiSineSpec&) const = default;
};

/// One (time, value) knot of a piecewise-linear command; values are held
/// constant before the first and after the last knot.
struct Breakpoint {
  double t = 0.0;  // [s]
  double u = 0.0;  // [m/s²]
  bool operator==(const Breakpoint&) const = default;
};

/// Lead commanded acceleration sampled every h seconds.
struct AccelProfile {
  std::vector<double> samples;
  double h = 0.1;
  double duration = 0.0;
  std::uint64_t seed = 0;
  std::string description;

  std::size_t steps() const { return samples.size(); }
  /// Command over interval k: the sample at k and the one after it (held at
  /// the final sample).
  plant::LeadCommand command_at(std::size_t k) const;
};

std::size_t sample_count(double duration, double h);

/// Random-phase multi-sine: tones equally spaced on [f_lo, f_hi], phases
/// uniform on [0, 2π) from the seeded stream, scaled so max |u| = a_max.
AccelProfile multisine_profile(const MultiSineSpec& spec, double duration, double h,
                               std::uint64_t seed);

/// Same synthesis with caller-supplied phases (one per tone).
AccelProfile multisine_profile(const MultiSineSpec& spec, double duration, double h,
                               std::span<const double> phases);

AccelProfile piecewise_profile(std::span<const Breakpoint> knots, double duration, double h);

/// Decelerate-then-accelerate profile used by the reachability scenarios:
/// launch at the initial commanded acceleration, brake, then recover.
std::vector<Breakpoint> default_reach_breakpoints();

/// Activity of the jammer at one sample instant. `lead_accel` is the lead's
/// acceleration state a₀[k]; `u_l_now` is accepted for policies keyed on the
/// command but the built-in ones do not read it.
bool jam_active(channel::JamPolicy policy, double u_l_now, double lead_accel);

enum class Unit { mph, mps, dbm, watt, dbi, db, linear };

/// Converts between mph/m·s⁻¹, dBm/W, dBi/linear and dB/linear.
/// Throws DomainError for any other pair.
double convert_units(double value, Unit from, Unit to);

/// CSV with header `k,t_s,u_l_mps2`.
void write_profile_csv(const AccelProfile& profile, const std::filesystem::path& path);
AccelProfile read_profile_csv(const std::filesystem::path& path);

}  // namespace platoon::scenario
