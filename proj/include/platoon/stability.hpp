#pragma once

// String stability: frequency-domain certification and headway search, the
// stochastic string simulator, and Monte-Carlo estimators built on it.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "platoon/channel.hpp"
#include "platoon/plant.hpp"
#include "platoon/scenario.hpp"

namespace platoon::stability {

enum class Mode { acc, cacc };

const char* to_string(Mode m);

struct GammaSpec {
  Mode mode = Mode::cacc;
  plant::VehicleParams params{};
};

/// |E_i(jω)/E_{i−1}(jω)| from the closed-loop error transfer functions.
double gamma_mag(const GammaSpec& spec, double hd, double omega);

struct SupGamma {
  double value = 0.0;
  double omega = 0.0;  // maximizer [rad/s]
};

inline constexpr double kOmegaMin = 1e-3;
inline constexpr double kOmegaMax = 1e5;
inline constexpr std::size_t kOmegaGridPoints = 2000;

/// Supremum over a log grid on [kOmegaMin, kOmegaMax], refined by
/// golden-section search between the neighbours of the grid maximizer.
SupGamma sup_gamma(const GammaSpec& spec, double hd);

struct HeadwaySearch {
  double lo = 0.01;
  double hi = 10.0;
  double tol = 1e-3;
};

/// Smallest hd with sup_gamma ≤ 1, by bisection. Throws NoSolution if the
/// upper bracket is itself unstable.
double min_headway(const GammaSpec& spec, const HeadwaySearch& search = {});

struct GammaPoint {
  double omega;
  double mag;
};

/// Magnitude sampled on the log grid used by sup_gamma (for plotting).
std::vector<GammaPoint> gamma_curve(const GammaSpec& spec, double hd,
                                    std::size_t points = kOmegaGridPoints);

// ---------------------------------------------------------------------------
// Stochastic string simulation

enum class DeliveryOverride { none, always, never };

/// Everything a run needs apart from the lead profile and its random stream.
struct Scenario {
  plant::StringConfig string{};
  channel::ChannelParams channel{};
  channel::JammerParams jammer{};
  Mode mode = Mode::cacc;
  DeliveryOverride delivery = DeliveryOverride::none;

  void validate() const;
};

enum class RecordLevel {
  errors,  // per-vehicle max |e_i| and the first unsafe step
  traces,  // plus d₁ and min_i d_i per state
  full,    // plus every state, delivery bit, held input and jammer flag
};

struct TrajectoryRecord {
  std::size_t n = 0;
  std::size_t steps = 0;  // number of plant updates K; traces have K+1 entries
  double h = 0.0;
  std::size_t profile = 0;
  std::size_t run = 0;

  std::vector<double> max_abs_error;  // length n, over states 0..K
  std::optional<std::size_t> first_unsafe_step;

  std::vector<double> d1;       // traces, full
  std::vector<double> min_gap;  // traces, full

  std::vector<double> states;         // full: (K+1) × 5(n+1), row-major
  std::vector<std::uint8_t> betas;    // full: K × n (link i at column i−1)
  std::vector<double> held;           // full: K × n (ũ fed on link i)
  std::vector<std::uint8_t> jam_on;   // full: K

  double state(std::size_t k, std::size_t idx) const;
};

/// Seed of the delivery stream for run (profile, run) under `master`.
std::uint64_t run_seed(std::uint64_t master, std::size_t profile, std::size_t run);
/// Seed handed to multisine_profile for profile index p.
std::uint64_t profile_seed(std::uint64_t master, std::size_t profile);

/// Simulates the string over every interval of `profile`. At each step k the
/// links are served in order 1..n: geometry → average SINR → delivery
/// probability → one uniform draw → buffer update; then the plant advances.
/// Step 0 always delivers and consumes no draw. Throws NumericFailure on a
/// non-finite state.
TrajectoryRecord run_trajectory(const plant::DiscreteModel& model, const Scenario& sc,
                                const scenario::AccelProfile& profile, std::uint64_t seed,
                                RecordLevel level = RecordLevel::errors);

/// Average over profiles of the per-profile average of run maxima. Runs are
/// grouped by `profile` and summed in (profile, run) order.
std::vector<double> mean_max_errors(std::span<const TrajectoryRecord> runs);

/// Strictly decreasing from vehicle 1 to n. Requires n ≥ 2.
bool is_mean_string_stable(std::span<const double> errors);

// ---------------------------------------------------------------------------
// Monte-Carlo batches

struct McSpec {
  std::size_t profiles = 20;
  std::size_t runs = 200;
  double horizon = 100.0;  // [s]
  std::uint64_t seed = 1;

  void validate() const;
};

struct ExecPolicy {
  bool parallel = true;
  int workers = 0;  // 0: OpenMP default
};

/// Profile p is fixed if given, else a multisine drawn from profile_seed(seed, p).
struct ProfileSource {
  scenario::MultiSineSpec multisine{};
  std::optional<scenario::AccelProfile> fixed{};
};

std::vector<scenario::AccelProfile> make_profiles(const ProfileSource& src, const McSpec& mc,
                                                  double h);

/// Runs every (profile, run) pair. Result slot p·runs + q holds run (p, q),
/// independent of scheduling. A NumericFailure is rethrown for the lowest
/// failing slot with its coordinates attached.
std::vector<TrajectoryRecord> run_batch(const plant::DiscreteModel& model, const Scenario& sc,
                                        std::span<const scenario::AccelProfile> profiles,
                                        const McSpec& mc, const ExecPolicy& exec,
                                        RecordLevel level = RecordLevel::errors);

struct StabilityReport {
  std::vector<double> mean_max_error;
  bool verdict = false;
  McSpec meta{};
};

StabilityReport mc_stability(const plant::DiscreteModel& model, const Scenario& sc,
                             std::span<const scenario::AccelProfile> profiles, const McSpec& mc,
                             const ExecPolicy& exec);

/// One report per jammer position; every position sees the same profiles and
/// delivery streams.
std::map<std::size_t, StabilityReport> attacker_location_sweep(
    const plant::DiscreteModel& model, const Scenario& base,
    std::span<const scenario::AccelProfile> profiles, const McSpec& mc,
    std::span<const std::size_t> positions, const ExecPolicy& exec);

struct MinPowerCell {
  double hd = 0.0;          // [s]
  double pj = 0.0;          // jammer power [W]
  std::optional<double> min_pt;  // [W]; nullopt when no grid value is stable
  std::vector<bool> stable;      // verdict per pt grid entry
  bool monotone = true;          // once stable, stays stable as P_t grows
};

struct MinPowerTable {
  std::vector<double> hd_grid;
  std::vector<double> pj_grid;
  std::vector<double> pt_grid;
  std::vector<MinPowerCell> cells;  // row-major over (hd, pj)

  const MinPowerCell& at(std::size_t ih, std::size_t ij) const {
    return cells.at(ih * pj_grid.size() + ij);
  }
};

/// For every (hd, P_j) the smallest grid P_t whose report is stable. Grids must
/// be ascending. Profiles and delivery streams are shared by all cells.
MinPowerTable min_transmit_power(const Scenario& base, std::span<const scenario::AccelProfile> profiles,
                                 const McSpec& mc, std::span<const double> hd_grid,
                                 std::span<const double> pj_grid, std::span<const double> pt_grid,
                                 const ExecPolicy& exec);

}  // namespace platoon::stability
