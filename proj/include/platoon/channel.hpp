#pragma once

// State-dependent link reliability between consecutive vehicles: free-space
// path loss, jammer interference, average SINR, Rician delivery probability,
// Bernoulli delivery draws, and the hold-last-packet receiver memory.
//
// All quantities are linear-domain SI (W, m, Hz, ratios). Decibel inputs are
// converted once at configuration time.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "platoon/rng.hpp"

namespace platoon::channel {

inline constexpr double kSpeedOfLight = 299792458.0;
/// received_power evaluates the path loss no closer than this [m].
inline constexpr double kMinLinkDistance = 0.1;

struct ChannelParams {
  double f0 = 5.9e9;        // carrier [Hz]
  double gt = 15.848931924611133;  // transmit antenna gain (12 dBi)
  double gr = 15.848931924611133;  // receive antenna gain (12 dBi)
  double alpha = 2.0;       // path-loss exponent
  double n0 = 1e-11;        // noise power [W] (−80 dBm)
  double k_factor = 2.0;    // Rician K
  double gamma_th = 63.09573444801933;  // SINR threshold (18 dB)
  double pt = 0.630957344480193;        // transmit power [W] (28 dBm)

  void validate() const;
  double wavelength() const { return kSpeedOfLight / f0; }
  bool operator==(const ChannelParams&) const = default;
};

enum class JamPolicy { always_on, off, decel_triggered };

struct JammerParams {
  double mu = 0.00173;   // signal mean (√W scale)
  double sigma = 0.001;  // signal standard deviation (√W scale)
  double gj = 63.09573444801933;  // jammer antenna gain (18 dBi)
  double altitude = 6.0;  // l [m]
  std::size_t position = 1;  // vehicle index the drone hovers above, 0..n
  JamPolicy policy = JamPolicy::always_on;
  /// Receiving vehicles whose incoming link is jammed; nullopt means all links.
  std::optional<std::vector<std::size_t>> targets{};

  /// Mean jamming power |μ|² + σ² [W].
  double power() const { return mu * mu + sigma * sigma; }
  bool targets_link(std::size_t receiver) const;
  /// Rescales (μ, σ) to the requested power keeping the ratio |μ|²/σ².
  JammerParams with_power(double watts) const;
  void validate(std::size_t n) const;
  bool operator==(const JammerParams&) const = default;
};

/// Receiver-side memory for the feedforward input. Slot i holds ũ_{i−1},
/// the last value vehicle i decoded from vehicle i−1; slot 0 is unused.
class CommBuffer {
 public:
  explicit CommBuffer(std::size_t n) : held_(n + 1, 0.0), initialized_(n + 1, false) {}

  std::size_t links() const { return held_.size() - 1; }
  double held(std::size_t link) const { return held_.at(link); }
  bool initialized(std::size_t link) const { return initialized_.at(link); }
  std::span<const double> values() const { return held_; }

 private:
  std::vector<double> held_;
  std::vector<bool> initialized_;

  friend double update_buffer(CommBuffer&, std::size_t, bool, double);
};

/// Horizontal-plus-altitude distance from receiver i to a jammer above
/// vehicle j. `gaps[m]` is d_m for m = 1..n; `gaps[0]` is ignored.
double jammer_distance(std::span<const double> gaps, std::size_t i, std::size_t j, double l);

/// Mean jammer power at a receiver a distance s away [W].
double jammer_interference(const JammerParams& jp, const ChannelParams& cp, double s);

/// Free-space received power at distance d [W].
double received_power(const ChannelParams& cp, double d);

/// Average SINR P_r / (N₀ + I); I is zero when the jammer is inactive.
double avg_sinr(const ChannelParams& cp, const JammerParams& jp, double d, double s,
                bool jam_active);

/// Probability that the instantaneous SINR of a Rician link reaches the
/// threshold: Q₁(√(2K), √(2(1+K)γ_th/γ̄)).
double delivery_prob(double gamma_bar, double k_factor, double gamma_th);

/// Bernoulli draw with success probability p; consumes exactly one uniform.
bool sample_delivery(double p, RngStream& rng);

/// Applies one sample instant to link `link`: a delivered packet replaces the
/// held value, a lost one leaves it untouched. The first update on a link is
/// always treated as delivered. Returns the value fed to the plant.
double update_buffer(CommBuffer& buf, std::size_t link, bool beta, double u_sent);

}  // namespace platoon::channel
