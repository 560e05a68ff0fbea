#pragma once

// Longitudinal CACC string: per-vehicle blocks, the stacked continuous-time
// model, its exact sampled-data form, and the one-step state update.
//
// State layout per vehicle i = 0..n is (d_i, e_i, v_i, a_i, u_f,i), stacked
// into a vector of length 5(n+1). The lead's d, e and u_f rows are carried
// but have zero dynamics.

#include <cstddef>
#include <span>

#include "platoon/numerics.hpp"

namespace platoon::plant {

using numerics::Matrix;
using numerics::Vector;

inline constexpr std::size_t kStatesPerVehicle = 5;

/// Offsets of the per-vehicle state coordinates.
enum class Coord : std::size_t { gap = 0, error = 1, velocity = 2, accel = 3, feedforward = 4 };

inline constexpr std::size_t index_of(std::size_t vehicle, Coord c) {
  return kStatesPerVehicle * vehicle + static_cast<std::size_t>(c);
}

struct VehicleParams {
  double eta = 0.1;  // actuator lag [s]
  double kp = 0.25;  // proportional gain [1/s²]
  double kd = 0.5;   // derivative gain [1/s]
  double hd = 1.0;   // headway time [s]

  /// Throws DomainError naming the violated invariant (including kd < 1/eta).
  void validate() const;
  bool operator==(const VehicleParams&) const = default;
};

struct StringConfig {
  std::size_t n = 10;  // followers behind the lead
  VehicleParams params{};
  double sample_interval = 0.1;    // h [s]
  double initial_velocity = 17.8816;  // [m/s]
  double initial_gap = 0.0;  // [m]; zero or negative means hd · initial_velocity

  void validate() const;
  double effective_initial_gap() const;
  std::size_t state_dim() const { return kStatesPerVehicle * (n + 1); }
  bool operator==(const StringConfig&) const = default;
};

struct VehicleBlocks {
  Matrix a_self;  // A_{i,i}
  Matrix a_pred;  // A_{i,i-1}
  Matrix b_c;     // 5×1 feedforward input column
};

struct StringMatrices {
  Matrix a;    // 5(n+1) × 5(n+1)
  Matrix b_c;  // 5(n+1) × (n+1)
  Matrix b_s;  // 5(n+1) × 1
};

/// Sampled-data model. The lead command is reconstructed between samples by
/// linear interpolation; `b_s_ramp` multiplies the per-sample increment
/// (u_l[k+1] − u_l[k]) and vanishes from the update when the command is held.
struct DiscreteModel {
  std::size_t n = 0;
  double h = 0.0;
  VehicleParams params{};
  Matrix a_d;
  Matrix b_c_d;
  Matrix b_s_d;
  Vector b_s_ramp;
};

using StringState = Vector;

VehicleBlocks build_vehicle_blocks(const VehicleParams& p);
StringMatrices build_string(const StringConfig& cfg);
DiscreteModel discretize(const StringConfig& cfg);

/// Cruise equilibrium: common velocity, desired gaps, zero errors and inputs.
StringState initial_state(const StringConfig& cfg);

/// Lead command over one sample interval: value at the sample and at the
/// next sample. `next == now` is a zero-order hold.
struct LeadCommand {
  double now = 0.0;
  double next = 0.0;
  static LeadCommand held(double u) { return {u, u}; }
};

/// x⁺ = A_d x + B_c_d ũ + B_s_d u_l + b_s_ramp (u_l⁺ − u_l).
/// `u_tilde` has n+1 entries and u_tilde[0] must be exactly zero.
StringState step(const DiscreteModel& model, const StringState& x,
                 std::span<const double> u_tilde, LeadCommand u_l);

/// In-place variant for hot loops; `out` must not alias `x`.
void step_into(const DiscreteModel& model, const StringState& x,
               std::span<const double> u_tilde, LeadCommand u_l, StringState& out);

/// Commanded acceleration of follower i ≥ 1 at state x (the value it
/// transmits to vehicle i+1): kp(d − hd v) + kd(v_{i−1} − v − hd a) + u_f.
double commanded_accel(const VehicleParams& p, const StringState& x, std::size_t i);

/// Spacing error d_i − hd·v_i recomputed from gap and velocity.
double spacing_error(const VehicleParams& p, const StringState& x, std::size_t i);

}  // namespace platoon::plant
