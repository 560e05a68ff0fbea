#include "platoon/plant.hpp"

#include <cmath>
#include <string>

#include "platoon/errors.hpp"

namespace platoon::plant {

void VehicleParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string(name) + " must be positive and finite");
    }
  };
  positive(eta, "eta");
  positive(kp, "kp");
  positive(kd, "kd");
  positive(hd, "hd");
  if (!(kd < 1.0 / eta)) {
    throw DomainError("kd must be below the actuator bandwidth 1/eta");
  }
}

void StringConfig::validate() const {
  if (n < 1) throw DomainError("n must be at least 1");
  params.validate();
  if (!(sample_interval > 0.0) || !std::isfinite(sample_interval)) {
    throw DomainError("sample_interval must be positive");
  }
  if (!std::isfinite(initial_velocity)) throw DomainError("initial_velocity must be finite");
  if (!(effective_initial_gap() > 0.0)) throw DomainError("initial gap must be positive");
}

double StringConfig::effective_initial_gap() const {
  return initial_gap > 0.0 ? initial_gap : params.hd * initial_velocity;
}

VehicleBlocks build_vehicle_blocks(const VehicleParams& p) {
  p.validate();
  const double inv_eta = 1.0 / p.eta;
  VehicleBlocks blk{Matrix::Zero(5, 5), Matrix::Zero(5, 5), Matrix::Zero(5, 1)};

  // ḋ = v_{i−1} − v_i ; ė = v_{i−1} − v_i − hd a_i ; v̇ = a
  blk.a_self(0, 2) = -1.0;
  blk.a_self(1, 2) = -1.0;
  blk.a_self(1, 3) = -p.hd;
  blk.a_self(2, 3) = 1.0;
  // ȧ = (−a + u)/η with u = kp(d − hd v) + kd(v_{i−1} − v − hd a) + u_f
  blk.a_self(3, 0) = inv_eta * p.kp;
  blk.a_self(3, 2) = -inv_eta * (p.kp * p.hd + p.kd);
  blk.a_self(3, 3) = -inv_eta * (1.0 + p.kd * p.hd);
  blk.a_self(3, 4) = inv_eta;
  // u̇_f = (ũ − u_f)/hd
  blk.a_self(4, 4) = -1.0 / p.hd;

  blk.a_pred(0, 2) = 1.0;
  blk.a_pred(1, 2) = 1.0;
  blk.a_pred(3, 2) = inv_eta * p.kd;

  blk.b_c(4, 0) = 1.0 / p.hd;
  return blk;
}

StringMatrices build_string(const StringConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n;
  const auto dim = static_cast<Eigen::Index>(cfg.state_dim());
  const double inv_eta0 = 1.0 / cfg.params.eta;

  StringMatrices out{Matrix::Zero(dim, dim), Matrix::Zero(dim, static_cast<Eigen::Index>(n + 1)),
                     Matrix::Zero(dim, 1)};

  // Lead: v̇₀ = a₀, ȧ₀ = (−a₀ + u_l)/η₀.
  out.a(2, 3) = 1.0;
  out.a(3, 3) = -inv_eta0;
  out.b_s(3, 0) = inv_eta0;

  const VehicleBlocks blk = build_vehicle_blocks(cfg.params);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto r = static_cast<Eigen::Index>(kStatesPerVehicle * i);
    out.a.block(r, r, 5, 5) = blk.a_self;
    out.a.block(r, r - 5, 5, 5) = blk.a_pred;
    out.b_c.block(r, static_cast<Eigen::Index>(i), 5, 1) = blk.b_c;
  }
  return out;
}

DiscreteModel discretize(const StringConfig& cfg) {
  const StringMatrices cont = build_string(cfg);
  const double h = cfg.sample_interval;
  const Matrix gamma0 = numerics::zoh_integral(cont.a, h);
  const Matrix gamma1 = numerics::ramp_integral(cont.a, h);

  DiscreteModel model;
  model.n = cfg.n;
  model.h = h;
  model.params = cfg.params;
  model.a_d = numerics::expm(cont.a * h);
  model.b_c_d = gamma0 * cont.b_c;
  model.b_s_d = gamma0 * cont.b_s;
  model.b_s_ramp = (gamma1 * cont.b_s).col(0) / h;
  return model;
}

StringState initial_state(const StringConfig& cfg) {
  cfg.validate();
  StringState x = StringState::Zero(static_cast<Eigen::Index>(cfg.state_dim()));
  const double gap = cfg.effective_initial_gap();
  for (std::size_t i = 0; i <= cfg.n; ++i) {
    x(static_cast<Eigen::Index>(index_of(i, Coord::velocity))) = cfg.initial_velocity;
    if (i > 0) {
      x(static_cast<Eigen::Index>(index_of(i, Coord::gap))) = gap;
      x(static_cast<Eigen::Index>(index_of(i, Coord::error))) =
          gap - cfg.params.hd * cfg.initial_velocity;
    }
  }
  return x;
}

void step_into(const DiscreteModel& model, const StringState& x,
               std::span<const double> u_tilde, LeadCommand u_l, StringState& out) {
  if (x.size() != model.a_d.rows()) throw DimensionError("step: state size mismatch");
  if (u_tilde.size() != model.n + 1) throw DimensionError("step: u_tilde must have n+1 entries");
  if (u_tilde[0] != 0.0) {
    throw ContractViolation("step: u_tilde[0] must be zero (the lead receives no feedforward)");
  }
  const Eigen::Map<const Vector> u(u_tilde.data(), static_cast<Eigen::Index>(u_tilde.size()));
  out.resize(x.size());
  out.noalias() = model.a_d * x;
  out.noalias() += model.b_c_d * u;
  out += model.b_s_d.col(0) * u_l.now;
  if (u_l.next != u_l.now) out += model.b_s_ramp * (u_l.next - u_l.now);
}

StringState step(const DiscreteModel& model, const StringState& x,
                 std::span<const double> u_tilde, LeadCommand u_l) {
  StringState out;
  step_into(model, x, u_tilde, u_l, out);
  return out;
}

double commanded_accel(const VehicleParams& p, const StringState& x, std::size_t i) {
  auto at = [&](std::size_t v, Coord c) { return x(static_cast<Eigen::Index>(index_of(v, c))); };
  const double d = at(i, Coord::gap);
  const double v = at(i, Coord::velocity);
  const double a = at(i, Coord::accel);
  const double uf = at(i, Coord::feedforward);
  const double v_prev = at(i - 1, Coord::velocity);
  return p.kp * (d - p.hd * v) + p.kd * (v_prev - v - p.hd * a) + uf;
}

double spacing_error(const VehicleParams& p, const StringState& x, std::size_t i) {
  return x(static_cast<Eigen::Index>(index_of(i, Coord::gap))) -
         p.hd * x(static_cast<Eigen::Index>(index_of(i, Coord::velocity)));
}

}  // namespace platoon::plant
