#include "platoon/stability.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <string>

#include "platoon/errors.hpp"
#include "platoon/rng.hpp"

namespace platoon::stability {

using plant::Coord;
using plant::index_of;

const char* to_string(Mode m) { return m == Mode::acc ? "ACC" : "CACC"; }

double gamma_mag(const GammaSpec& spec, double hd, double omega) {
  if (!(hd > 0.0)) throw DomainError("gamma_mag: hd must be positive");
  if (!(omega >= 0.0)) throw DomainError("gamma_mag: omega must be non-negative");
  const double eta = spec.params.eta;
  const double kp = spec.params.kp;
  const double kd = spec.params.kd;
  const std::complex<double> s(0.0, omega);
  const std::complex<double> s2 = s * s;
  const std::complex<double> s3 = s2 * s;

  // The velocity coefficient multiplies kp by the headway time.
  const std::complex<double> cubic = eta * s3 + (1.0 + kd) * s2 + (kd + kp * hd) * s + kp;
  if (spec.mode == Mode::acc) {
    return std::abs((kd * s + kp) / cubic);
  }
  const std::complex<double> quartic = eta * hd * s2 * s2 + (kd * hd * hd + hd + eta) * s3 +
                                       (kp * hd * hd + hd + 1.0) * s2 + (kd * hd + kd) * s + kp;
  return std::abs(cubic / quartic);
}

namespace {

double log_grid(std::size_t i, std::size_t points) {
  const double lo = std::log10(kOmegaMin);
  const double hi = std::log10(kOmegaMax);
  return std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
}

}  // namespace

SupGamma sup_gamma(const GammaSpec& spec, double hd) {
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t i = 0; i < kOmegaGridPoints; ++i) {
    const double v = gamma_mag(spec, hd, log_grid(i, kOmegaGridPoints));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  SupGamma out{best_val, log_grid(best, kOmegaGridPoints)};

  // Golden-section in log ω between the grid neighbours of the maximizer.
  double a = std::log(log_grid(best == 0 ? 0 : best - 1, kOmegaGridPoints));
  double b = std::log(log_grid(std::min(best + 1, kOmegaGridPoints - 1), kOmegaGridPoints));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double lw) { return gamma_mag(spec, hd, std::exp(lw)); };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double lw = 0.5 * (a + b);
  const double refined = f(lw);
  if (refined > out.value) out = {refined, std::exp(lw)};
  return out;
}

double min_headway(const GammaSpec& spec, const HeadwaySearch& search) {
  if (!(search.tol > 0.0)) throw DomainError("min_headway: tol must be positive");
  if (!(search.lo > 0.0 && search.lo < search.hi)) {
    throw DomainError("min_headway: bracket must satisfy 0 < lo < hi");
  }
  spec.params.validate();
  auto stable = [&](double hd) { return sup_gamma(spec, hd).value <= 1.0; };
  if (!stable(search.hi)) {
    throw NoSolution("min_headway: unstable at the upper bracket hd = " +
                     std::to_string(search.hi));
  }
  if (stable(search.lo)) return search.lo;
  double lo = search.lo;
  double hi = search.hi;
  while (hi - lo > search.tol) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<GammaPoint> gamma_curve(const GammaSpec& spec, double hd, std::size_t points) {
  if (points < 2) throw DomainError("gamma_curve: need at least two points");
  std::vector<GammaPoint> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double w = log_grid(i, points);
    out[i] = {w, gamma_mag(spec, hd, w)};
  }
  return out;
}

// ---------------------------------------------------------------------------

void Scenario::validate() const {
  string.validate();
  channel.validate();
  jammer.validate(string.n);
}

double TrajectoryRecord::state(std::size_t k, std::size_t idx) const {
  const std::size_t dim = plant::kStatesPerVehicle * (n + 1);
  if (states.empty()) throw ContractViolation("TrajectoryRecord: states were not recorded");
  if (k > steps || idx >= dim) throw DomainError("TrajectoryRecord: index out of range");
  return states[k * dim + idx];
}

std::uint64_t run_seed(std::uint64_t master, std::size_t profile, std::size_t run) {
  return derive_seed(master, {static_cast<std::uint64_t>(StreamTag::delivery), profile, run});
}

std::uint64_t profile_seed(std::uint64_t master, std::size_t profile) {
  return derive_seed(master, {static_cast<std::uint64_t>(StreamTag::profile), profile});
}

TrajectoryRecord run_trajectory(const plant::DiscreteModel& model, const Scenario& sc,
                                const scenario::AccelProfile& profile, std::uint64_t seed,
                                RecordLevel level) {
  if (model.n != sc.string.n) throw DimensionError("run_trajectory: model and scenario differ in n");
  if (std::fabs(profile.h - model.h) > 1e-12 * model.h) {
    throw DimensionError("run_trajectory: profile sample interval differs from the model");
  }
  const std::size_t n = model.n;
  const std::size_t steps = profile.steps();
  const std::size_t dim = plant::kStatesPerVehicle * (n + 1);
  const plant::VehicleParams& vp = model.params;
  const bool cacc = sc.mode == Mode::cacc;
  const bool with_traces = level != RecordLevel::errors;
  const bool with_full = level == RecordLevel::full;

  TrajectoryRecord rec;
  rec.n = n;
  rec.steps = steps;
  rec.h = model.h;
  rec.max_abs_error.assign(n, 0.0);
  if (with_traces) {
    rec.d1.reserve(steps + 1);
    rec.min_gap.reserve(steps + 1);
  }
  if (with_full) {
    rec.states.reserve((steps + 1) * dim);
    rec.betas.reserve(steps * n);
    rec.held.reserve(steps * n);
    rec.jam_on.reserve(steps);
  }

  plant::StringState x = plant::initial_state(sc.string);
  plant::StringState next(static_cast<Eigen::Index>(dim));
  channel::CommBuffer buffer(n);
  RngStream rng(seed);
  std::vector<double> u_tilde(n + 1, 0.0);
  std::vector<double> gaps(n + 1, 0.0);

  auto at = [&](std::size_t v, Coord c) { return x(static_cast<Eigen::Index>(index_of(v, c))); };

  auto observe = [&](std::size_t k) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= n; ++i) {
      rec.max_abs_error[i - 1] = std::max(rec.max_abs_error[i - 1], std::fabs(at(i, Coord::error)));
      lowest = std::min(lowest, at(i, Coord::gap));
    }
    if (!rec.first_unsafe_step && lowest <= 0.0) rec.first_unsafe_step = k;
    if (with_traces) {
      rec.d1.push_back(at(1, Coord::gap));
      rec.min_gap.push_back(lowest);
    }
    if (with_full) rec.states.insert(rec.states.end(), x.data(), x.data() + dim);
  };

  observe(0);
  for (std::size_t k = 0; k < steps; ++k) {
    const plant::LeadCommand u_l = profile.command_at(k);
    bool jam = false;
    if (cacc) {
      jam = scenario::jam_active(sc.jammer.policy, u_l.now, at(0, Coord::accel));
      for (std::size_t i = 1; i <= n; ++i) gaps[i] = at(i, Coord::gap);
      for (std::size_t i = 1; i <= n; ++i) {
        // Vehicle i−1 broadcasts its commanded acceleration; the lead sends u_l.
        const double sent = i == 1 ? u_l.now : plant::commanded_accel(vp, x, i - 1);
        bool beta = true;
        if (k > 0) {
          switch (sc.delivery) {
            case DeliveryOverride::always:
              beta = true;
              break;
            case DeliveryOverride::never:
              beta = false;
              break;
            case DeliveryOverride::none: {
              const bool jammed = jam && sc.jammer.targets_link(i);
              const double s =
                  jammed ? channel::jammer_distance(gaps, i, sc.jammer.position, sc.jammer.altitude)
                         : 1.0;
              const double d = std::max(gaps[i], channel::kMinLinkDistance);
              const double gbar = channel::avg_sinr(sc.channel, sc.jammer, d, s, jammed);
              if (!(gbar > 0.0) || !std::isfinite(gbar)) {
                throw NumericFailure("degenerate SINR on link " + std::to_string(i) + " at step " +
                                         std::to_string(k),
                                     k);
              }
              const double p =
                  channel::delivery_prob(gbar, sc.channel.k_factor, sc.channel.gamma_th);
              beta = channel::sample_delivery(std::clamp(p, 0.0, 1.0), rng);
              break;
            }
          }
        }
        u_tilde[i] = channel::update_buffer(buffer, i, beta, sent);
        if (with_full) {
          rec.betas.push_back(beta ? 1 : 0);
          rec.held.push_back(u_tilde[i]);
        }
      }
    } else if (with_full) {
      rec.betas.insert(rec.betas.end(), n, 0);
      rec.held.insert(rec.held.end(), n, 0.0);
    }
    if (with_full) rec.jam_on.push_back(jam ? 1 : 0);

    plant::step_into(model, x, u_tilde, u_l, next);
    if (!next.allFinite()) {
      throw NumericFailure("non-finite state at step " + std::to_string(k + 1), k + 1);
    }
    x.swap(next);
    observe(k + 1);
  }
  return rec;
}

std::vector<double> mean_max_errors(std::span<const TrajectoryRecord> runs) {
  if (runs.empty()) throw DomainError("mean_max_errors: no runs");
  const std::size_t n = runs.front().max_abs_error.size();
  std::vector<const TrajectoryRecord*> order;
  order.reserve(runs.size());
  for (const auto& r : runs) {
    if (r.max_abs_error.size() != n) throw DimensionError("mean_max_errors: mixed string sizes");
    order.push_back(&r);
  }
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->profile != b->profile ? a->profile < b->profile : a->run < b->run;
  });

  std::vector<double> total(n, 0.0);
  std::vector<double> group(n, 0.0);
  std::size_t groups = 0;
  std::size_t members = 0;
  auto flush = [&] {
    for (std::size_t i = 0; i < n; ++i) total[i] += group[i] / static_cast<double>(members);
    std::fill(group.begin(), group.end(), 0.0);
    members = 0;
    ++groups;
  };
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r > 0 && order[r]->profile != order[r - 1]->profile) flush();
    for (std::size_t i = 0; i < n; ++i) group[i] += order[r]->max_abs_error[i];
    ++members;
  }
  flush();
  for (double& v : total) v /= static_cast<double>(groups);
  return total;
}

bool is_mean_string_stable(std::span<const double> errors) {
  if (errors.size() < 2) throw DomainError("is_mean_string_stable: need at least two vehicles");
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (!(errors[i] < errors[i - 1])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

void McSpec::validate() const {
  if (profiles < 1) throw DomainError("mc: profiles must be at least 1");
  if (runs < 1) throw DomainError("mc: runs must be at least 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("mc: horizon must be positive");
}

std::vector<scenario::AccelProfile> make_profiles(const ProfileSource& src, const McSpec& mc,
                                                  double h) {
  mc.validate();
  std::vector<scenario::AccelProfile> out;
  out.reserve(mc.profiles);
  for (std::size_t p = 0; p < mc.profiles; ++p) {
    if (src.fixed) {
      out.push_back(*src.fixed);
    } else {
      out.push_back(scenario::multisine_profile(src.multisine, mc.horizon, h, profile_seed(mc.seed, p)));
    }
  }
  return out;
}

std::vector<TrajectoryRecord> run_batch(const plant::DiscreteModel& model, const Scenario& sc,
                                        std::span<const scenario::AccelProfile> profiles,
                                        const McSpec& mc, const ExecPolicy& exec,
                                        RecordLevel level) {
  mc.validate();
  if (profiles.size() != mc.profiles) {
    throw DimensionError("run_batch: profile count differs from mc.profiles");
  }
  const std::size_t total = mc.profiles * mc.runs;
  std::vector<TrajectoryRecord> out(total);
  std::vector<std::exception_ptr> errors(total);

  auto one = [&](std::size_t slot) {
    const std::size_t p = slot / mc.runs;
    const std::size_t q = slot % mc.runs;
    try {
      out[slot] = run_trajectory(model, sc, profiles[p], run_seed(mc.seed, p, q), level);
      out[slot].profile = p;
      out[slot].run = q;
    } catch (const NumericFailure& e) {
      errors[slot] = std::make_exception_ptr(NumericFailure(e.what(), e.step(), p, q));
    } catch (...) {
      errors[slot] = std::current_exception();
    }
  };

  if (exec.parallel) {
    const int threads = exec.workers > 0 ? exec.workers : omp_get_max_threads();
    const auto count = static_cast<std::int64_t>(total);
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
    for (std::int64_t slot = 0; slot < count; ++slot) one(static_cast<std::size_t>(slot));
  } else {
    for (std::size_t slot = 0; slot < total; ++slot) one(slot);
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

StabilityReport mc_stability(const plant::DiscreteModel& model, const Scenario& sc,
                             std::span<const scenario::AccelProfile> profiles, const McSpec& mc,
                             const ExecPolicy& exec) {
  const auto runs = run_batch(model, sc, profiles, mc, exec, RecordLevel::errors);
  StabilityReport rep;
  rep.mean_max_error = mean_max_errors(runs);
  rep.verdict = is_mean_string_stable(rep.mean_max_error);
  rep.meta = mc;
  return rep;
}

std::map<std::size_t, StabilityReport> attacker_location_sweep(
    const plant::DiscreteModel& model, const Scenario& base,
    std::span<const scenario::AccelProfile> profiles, const McSpec& mc,
    std::span<const std::size_t> positions, const ExecPolicy& exec) {
  std::map<std::size_t, StabilityReport> out;
  for (std::size_t j : positions) {
    if (j < 1 || j > base.string.n) {
      throw DomainError("attacker_location_sweep: positions must lie in [1, n]");
    }
    Scenario sc = base;
    sc.jammer.position = j;
    out[j] = mc_stability(model, sc, profiles, mc, exec);
  }
  return out;
}

namespace {

void require_ascending(std::span<const double> grid, const char* name) {
  if (grid.empty()) throw DomainError(std::string(name) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError(std::string(name) + " grid must be ascending");
  }
}

}  // namespace

MinPowerTable min_transmit_power(const Scenario& base, std::span<const scenario::AccelProfile> profiles,
                                 const McSpec& mc, std::span<const double> hd_grid,
                                 std::span<const double> pj_grid, std::span<const double> pt_grid,
                                 const ExecPolicy& exec) {
  require_ascending(hd_grid, "hd");
  require_ascending(pj_grid, "P_j");
  require_ascending(pt_grid, "P_t");

  MinPowerTable table;
  table.hd_grid.assign(hd_grid.begin(), hd_grid.end());
  table.pj_grid.assign(pj_grid.begin(), pj_grid.end());
  table.pt_grid.assign(pt_grid.begin(), pt_grid.end());

  for (double hd : hd_grid) {
    Scenario sc_h = base;
    sc_h.string.params.hd = hd;
    // Keep the initial gap on the new spacing policy unless it was pinned.
    const plant::DiscreteModel model = plant::discretize(sc_h.string);
    for (double pj : pj_grid) {
      Scenario sc = sc_h;
      sc.jammer = base.jammer.with_power(pj);
      MinPowerCell cell;
      cell.hd = hd;
      cell.pj = pj;
      for (double pt : pt_grid) {
        sc.channel.pt = pt;
        const bool ok = mc_stability(model, sc, profiles, mc, exec).verdict;
        if (ok && !cell.min_pt) cell.min_pt = pt;
        if (!ok && cell.min_pt) cell.monotone = false;
        cell.stable.push_back(ok);
      }
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

}  // namespace platoon::stability
