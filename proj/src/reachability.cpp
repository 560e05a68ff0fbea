#include "platoon/reachability.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "platoon/errors.hpp"

namespace platoon::reachability {

using plant::Coord;
using plant::index_of;

BoundProfiles bound_profiles(std::span<const double> u_l) {
  if (u_l.empty()) throw DomainError("bound_profiles: empty profile");
  BoundProfiles out;
  out.run_max.resize(u_l.size());
  out.run_min.resize(u_l.size());
  double hi = u_l[0];
  double lo = u_l[0];
  for (std::size_t k = 0; k < u_l.size(); ++k) {
    hi = std::max(hi, u_l[k]);
    lo = std::min(lo, u_l[k]);
    out.run_max[k] = hi;
    out.run_min[k] = lo;
  }
  return out;
}

std::vector<double> forced_d1(const plant::DiscreteModel& model, const plant::StringConfig& cfg,
                              const scenario::AccelProfile& profile,
                              std::span<const double> u_tilde0) {
  if (model.n != cfg.n) throw DimensionError("forced_d1: model and config differ in n");
  if (u_tilde0.size() != profile.steps()) {
    throw DimensionError("forced_d1: forced input length differs from the profile");
  }
  const std::size_t n = model.n;
  plant::StringState x = plant::initial_state(cfg);
  plant::StringState next(x.size());
  std::vector<double> u_tilde(n + 1, 0.0);
  std::vector<double> d1;
  d1.reserve(profile.steps() + 1);
  d1.push_back(x(static_cast<Eigen::Index>(index_of(1, Coord::gap))));
  for (std::size_t k = 0; k < profile.steps(); ++k) {
    u_tilde[1] = u_tilde0[k];
    for (std::size_t i = 2; i <= n; ++i) u_tilde[i] = plant::commanded_accel(model.params, x, i - 1);
    plant::step_into(model, x, u_tilde, profile.command_at(k), next);
    if (!next.allFinite()) throw NumericFailure("non-finite state in bound trajectory", k + 1);
    x.swap(next);
    d1.push_back(x(static_cast<Eigen::Index>(index_of(1, Coord::gap))));
  }
  return d1;
}

ReachEnvelope bound_trajectories(const plant::DiscreteModel& model, const plant::StringConfig& cfg,
                                 const scenario::AccelProfile& profile) {
  ReachEnvelope env;
  env.h = model.h;
  env.bounds = bound_profiles(profile.samples);
  // A larger held command makes the follower close in, so the running max
  // gives the lower gap bound.
  env.lower = forced_d1(model, cfg, profile, env.bounds.run_max);
  env.upper = forced_d1(model, cfg, profile, env.bounds.run_min);
  env.nominal = forced_d1(model, cfg, profile, profile.samples);
  return env;
}

namespace {

struct RunContainment {
  std::size_t violations = 0;
  double worst = 0.0;
};

RunContainment check_one(const stability::TrajectoryRecord& run, const ReachEnvelope& env,
                         double slack) {
  RunContainment out;
  for (std::size_t k = 0; k < run.d1.size(); ++k) {
    const double below = env.lower[k] - run.d1[k];
    const double above = run.d1[k] - env.upper[k];
    const double excursion = std::max(below, above);
    if (excursion > slack) ++out.violations;
    out.worst = std::max(out.worst, excursion);
  }
  return out;
}

}  // namespace

ContainmentReport envelope_check(std::span<const stability::TrajectoryRecord> runs,
                                 const ReachEnvelope& env, double slack,
                                 const stability::ExecPolicy& exec) {
  if (!(slack >= 0.0)) throw DomainError("envelope_check: slack must be non-negative");
  if (env.lower.size() != env.upper.size()) throw DomainError("envelope_check: malformed envelope");
  for (const auto& r : runs) {
    if (r.d1.size() != env.lower.size()) {
      throw DomainError("envelope_check: run horizon differs from the envelope");
    }
  }
  std::vector<RunContainment> per_run(runs.size());
  if (exec.parallel) {
    const int threads = exec.workers > 0 ? exec.workers : omp_get_max_threads();
    const auto count = static_cast<std::int64_t>(runs.size());
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t r = 0; r < count; ++r) {
      per_run[static_cast<std::size_t>(r)] = check_one(runs[static_cast<std::size_t>(r)], env, slack);
    }
  } else {
    for (std::size_t r = 0; r < runs.size(); ++r) per_run[r] = check_one(runs[r], env, slack);
  }

  ContainmentReport rep;
  rep.runs = runs.size();
  for (const auto& c : per_run) {
    rep.violations += c.violations;
    rep.runs_violating += c.violations > 0 ? 1 : 0;
    rep.worst_excursion = std::max(rep.worst_excursion, c.worst);
  }
  return rep;
}

SafetyVerdict safety_check(const stability::TrajectoryRecord& run) {
  SafetyVerdict v;
  if (!run.min_gap.empty()) {
    for (std::size_t k = 0; k < run.min_gap.size(); ++k) {
      if (run.min_gap[k] <= 0.0) {
        v.first_hit_step = k;
        break;
      }
    }
  } else {
    v.first_hit_step = run.first_unsafe_step;
  }
  v.unsafe_hit = v.first_hit_step.has_value();
  v.fraction_unsafe_runs = v.unsafe_hit ? 1.0 : 0.0;
  if (v.unsafe_hit) v.mean_first_hit_s = static_cast<double>(*v.first_hit_step) * run.h;
  return v;
}

SafetyVerdict safety_summary(std::span<const stability::TrajectoryRecord> runs) {
  SafetyVerdict out;
  if (runs.empty()) return out;
  std::size_t unsafe = 0;
  double hit_time = 0.0;
  for (const auto& r : runs) {
    const SafetyVerdict v = safety_check(r);
    if (!v.unsafe_hit) continue;
    ++unsafe;
    hit_time += v.mean_first_hit_s;
    if (!out.first_hit_step || *v.first_hit_step < *out.first_hit_step) {
      out.first_hit_step = v.first_hit_step;
    }
  }
  out.unsafe_hit = unsafe > 0;
  out.fraction_unsafe_runs = static_cast<double>(unsafe) / static_cast<double>(runs.size());
  out.mean_first_hit_s = unsafe > 0 ? hit_time / static_cast<double>(unsafe) : 0.0;
  return out;
}

const char* to_string(ReachScenario s) {
  switch (s) {
    case ReachScenario::fading_only:
      return "fading_only";
    case ReachScenario::always_on_jam:
      return "always_on_jam";
    case ReachScenario::decel_triggered:
      return "decel_triggered";
  }
  return "?";
}

stability::Scenario make_reach_scenario(const stability::Scenario& base, ReachScenario which) {
  stability::Scenario sc = base;
  sc.mode = stability::Mode::cacc;
  sc.jammer.position = 1;
  sc.jammer.targets = std::vector<std::size_t>{1};
  switch (which) {
    case ReachScenario::fading_only:
      sc.jammer.policy = channel::JamPolicy::off;
      break;
    case ReachScenario::always_on_jam:
      sc.jammer.policy = channel::JamPolicy::always_on;
      break;
    case ReachScenario::decel_triggered:
      sc.jammer.policy = channel::JamPolicy::decel_triggered;
      break;
  }
  return sc;
}

std::vector<double> mean_d1(std::span<const stability::TrajectoryRecord> runs) {
  if (runs.empty()) throw DomainError("mean_d1: no runs");
  const std::size_t len = runs.front().d1.size();
  std::vector<double> out(len, 0.0);
  for (const auto& r : runs) {
    if (r.d1.size() != len) throw DimensionError("mean_d1: traces differ in length");
    for (std::size_t k = 0; k < len; ++k) out[k] += r.d1[k];
  }
  for (double& v : out) v /= static_cast<double>(runs.size());
  return out;
}

std::vector<double> lead_accel_trace(const plant::DiscreteModel& model,
                                     const plant::StringConfig& cfg,
                                     const scenario::AccelProfile& profile) {
  plant::StringState x = plant::initial_state(cfg);
  plant::StringState next(x.size());
  std::vector<double> u_tilde(model.n + 1, 0.0);
  const auto a0 = static_cast<Eigen::Index>(index_of(0, Coord::accel));
  std::vector<double> out;
  out.reserve(profile.steps() + 1);
  out.push_back(x(a0));
  for (std::size_t k = 0; k < profile.steps(); ++k) {
    plant::step_into(model, x, u_tilde, profile.command_at(k), next);
    x.swap(next);
    out.push_back(x(a0));
  }
  return out;
}

}  // namespace platoon::reachability
