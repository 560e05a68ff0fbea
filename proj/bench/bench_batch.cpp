// Serial reference path vs OpenMP batch kernel on the same Monte-Carlo block.

#include <benchmark/benchmark.h>

#include "platoon/reachability.hpp"
#include "platoon/stability.hpp"

using namespace platoon;

namespace {

struct Fixture {
  stability::Scenario sc;
  plant::DiscreteModel model;
  stability::McSpec mc{4, 16, 50.0, 20240601};
  std::vector<scenario::AccelProfile> profiles;

  Fixture() : model(plant::discretize(sc.string)) {
    profiles = stability::make_profiles(stability::ProfileSource{}, mc, sc.string.sample_interval);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_batch_serial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    auto runs = stability::run_batch(f.model, f.sc, f.profiles, f.mc, {false, 1});
    benchmark::DoNotOptimize(runs.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.mc.profiles * f.mc.runs));
}

void BM_batch_openmp(benchmark::State& state) {
  const Fixture& f = fixture();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto runs = stability::run_batch(f.model, f.sc, f.profiles, f.mc, {true, threads});
    benchmark::DoNotOptimize(runs.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.mc.profiles * f.mc.runs));
}

void BM_envelope_check(benchmark::State& state) {
  const Fixture& f = fixture();
  const bool parallel = state.range(0) != 0;
  const auto profile = scenario::piecewise_profile(scenario::default_reach_breakpoints(), 50.0, 0.1);
  const auto env = reachability::bound_trajectories(f.model, f.sc.string, profile);
  const std::vector<scenario::AccelProfile> one{profile};
  const stability::McSpec mc{1, 64, 50.0, 7};
  const auto runs = stability::run_batch(f.model, f.sc, one, mc, {}, stability::RecordLevel::traces);
  for (auto _ : state) {
    auto rep = reachability::envelope_check(runs, env, 1e-6, {parallel, 0});
    benchmark::DoNotOptimize(rep.violations);
  }
}

}  // namespace

// Wall clock: CPU time only sees the calling thread.
BENCHMARK(BM_batch_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_batch_openmp)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_envelope_check)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
