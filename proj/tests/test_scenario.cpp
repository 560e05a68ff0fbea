#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "platoon/errors.hpp"
#include "platoon/plant.hpp"
#include "platoon/reachability.hpp"
#include "platoon/scenario.hpp"
#include "platoon/stability.hpp"

using namespace platoon;
using namespace platoon::scenario;

TEST_CASE("sample count and command lookup") {
  CHECK(sample_count(100.0, 0.1) == 1000);
  CHECK(sample_count(0.25, 0.1) == 3);
  const AccelProfile p = piecewise_profile(std::vector<Breakpoint>{{0.0, 1.0}, {1.0, 2.0}}, 0.3, 0.1);
  CHECK(p.steps() == 3);
  CHECK(p.command_at(0).now == 1.0);
  CHECK(p.command_at(0).next == doctest::Approx(1.1));
  CHECK(p.command_at(2).next == p.command_at(2).now);
}

TEST_CASE("multisine basics") {
  MultiSineSpec spec;
  spec.a_max = 0.0;
  const AccelProfile zero = multisine_profile(spec, 10.0, 0.1, std::uint64_t{3});
  for (double u : zero.samples) CHECK(u == 0.0);

  MultiSineSpec one;
  one.n_components = 1;
  one.f_lo = 0.2;
  one.f_hi = 0.4;
  one.a_max = 1.5;
  const std::vector<double> phase{0.0};
  const AccelProfile tone = multisine_profile(one, 20.0, 0.1, phase);
  for (std::size_t k = 0; k < tone.steps(); ++k) {
    const double ref = 1.5 * std::cos(2 * std::numbers::pi * 0.2 * 0.1 * static_cast<double>(k));
    CHECK(tone.samples[k] == doctest::Approx(ref).epsilon(1e-12));
  }

  const AccelProfile a = multisine_profile(MultiSineSpec{}, 100.0, 0.1, std::uint64_t{77});
  const AccelProfile b = multisine_profile(MultiSineSpec{}, 100.0, 0.1, std::uint64_t{77});
  CHECK(a.samples == b.samples);
  const AccelProfile c = multisine_profile(MultiSineSpec{}, 100.0, 0.1, std::uint64_t{78});
  CHECK(a.samples != c.samples);

  MultiSineSpec fast;
  fast.f_hi = 6.0;
  CHECK_THROWS_AS(multisine_profile(fast, 10.0, 0.1, std::uint64_t{1}), DomainError);
}

TEST_CASE("property: multisine normalization and zero mean over seeds") {
  const MultiSineSpec spec;
  double grand = 0.0;
  constexpr int kSeeds = 200;
  for (int s = 0; s < kSeeds; ++s) {
    const AccelProfile p = multisine_profile(spec, 100.0, 0.1, static_cast<std::uint64_t>(s) * 7919 + 1);
    double peak = 0.0, sum = 0.0;
    for (double u : p.samples) {
      peak = std::max(peak, std::fabs(u));
      sum += u;
    }
    REQUIRE(peak == spec.a_max);
    grand += sum / static_cast<double>(p.steps());
  }
  const double mean = grand / kSeeds;
  CHECK(std::fabs(mean) <= 2 * spec.a_max / std::sqrt(static_cast<double>(spec.n_components) * 1000.0));
}

TEST_CASE("piecewise profile and default breakpoints") {
  const auto knots = default_reach_breakpoints();
  const AccelProfile p = piecewise_profile(knots, 100.0, 0.1);
  CHECK(p.samples.front() == doctest::Approx(2.7));
  CHECK(p.samples[100] == doctest::Approx(-2.0));  // t = 10 s
  CHECK(p.samples[65] == doctest::Approx(2.7 + (-4.7) * 1.5 / 3.0));       // t = 6.5 s
  CHECK(p.samples.back() == 0.0);
  CHECK_THROWS_AS(piecewise_profile(std::vector<Breakpoint>{{1, 0}, {1, 1}}, 5.0, 0.1), DomainError);
  CHECK_THROWS_AS(piecewise_profile(std::vector<Breakpoint>{}, 5.0, 0.1), DomainError);
}

TEST_CASE("jam policies") {
  using channel::JamPolicy;
  CHECK(jam_active(JamPolicy::always_on, 0.0, 5.0));
  CHECK_FALSE(jam_active(JamPolicy::off, -3.0, -3.0));
  CHECK(jam_active(JamPolicy::decel_triggered, 9.0, -1.2));
  CHECK_FALSE(jam_active(JamPolicy::decel_triggered, -9.0, 0.5));
}

TEST_CASE("property: decel trigger reads only the lead acceleration") {
  oracle::Gen gen(41);
  for (int t = 0; t < 1000; ++t) {
    const double a0 = gen.uniform(-3, 3);
    const bool ref = a0 < 0.0;
    REQUIRE(jam_active(channel::JamPolicy::decel_triggered, gen.uniform(-5, 5), a0) == ref);
  }
}

TEST_CASE("decel-triggered jammer is active exactly on negative lead acceleration") {
  plant::StringConfig cfg;
  const plant::DiscreteModel model = plant::discretize(cfg);
  const AccelProfile profile = piecewise_profile(default_reach_breakpoints(), 60.0, 0.1);
  stability::Scenario sc;
  sc.jammer.policy = channel::JamPolicy::decel_triggered;
  const auto rec = stability::run_trajectory(model, sc, profile, 5, stability::RecordLevel::full);
  const auto a0 = reachability::lead_accel_trace(model, cfg, profile);
  std::size_t active = 0, negative = 0;
  for (std::size_t k = 0; k < rec.steps; ++k) {
    REQUIRE((rec.jam_on[k] != 0) == (a0[k] < 0.0));
    active += rec.jam_on[k];
    negative += a0[k] < 0.0 ? 1 : 0;
  }
  CHECK(active == negative);
  CHECK(active > 0);
}

TEST_CASE("unit conversion") {
  CHECK(convert_units(40.0, Unit::mph, Unit::mps) == doctest::Approx(17.8816).epsilon(1e-12));
  CHECK(convert_units(28.0, Unit::dbm, Unit::watt) == doctest::Approx(0.630957).epsilon(1e-6));
  CHECK(convert_units(18.0, Unit::db, Unit::linear) == doctest::Approx(63.0957).epsilon(1e-6));
  CHECK(convert_units(12.0, Unit::dbi, Unit::linear) == doctest::Approx(15.848931924611133));
  CHECK(convert_units(convert_units(-24.0, Unit::dbm, Unit::watt), Unit::watt, Unit::dbm) ==
        doctest::Approx(-24.0).epsilon(1e-12));
  CHECK_THROWS_AS(convert_units(1.0, Unit::mph, Unit::watt), DomainError);
  CHECK_THROWS_AS(convert_units(0.0, Unit::watt, Unit::dbm), DomainError);
}

TEST_CASE("profile CSV round trip") {
  const auto path = std::filesystem::temp_directory_path() / "platoon_profile_roundtrip.csv";
  const AccelProfile p = multisine_profile(MultiSineSpec{}, 12.0, 0.1, std::uint64_t{9});
  write_profile_csv(p, path);
  const AccelProfile q = read_profile_csv(path);
  CHECK(q.samples == p.samples);  // shortest round-trip formatting
  CHECK(q.h == doctest::Approx(0.1));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_profile_csv(path), DomainError);
}
