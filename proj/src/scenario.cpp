#include "platoon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "platoon/csv.hpp"
#include "platoon/errors.hpp"
#include "platoon/rng.hpp"

namespace platoon::scenario {

void MultiSineSpec::validate(double h) const {
  if (n_components < 1) throw DomainError("multisine: need at least one tone");
  if (!(f_lo > 0.0) || !(f_lo < f_hi)) throw DomainError("multisine: need 0 < f_lo < f_hi");
  if (!(f_hi <= 1.0 / (2.0 * h))) throw DomainError("multisine: f_hi exceeds the Nyquist rate 1/(2h)");
  if (!(a_max >= 0.0) || !std::isfinite(a_max)) throw DomainError("multisine: a_max must be >= 0");
}

std::size_t sample_count(double duration, double h) {
  if (!(h > 0.0)) throw DomainError("profile: h must be positive");
  if (!(duration > 0.0)) throw DomainError("profile: duration must be positive");
  // Tolerate representation error such as 100 / 0.1 landing just above 1000.
  return static_cast<std::size_t>(std::ceil(duration / h - 1e-9));
}

plant::LeadCommand AccelProfile::command_at(std::size_t k) const {
  const double now = samples.at(k);
  const double next = k + 1 < samples.size() ? samples[k + 1] : now;
  return {now, next};
}

AccelProfile multisine_profile(const MultiSineSpec& spec, double duration, double h,
                               std::span<const double> phases) {
  spec.validate(h);
  if (phases.size() != spec.n_components) {
    throw DomainError("multisine: need one phase per tone");
  }
  const std::size_t count = sample_count(duration, h);
  const std::size_t tones = spec.n_components;

  std::vector<double> freqs(tones);
  for (std::size_t m = 0; m < tones; ++m) {
    freqs[m] = tones == 1 ? spec.f_lo
                          : spec.f_lo + (spec.f_hi - spec.f_lo) * static_cast<double>(m) /
                                            static_cast<double>(tones - 1);
  }

  AccelProfile out;
  out.h = h;
  out.duration = duration;
  out.samples.assign(count, 0.0);
  double peak = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * h;
    double u = 0.0;
    for (std::size_t m = 0; m < tones; ++m) {
      u += std::cos(2.0 * std::numbers::pi * freqs[m] * t + phases[m]);
    }
    out.samples[k] = u;
    peak = std::max(peak, std::fabs(u));
  }
  const double scale = (peak > 0.0 && spec.a_max > 0.0) ? spec.a_max / peak : 0.0;
  for (double& u : out.samples) u *= scale;
  // Rounding can leave the peak an ulp off; pin it to exactly ±a_max.
  if (scale > 0.0) {
    std::size_t arg = 0;
    for (std::size_t k = 0; k < count; ++k) {
      double& u = out.samples[k];
      if (std::fabs(u) > spec.a_max) u = std::copysign(spec.a_max, u);
      if (std::fabs(u) > std::fabs(out.samples[arg])) arg = k;
    }
    out.samples[arg] = std::copysign(spec.a_max, out.samples[arg]);
  }

  std::ostringstream desc;
  desc << "multisine tones=" << tones << " f=[" << spec.f_lo << "," << spec.f_hi
       << "] a_max=" << spec.a_max;
  out.description = desc.str();
  return out;
}

AccelProfile multisine_profile(const MultiSineSpec& spec, double duration, double h,
                               std::uint64_t seed) {
  spec.validate(h);
  RngStream rng(derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::profile)}));
  std::vector<double> phases(spec.n_components);
  for (double& ph : phases) ph = 2.0 * std::numbers::pi * rng.uniform();
  AccelProfile out = multisine_profile(spec, duration, h, phases);
  out.seed = seed;
  return out;
}

AccelProfile piecewise_profile(std::span<const Breakpoint> knots, double duration, double h) {
  if (knots.empty()) throw DomainError("piecewise profile: no breakpoints");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].t > knots[i - 1].t)) {
      throw DomainError("piecewise profile: breakpoint times must increase");
    }
  }
  const std::size_t count = sample_count(duration, h);
  AccelProfile out;
  out.h = h;
  out.duration = duration;
  out.samples.resize(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * h;
    while (seg + 1 < knots.size() && knots[seg + 1].t <= t) ++seg;
    double u;
    if (t <= knots.front().t) {
      u = knots.front().u;
    } else if (seg + 1 >= knots.size()) {
      u = knots.back().u;
    } else {
      const Breakpoint& a = knots[seg];
      const Breakpoint& b = knots[seg + 1];
      u = a.u + (b.u - a.u) * (t - a.t) / (b.t - a.t);
    }
    out.samples[k] = u;
  }
  out.description = "piecewise knots=" + std::to_string(knots.size());
  return out;
}

std::vector<Breakpoint> default_reach_breakpoints() {
  return {{0.0, 2.70},  {5.0, 2.70},  {8.0, -2.0}, {20.0, -2.0},
          {23.0, 1.0},  {40.0, 1.0},  {43.0, 0.0}, {100.0, 0.0}};
}

bool jam_active(channel::JamPolicy policy, double /*u_l_now*/, double lead_accel) {
  switch (policy) {
    case channel::JamPolicy::always_on:
      return true;
    case channel::JamPolicy::off:
      return false;
    case channel::JamPolicy::decel_triggered:
      return lead_accel < 0.0;
  }
  return false;
}

namespace {

constexpr double kMphToMps = 0.44704;

}  // namespace

double convert_units(double value, Unit from, Unit to) {
  if (from == to) return value;
  switch (from) {
    case Unit::mph:
      if (to == Unit::mps) return value * kMphToMps;
      break;
    case Unit::mps:
      if (to == Unit::mph) return value / kMphToMps;
      break;
    case Unit::dbm:
      if (to == Unit::watt) return std::pow(10.0, value / 10.0) * 1e-3;
      break;
    case Unit::watt:
      if (to == Unit::dbm) {
        if (!(value > 0.0)) throw DomainError("convert_units: power must be positive for dBm");
        return 10.0 * std::log10(value * 1e3);
      }
      break;
    case Unit::dbi:
    case Unit::db:
      if (to == Unit::linear) return std::pow(10.0, value / 10.0);
      break;
    case Unit::linear:
      if (to == Unit::dbi || to == Unit::db) {
        if (!(value > 0.0)) throw DomainError("convert_units: ratio must be positive for dB");
        return 10.0 * std::log10(value);
      }
      break;
  }
  throw DomainError("convert_units: unsupported unit pair");
}

void write_profile_csv(const AccelProfile& profile, const std::filesystem::path& path) {
  CsvWriter csv(path, {"k", "t_s", "u_l_mps2"});
  for (std::size_t k = 0; k < profile.samples.size(); ++k) {
    csv.row(k, static_cast<double>(k) * profile.h, profile.samples[k]);
  }
}

AccelProfile read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open profile CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "k,t_s,u_l_mps2") {
    throw DomainError("profile CSV must start with header k,t_s,u_l_mps2");
  }
  AccelProfile out;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string k_s, t_s, u_s;
    if (!std::getline(row, k_s, ',') || !std::getline(row, t_s, ',') || !std::getline(row, u_s)) {
      throw DomainError("malformed profile CSV row: " + line);
    }
    if (std::stoul(k_s) != out.samples.size()) {
      throw DomainError("profile CSV rows must be consecutive from k=0");
    }
    times.push_back(std::stod(t_s));
    out.samples.push_back(std::stod(u_s));
  }
  if (out.samples.size() < 2) throw DomainError("profile CSV needs at least two rows");
  out.h = times[1] - times[0];
  if (!(out.h > 0.0)) throw DomainError("profile CSV times must increase");
  out.duration = out.h * static_cast<double>(out.samples.size());
  out.description = "csv " + path.filename().string();
  return out;
}

}  // namespace platoon::scenario
