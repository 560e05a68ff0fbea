#include "platoon/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "platoon/errors.hpp"

namespace platoon::config {

using nlohmann::json;
using scenario::Unit;
using scenario::convert_units;

namespace {

/// Reads one JSON object, remembering which keys were consumed so leftovers
/// can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "must be an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  bool has(const std::string& k) const { return j_.contains(k); }

  const json& raw(const std::string& k) {
    seen_.insert(k);
    return j_.at(k);
  }

  double number(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number()) throw ConfigError(key(k), "must be a number");
    return v.get<double>();
  }

  std::uint64_t count(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(key(k), "must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string text(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_string()) throw ConfigError(key(k), "must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_array()) throw ConfigError(key(k), "must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(key(k), "must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::uint64_t> counts(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_array()) throw ConfigError(key(k), "must be an array of integers");
    std::vector<std::uint64_t> out;
    for (const auto& e : v) {
      if (!e.is_number_integer() || e.get<std::int64_t>() < 0) {
        throw ConfigError(key(k), "must be an array of non-negative integers");
      }
      out.push_back(e.get<std::uint64_t>());
    }
    return out;
  }

  Section child(const std::string& k) {
    seen_.insert(k);
    return Section(j_.at(k), key(k));
  }

  /// Value given under exactly one of several unit-suffixed keys, converted
  /// to the canonical unit. Returns nullopt if none is present.
  struct Variant {
    const char* name;
    Unit unit;
  };
  std::optional<double> unit_value(std::initializer_list<Variant> variants, Unit canonical) {
    std::optional<double> out;
    const char* found = nullptr;
    for (const Variant& v : variants) {
      if (!has(v.name)) continue;
      if (found) {
        throw ConfigError(key(v.name), std::string("conflicts with ") + key(found));
      }
      found = v.name;
      out = convert_units(number(v.name), v.unit, canonical);
    }
    return out;
  }

  std::vector<double> unit_list(std::initializer_list<Variant> variants, Unit canonical,
                                std::vector<double> fallback) {
    const char* found = nullptr;
    for (const Variant& v : variants) {
      if (!has(v.name)) continue;
      if (found) throw ConfigError(key(v.name), std::string("conflicts with ") + key(found));
      found = v.name;
      fallback = numbers(v.name);
      for (double& x : fallback) x = convert_units(x, v.unit, canonical);
    }
    return fallback;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

stability::Mode parse_mode(const std::string& s, const std::string& key) {
  if (s == "acc") return stability::Mode::acc;
  if (s == "cacc") return stability::Mode::cacc;
  throw ConfigError(key, "expected \"acc\" or \"cacc\"");
}

const char* mode_name(stability::Mode m) { return m == stability::Mode::acc ? "acc" : "cacc"; }

channel::JamPolicy parse_policy(const std::string& s, const std::string& key) {
  if (s == "always_on") return channel::JamPolicy::always_on;
  if (s == "off") return channel::JamPolicy::off;
  if (s == "decel_triggered") return channel::JamPolicy::decel_triggered;
  throw ConfigError(key, "expected always_on, off or decel_triggered");
}

const char* policy_name(channel::JamPolicy p) {
  switch (p) {
    case channel::JamPolicy::always_on:
      return "always_on";
    case channel::JamPolicy::off:
      return "off";
    case channel::JamPolicy::decel_triggered:
      return "decel_triggered";
  }
  return "?";
}

stability::DeliveryOverride parse_delivery(const std::string& s, const std::string& key) {
  if (s == "none") return stability::DeliveryOverride::none;
  if (s == "always") return stability::DeliveryOverride::always;
  if (s == "never") return stability::DeliveryOverride::never;
  throw ConfigError(key, "expected none, always or never");
}

const char* delivery_name(stability::DeliveryOverride d) {
  switch (d) {
    case stability::DeliveryOverride::none:
      return "none";
    case stability::DeliveryOverride::always:
      return "always";
    case stability::DeliveryOverride::never:
      return "never";
  }
  return "?";
}

void parse_string(Section s, plant::StringConfig& out) {
  if (s.has("n")) out.n = s.count("n");
  if (s.has("eta_s")) out.params.eta = s.number("eta_s");
  if (s.has("kp_per_s2")) out.params.kp = s.number("kp_per_s2");
  if (s.has("kd_per_s")) out.params.kd = s.number("kd_per_s");
  if (s.has("hd_s")) out.params.hd = s.number("hd_s");
  if (s.has("sample_interval_s")) out.sample_interval = s.number("sample_interval_s");
  if (auto v = s.unit_value({{"initial_velocity_mps", Unit::mps}, {"initial_velocity_mph", Unit::mph}},
                            Unit::mps)) {
    out.initial_velocity = *v;
  }
  if (s.has("initial_gap_m")) {
    out.initial_gap = s.number("initial_gap_m");
    if (!(out.initial_gap > 0.0)) throw ConfigError(s.key("initial_gap_m"), "must be positive");
  }
  s.finish();
}

void parse_channel(Section s, channel::ChannelParams& out) {
  if (s.has("f0_hz")) out.f0 = s.number("f0_hz");
  if (auto v = s.unit_value({{"gt_linear", Unit::linear}, {"gt_dbi", Unit::dbi}}, Unit::linear)) out.gt = *v;
  if (auto v = s.unit_value({{"gr_linear", Unit::linear}, {"gr_dbi", Unit::dbi}}, Unit::linear)) out.gr = *v;
  if (s.has("alpha")) out.alpha = s.number("alpha");
  if (auto v = s.unit_value({{"n0_w", Unit::watt}, {"n0_dbm", Unit::dbm}}, Unit::watt)) out.n0 = *v;
  if (s.has("k_factor")) out.k_factor = s.number("k_factor");
  if (auto v = s.unit_value({{"gamma_th_linear", Unit::linear}, {"gamma_th_db", Unit::db}}, Unit::linear)) {
    out.gamma_th = *v;
  }
  if (auto v = s.unit_value({{"pt_w", Unit::watt}, {"pt_dbm", Unit::dbm}}, Unit::watt)) out.pt = *v;
  s.finish();
}

void parse_jammer(Section s, channel::JammerParams& out) {
  if (s.has("mu_sqrt_w")) out.mu = s.number("mu_sqrt_w");
  if (s.has("sigma_sqrt_w")) out.sigma = s.number("sigma_sqrt_w");
  if (auto v = s.unit_value({{"gj_linear", Unit::linear}, {"gj_dbi", Unit::dbi}}, Unit::linear)) out.gj = *v;
  if (s.has("altitude_m")) out.altitude = s.number("altitude_m");
  if (s.has("position")) out.position = s.count("position");
  if (s.has("policy")) out.policy = parse_policy(s.text("policy"), s.key("policy"));
  if (s.has("targets")) {
    const json& t = s.raw("targets");
    if (t.is_string() && t.get<std::string>() == "all") {
      out.targets.reset();
    } else if (t.is_array()) {
      std::vector<std::size_t> links;
      for (const auto& e : t) {
        if (!e.is_number_integer() || e.get<std::int64_t>() < 1) {
          throw ConfigError(s.key("targets"), "links must be positive integers");
        }
        links.push_back(e.get<std::size_t>());
      }
      out.targets = links;
    } else {
      throw ConfigError(s.key("targets"), "expected \"all\" or an array of link indices");
    }
  }
  s.finish();
}

void parse_profile(Section s, ProfileConfig& out, const std::filesystem::path& base_dir) {
  if (s.has("kind")) {
    const std::string kind = s.text("kind");
    if (kind == "multisine") {
      out.kind = ProfileKind::multisine;
    } else if (kind == "piecewise") {
      out.kind = ProfileKind::piecewise;
    } else if (kind == "csv") {
      out.kind = ProfileKind::csv;
    } else {
      throw ConfigError(s.key("kind"), "expected multisine, piecewise or csv");
    }
  }
  if (s.has("n_components")) out.multisine.n_components = s.count("n_components");
  if (s.has("f_lo_hz")) out.multisine.f_lo = s.number("f_lo_hz");
  if (s.has("f_hi_hz")) out.multisine.f_hi = s.number("f_hi_hz");
  if (s.has("a_max_mps2")) out.multisine.a_max = s.number("a_max_mps2");
  if (s.has("breakpoints_s_mps2")) {
    const json& b = s.raw("breakpoints_s_mps2");
    if (!b.is_array() || b.empty()) {
      throw ConfigError(s.key("breakpoints_s_mps2"), "expected a non-empty array of [t, u] pairs");
    }
    out.breakpoints.clear();
    for (const auto& e : b) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ConfigError(s.key("breakpoints_s_mps2"), "each entry must be [t_s, u_mps2]");
      }
      out.breakpoints.push_back({e[0].get<double>(), e[1].get<double>()});
    }
  }
  if (s.has("csv_path")) {
    std::filesystem::path p = s.text("csv_path");
    out.csv_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  s.finish();
}

void parse_mc(Section s, McConfig& out) {
  if (s.has("profiles")) out.profiles = s.count("profiles");
  if (s.has("runs")) out.runs = s.count("runs");
  if (s.has("horizon_s")) out.horizon = s.number("horizon_s");
  if (!s.has("seed")) throw ConfigError(s.key("seed"), "is required");
  out.seed = s.count("seed");
  s.finish();
}

void parse_experiment(Section s, ExperimentKnobs& out) {
  if (s.has("modes")) {
    const json& m = s.raw("modes");
    if (!m.is_array() || m.empty()) throw ConfigError(s.key("modes"), "expected a non-empty array");
    out.modes.clear();
    for (const auto& e : m) {
      if (!e.is_string()) throw ConfigError(s.key("modes"), "entries must be strings");
      out.modes.push_back(parse_mode(e.get<std::string>(), s.key("modes")));
    }
  }
  if (s.has("mode")) out.mode = parse_mode(s.text("mode"), s.key("mode"));
  if (s.has("delivery")) out.delivery = parse_delivery(s.text("delivery"), s.key("delivery"));
  if (s.has("gamma_hd_s")) out.gamma_hd = s.numbers("gamma_hd_s");
  if (s.has("gamma_points")) out.gamma_points = s.count("gamma_points");
  if (s.has("headway_tol_s")) out.headway_tol = s.number("headway_tol_s");
  if (s.has("positions")) {
    out.positions.clear();
    for (auto v : s.counts("positions")) out.positions.push_back(v);
  }
  if (s.has("power_hd_s")) out.power_hd = s.numbers("power_hd_s");
  out.pj_grid = s.unit_list({{"pj_grid_w", Unit::watt}, {"pj_grid_dbm", Unit::dbm}}, Unit::watt,
                            out.pj_grid);
  out.pt_grid = s.unit_list({{"pt_grid_w", Unit::watt}, {"pt_grid_dbm", Unit::dbm}}, Unit::watt,
                            out.pt_grid);
  if (s.has("reach_scenarios")) {
    out.reach_scenarios.clear();
    for (auto v : s.counts("reach_scenarios")) out.reach_scenarios.push_back(static_cast<int>(v));
  }
  if (s.has("envelope_slack_m")) out.envelope_slack = s.number("envelope_slack_m");
  if (s.has("saved_trajectories")) out.saved_trajectories = s.count("saved_trajectories");
  s.finish();
}

template <typename F>
void guarded(const std::string& key, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

stability::Scenario ExperimentConfig::scenario() const {
  stability::Scenario sc;
  sc.string = string;
  sc.channel = channel;
  sc.jammer = jammer;
  sc.mode = experiment.mode;
  sc.delivery = experiment.delivery;
  return sc;
}

void ExperimentConfig::validate() const {
  // Name the offending gain rather than the whole section where possible.
  const plant::VehicleParams& p = string.params;
  for (const auto& [value, key] : {std::pair{p.eta, "string.eta_s"}, std::pair{p.kp, "string.kp_per_s2"},
                                   std::pair{p.kd, "string.kd_per_s"}, std::pair{p.hd, "string.hd_s"}}) {
    if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError(key, "must be positive and finite");
  }
  guarded("string.kd_per_s", [&] { p.validate(); });
  guarded("string", [&] { string.validate(); });
  guarded("channel", [&] { channel.validate(); });
  guarded("jammer", [&] { jammer.validate(string.n); });
  guarded("mc", [&] { mc.spec().validate(); });
  guarded("profile", [&] {
    if (profile.kind == ProfileKind::multisine) profile.multisine.validate(string.sample_interval);
    if (profile.kind == ProfileKind::csv && profile.csv_path.empty()) {
      throw DomainError("csv_path is required for kind csv");
    }
    if (profile.kind == ProfileKind::csv && !std::filesystem::exists(profile.csv_path)) {
      throw DomainError("csv_path does not exist: " + profile.csv_path.string());
    }
    for (std::size_t i = 1; i < profile.breakpoints.size(); ++i) {
      if (!(profile.breakpoints[i].t > profile.breakpoints[i - 1].t)) {
        throw DomainError("breakpoint times must increase");
      }
    }
  });
  guarded("experiment", [&] {
    if (!(experiment.headway_tol > 0.0)) throw DomainError("headway_tol_s must be positive");
    if (experiment.gamma_points < 2) throw DomainError("gamma_points must be at least 2");
    for (double hd : experiment.gamma_hd) {
      if (!(hd > 0.0)) throw DomainError("gamma_hd_s entries must be positive");
    }
    for (double hd : experiment.power_hd) {
      if (!(hd > 0.0)) throw DomainError("power_hd_s entries must be positive");
    }
    for (std::size_t j : experiment.positions) {
      if (j < 1 || j > string.n) throw DomainError("positions must lie in [1, n]");
    }
    for (int s : experiment.reach_scenarios) {
      if (s < 1 || s > 3) throw DomainError("reach_scenarios entries must be 1, 2 or 3");
    }
    if (!(experiment.envelope_slack >= 0.0)) throw DomainError("envelope_slack_m must be >= 0");
    auto ascending = [](const std::vector<double>& g, const char* name) {
      if (g.empty()) throw DomainError(std::string(name) + " must not be empty");
      for (std::size_t i = 1; i < g.size(); ++i) {
        if (!(g[i] > g[i - 1])) throw DomainError(std::string(name) + " must be ascending");
      }
    };
    ascending(experiment.power_hd, "power_hd_s");
    ascending(experiment.pj_grid, "pj_grid");
    ascending(experiment.pt_grid, "pt_grid");
    for (double p : experiment.pt_grid) {
      if (!(p > 0.0)) throw DomainError("pt_grid entries must be positive");
    }
  });
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Section top(root, "");
  guarded("", [&] {
    if (top.has("string")) parse_string(top.child("string"), cfg.string);
    if (top.has("channel")) parse_channel(top.child("channel"), cfg.channel);
    if (top.has("jammer")) parse_jammer(top.child("jammer"), cfg.jammer);
    if (top.has("profile")) parse_profile(top.child("profile"), cfg.profile, base_dir);
    if (!top.has("mc")) throw ConfigError("mc.seed", "is required");
    parse_mc(top.child("mc"), cfg.mc);
    if (top.has("experiment")) parse_experiment(top.child("experiment"), cfg.experiment);
    if (top.has("output_dir")) cfg.output_dir = top.text("output_dir");
    top.finish();
  });
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  const auto& s = cfg.string;
  j["string"] = {{"n", s.n},
                 {"eta_s", s.params.eta},
                 {"kp_per_s2", s.params.kp},
                 {"kd_per_s", s.params.kd},
                 {"hd_s", s.params.hd},
                 {"sample_interval_s", s.sample_interval},
                 {"initial_velocity_mps", s.initial_velocity}};
  if (s.initial_gap > 0.0) j["string"]["initial_gap_m"] = s.initial_gap;

  const auto& c = cfg.channel;
  j["channel"] = {{"f0_hz", c.f0},         {"gt_linear", c.gt},
                  {"gr_linear", c.gr},     {"alpha", c.alpha},
                  {"n0_w", c.n0},          {"k_factor", c.k_factor},
                  {"gamma_th_linear", c.gamma_th}, {"pt_w", c.pt}};

  const auto& jm = cfg.jammer;
  j["jammer"] = {{"mu_sqrt_w", jm.mu},       {"sigma_sqrt_w", jm.sigma},
                 {"gj_linear", jm.gj},        {"altitude_m", jm.altitude},
                 {"position", jm.position},   {"policy", policy_name(jm.policy)}};
  if (jm.targets) {
    j["jammer"]["targets"] = *jm.targets;
  } else {
    j["jammer"]["targets"] = "all";
  }

  const auto& p = cfg.profile;
  json bps = json::array();
  for (const auto& b : p.breakpoints) bps.push_back({b.t, b.u});
  j["profile"] = {{"kind", p.kind == ProfileKind::multisine   ? "multisine"
                           : p.kind == ProfileKind::piecewise ? "piecewise"
                                                              : "csv"},
                  {"n_components", p.multisine.n_components},
                  {"f_lo_hz", p.multisine.f_lo},
                  {"f_hi_hz", p.multisine.f_hi},
                  {"a_max_mps2", p.multisine.a_max},
                  {"breakpoints_s_mps2", bps}};
  if (!p.csv_path.empty()) j["profile"]["csv_path"] = p.csv_path.string();

  j["mc"] = {{"profiles", cfg.mc.profiles},
             {"runs", cfg.mc.runs},
             {"horizon_s", cfg.mc.horizon},
             {"seed", cfg.mc.seed}};

  const auto& e = cfg.experiment;
  json modes = json::array();
  for (auto m : e.modes) modes.push_back(mode_name(m));
  j["experiment"] = {{"modes", modes},
                     {"mode", mode_name(e.mode)},
                     {"delivery", delivery_name(e.delivery)},
                     {"gamma_hd_s", e.gamma_hd},
                     {"gamma_points", e.gamma_points},
                     {"headway_tol_s", e.headway_tol},
                     {"positions", e.positions},
                     {"power_hd_s", e.power_hd},
                     {"pj_grid_w", e.pj_grid},
                     {"pt_grid_w", e.pt_grid},
                     {"reach_scenarios", e.reach_scenarios},
                     {"envelope_slack_m", e.envelope_slack},
                     {"saved_trajectories", e.saved_trajectories}};
  j["output_dir"] = cfg.output_dir.string();
  return j.dump(2) + "\n";
}

void apply_scale(McConfig& mc, Scale scale) {
  if (scale == Scale::desk) {
    mc.profiles = 20;
    mc.runs = 200;
    mc.horizon = 100.0;
  } else {
    mc.profiles = 1000;
    mc.runs = 10000;
    mc.horizon = 500.0;
  }
}

}  // namespace platoon::config
