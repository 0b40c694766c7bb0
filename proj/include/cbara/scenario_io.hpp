#pragma once

#include "cbara/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef CBARA_DATA_DIR
#define CBARA_DATA_DIR "data"
#endif

namespace cbara {

/// Scenario files are INI-style text: `[system]` and `[radio]` once each,
/// then one `[bs]` block per base station and one `[object]` block per
/// target or ISAC user, in index order. `#` and `;` start comments.
struct IniSection {
  std::string name;
  int line = 0;
  std::vector<std::pair<std::string, std::string>> entries;
};

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<IniSection> parse_ini(std::istream& in, const std::string& origin) {
  std::vector<IniSection> sections;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto cut = raw.find_first_of("#;");
    std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      sections.push_back({trim(line.substr(1, line.size() - 2)), lineno, {}});
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    if (sections.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside of any section");
    sections.back().entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return sections;
}

namespace detail {

class SectionReader {
 public:
  SectionReader(const IniSection& section, std::string origin)
      : section_(section), origin_(std::move(origin)) {
    for (const auto& [k, v] : section.entries) {
      if (!values_.emplace(k, v).second) fail(k, "duplicate key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ConfigError(origin_ + ": [" + section_.name + "] (line " + std::to_string(section_.line) +
                      ") field '" + key + "': " + why);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    auto it = values_.find(key);
    used_.insert(key);
    if (it == values_.end()) {
      if (fallback) return *fallback;
      fail(key, "missing required field");
    }
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) fail(key, "trailing characters in '" + it->second + "'");
      if (!std::isfinite(v)) fail(key, "value must be finite");
      return v;
    } catch (const std::logic_error&) {
      fail(key, "not a number: '" + it->second + "'");
    }
  }

  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
    double v = number(key, fallback ? std::optional<double>(*fallback) : std::nullopt);
    if (v != std::floor(v)) fail(key, "must be an integer");
    return static_cast<int>(v);
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    auto it = values_.find(key);
    used_.insert(key);
    if (it == values_.end()) {
      if (fallback) return *fallback;
      fail(key, "missing required field");
    }
    return it->second;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : values_) {
      if (!used_.count(k)) fail(k, "unknown field");
    }
  }

 private:
  const IniSection& section_;
  std::string origin_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

}  // namespace detail

inline double dbm_per_hz_to_w_per_hz(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double w_per_hz_to_dbm_per_hz(double w) { return 10.0 * std::log10(w) + 30.0; }

inline ScenarioConfig parse_scenario(std::istream& in, const std::string& origin) {
  const auto sections = parse_ini(in, origin);
  ScenarioConfig cfg;
  std::filesystem::path p(origin);
  cfg.name = p.stem().string();
  int system_seen = 0;
  int radio_seen = 0;
  for (const auto& section : sections) {
    detail::SectionReader r(section, origin);
    if (section.name == "system") {
      ++system_seen;
      cfg.K = r.integer("K");
      cfg.Q = r.integer("Q");
      cfg.I = r.integer("I");
      cfg.T_s = r.number("T_s");
      cfg.N = r.integer("N");
      cfg.P_total = r.number("P_total_w");
      cfg.B_total = r.number("B_total_hz");
      cfg.eta = r.number("eta");
      cfg.delta_t = r.number("delta_t", 1.0);
      cfg.phi = r.number("phi", 0.1);
      cfg.L_min = r.integer("L_min");
      cfg.L_max = r.integer("L_max");
      cfg.p_bounds = {r.number("p_frac_min", 0.05), r.number("p_frac_max", 0.85)};
      cfg.b_bounds = {r.number("b_frac_min", 0.05), r.number("b_frac_max", 0.85)};
      cfg.ao_epsilon = r.number("ao_epsilon", 1e-4);
      double seed = r.number("seed", 1.0);
      if (seed < 0 || seed != std::floor(seed)) r.fail("seed", "must be a non-negative integer");
      cfg.seed = static_cast<std::uint64_t>(seed);
      cfg.trials = r.integer("trials", 50);
      cfg.init_sigma_pos = r.number("init_sigma_pos_m", 5.0);
      cfg.init_sigma_vel = r.number("init_sigma_vel_mps", 2.0);
      cfg.w_sensing = r.number("w_sensing", 1.0);
      cfg.w_comm = r.number("w_comm", 1e-6);
      cfg.exhaustive_cap = r.number("exhaustive_cap", 1e5);
      if (auto n = r.text("name", ""); !n.empty()) cfg.name = n;
    } else if (section.name == "radio") {
      ++radio_seen;
      cfg.f_c = r.number("f_c_hz");
      cfg.sigma_c2 = dbm_per_hz_to_w_per_hz(r.number("sigma_c2_dbm_per_hz", -145.0));
      cfg.sigma_r2 = r.number("sigma_r2_w");
      cfg.N_t = r.integer("N_t", 32);
      cfg.N_r = r.integer("N_r", 32);
      cfg.N_r_user = r.integer("N_r_user", 2);
      cfg.rcs = r.number("rcs_m2", 1.0);
      cfg.sensing_pathloss_c0 = r.number("sensing_pathloss_c0");
      cfg.beta = {r.number("beta1"), r.number("beta2"), r.number("beta3")};
    } else if (section.name == "bs") {
      cfg.bs_positions.push_back({r.number("x_m"), r.number("y_m")});
    } else if (section.name == "object") {
      ObjectState s;
      const std::string kind = r.text("kind");
      if (kind == "sensing_target" || kind == "target") {
        s.kind = ObjectKind::sensing_target;
      } else if (kind == "isac_user" || kind == "user") {
        s.kind = ObjectKind::isac_user;
      } else {
        r.fail("kind", "expected sensing_target or isac_user, got '" + kind + "'");
      }
      s.x = r.number("x_m");
      s.y = r.number("y_m");
      s.vx = r.number("vx_mps");
      s.vy = r.number("vy_mps");
      cfg.initial_states.push_back(s);
      cfg.sigma_m.push_back(r.number("sigma_m", 1.0));
    } else {
      throw ConfigError(origin + ": unknown section [" + section.name + "] at line " +
                        std::to_string(section.line));
    }
    r.reject_unknown();
  }
  if (system_seen != 1) throw ConfigError(origin + ": exactly one [system] section required");
  if (radio_seen != 1) throw ConfigError(origin + ": exactly one [radio] section required");
  cfg.validate();
  return cfg;
}

/// Resolves a scenario argument: an existing file path, or the stem of a
/// bundled fixture (e.g. "paper_fig2").
inline std::filesystem::path resolve_scenario_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::exists(name_or_path)) return name_or_path;
  for (const fs::path& dir : {fs::path(CBARA_DATA_DIR) / "scenarios", fs::path("data") / "scenarios"}) {
    for (const auto& candidate : {dir / name_or_path, dir / (name_or_path + ".ini")}) {
      if (fs::exists(candidate)) return candidate;
    }
  }
  throw ConfigError("scenario '" + name_or_path + "' not found (neither a file nor a bundled fixture)");
}

inline ScenarioConfig load_scenario(const std::string& name_or_path) {
  const auto path = resolve_scenario_path(name_or_path);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  return parse_scenario(in, path.string());
}

inline void write_scenario(std::ostream& out, const ScenarioConfig& c) {
  out.precision(17);
  out << "[system]\n"
      << "name = " << c.name << "\n"
      << "K = " << c.K << "\nQ = " << c.Q << "\nI = " << c.I << "\n"
      << "T_s = " << c.T_s << "\nN = " << c.N << "\n"
      << "P_total_w = " << c.P_total << "\nB_total_hz = " << c.B_total << "\n"
      << "eta = " << c.eta << "\ndelta_t = " << c.delta_t << "\nphi = " << c.phi << "\n"
      << "L_min = " << c.L_min << "\nL_max = " << c.L_max << "\n"
      << "p_frac_min = " << c.p_bounds[0] << "\np_frac_max = " << c.p_bounds[1] << "\n"
      << "b_frac_min = " << c.b_bounds[0] << "\nb_frac_max = " << c.b_bounds[1] << "\n"
      << "ao_epsilon = " << c.ao_epsilon << "\nseed = " << c.seed << "\ntrials = " << c.trials << "\n"
      << "init_sigma_pos_m = " << c.init_sigma_pos << "\ninit_sigma_vel_mps = " << c.init_sigma_vel << "\n"
      << "w_sensing = " << c.w_sensing << "\nw_comm = " << c.w_comm << "\n"
      << "exhaustive_cap = " << c.exhaustive_cap << "\n\n"
      << "[radio]\n"
      << "f_c_hz = " << c.f_c << "\n"
      << "sigma_c2_dbm_per_hz = " << w_per_hz_to_dbm_per_hz(c.sigma_c2) << "\n"
      << "sigma_r2_w = " << c.sigma_r2 << "\n"
      << "N_t = " << c.N_t << "\nN_r = " << c.N_r << "\nN_r_user = " << c.N_r_user << "\n"
      << "rcs_m2 = " << c.rcs << "\nsensing_pathloss_c0 = " << c.sensing_pathloss_c0 << "\n"
      << "beta1 = " << c.beta.range << "\nbeta2 = " << c.beta.velocity << "\nbeta3 = " << c.beta.angle << "\n";
  for (const auto& bs : c.bs_positions) out << "\n[bs]\nx_m = " << bs.x << "\ny_m = " << bs.y << "\n";
  for (std::size_t m = 0; m < c.initial_states.size(); ++m) {
    const auto& s = c.initial_states[m];
    out << "\n[object]\nkind = " << to_string(s.kind) << "\nx_m = " << s.x << "\ny_m = " << s.y
        << "\nvx_mps = " << s.vx << "\nvy_mps = " << s.vy << "\nsigma_m = " << c.sigma_m[m] << "\n";
  }
}

inline nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["K"] = c.K;
  j["Q"] = c.Q;
  j["I"] = c.I;
  j["T_s"] = c.T_s;
  j["N"] = c.N;
  j["P_total_w"] = c.P_total;
  j["B_total_hz"] = c.B_total;
  j["p_bounds"] = c.p_bounds;
  j["b_bounds"] = c.b_bounds;
  j["L_min"] = c.L_min;
  j["L_max"] = c.L_max;
  j["eta"] = c.eta;
  j["delta_t"] = c.delta_t;
  j["phi"] = c.phi;
  j["beta"] = {c.beta.range, c.beta.velocity, c.beta.angle};
  j["sigma_c2_w_per_hz"] = c.sigma_c2;
  j["sigma_r2_w"] = c.sigma_r2;
  j["f_c_hz"] = c.f_c;
  j["N_t"] = c.N_t;
  j["N_r"] = c.N_r;
  j["N_r_user"] = c.N_r_user;
  j["rcs_m2"] = c.rcs;
  j["sensing_pathloss_c0"] = c.sensing_pathloss_c0;
  j["ao_epsilon"] = c.ao_epsilon;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["init_sigma_pos_m"] = c.init_sigma_pos;
  j["init_sigma_vel_mps"] = c.init_sigma_vel;
  j["w_sensing"] = c.w_sensing;
  j["w_comm"] = c.w_comm;
  auto& bs = j["bs"] = nlohmann::json::array();
  for (const auto& b : c.bs_positions) bs.push_back({{"x_m", b.x}, {"y_m", b.y}});
  auto& objs = j["objects"] = nlohmann::json::array();
  for (std::size_t m = 0; m < c.initial_states.size(); ++m) {
    const auto& s = c.initial_states[m];
    objs.push_back({{"kind", to_string(s.kind)}, {"x_m", s.x}, {"y_m", s.y}, {"vx_mps", s.vx},
                    {"vy_mps", s.vy}, {"sigma_m", c.sigma_m[m]}});
  }
  return j;
}

}  // namespace cbara
