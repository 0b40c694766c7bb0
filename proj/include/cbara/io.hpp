#pragma once

#include "cbara/mission.hpp"
#include "cbara/scenario_io.hpp"
#include "cbara/sweep.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef CBARA_VERSION
#define CBARA_VERSION "unknown"
#endif

namespace cbara {

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ConfigError(where + ": '" + s + "' is not a number");
  return v;
}

inline long parse_long(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw ConfigError(where + ": '" + s + "' is not an integer");
  return v;
}

/// Plain comma-separated table. Fields never contain commas or quotes here.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

inline void write_csv(std::ostream& out, const CsvTable& t) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline CsvTable read_csv(std::istream& in, const std::string& origin = "csv") {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(origin + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split_csv_line(line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != t.header.size())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                        " fields, got " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

// mission.csv ------------------------------------------------------------

/// One (trial, slot) line of mission.csv.
struct MissionRow {
  int trial = 0;
  int slot = 0;
  std::string scheme;
  double eta = 0.0;
  double delta_t = 1.0;
  double objective = 0.0;
  double pcrlb_sum = 0.0;
  double rate_mbps_sum = 0.0;
  int ao_iters = 0;
  long solve_count = 0;
  int M = 0;
  int K = 0;
  std::vector<int> u;     // row-major m, k
  std::vector<double> p;
  std::vector<double> b;

  friend bool operator==(const MissionRow&, const MissionRow&) = default;
};

inline std::vector<std::string> mission_header(int M, int K) {
  std::vector<std::string> h{"trial",     "slot",          "scheme",   "eta",        "delta_t",
                             "objective", "pcrlb_sum",     "rate_mbps_sum", "ao_iters", "solve_count"};
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const std::string tag = "_" + std::to_string(m) + "_" + std::to_string(k);
      h.push_back("u" + tag);
      h.push_back("p" + tag);
      h.push_back("b" + tag);
    }
  }
  return h;
}

inline std::vector<MissionRow> mission_rows(const MissionRecord& rec) {
  std::vector<MissionRow> rows;
  for (const auto& s : rec.slots) {
    MissionRow r;
    r.trial = rec.trial;
    r.slot = s.slot;
    r.scheme = rec.scheme;
    r.eta = rec.eta;
    r.delta_t = rec.delta_t;
    r.objective = s.objective;
    r.pcrlb_sum = s.pcrlb_sum();
    r.rate_mbps_sum = s.rate_mbps_sum();
    r.ao_iters = s.ao_iterations;
    r.solve_count = s.solve_count;
    r.M = static_cast<int>(s.P.rows());
    r.K = static_cast<int>(s.P.cols());
    for (int m = 0; m < r.M; ++m) {
      for (int k = 0; k < r.K; ++k) {
        r.u.push_back(s.U(m, k));
        r.p.push_back(s.P(m, k));
        r.b.push_back(s.B(m, k));
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

inline CsvTable mission_table(const std::vector<MissionRow>& rows) {
  if (rows.empty()) throw InvalidArgument("mission_table: no rows");
  CsvTable t;
  t.header = mission_header(rows.front().M, rows.front().K);
  for (const auto& r : rows) {
    std::vector<std::string> c{std::to_string(r.trial), std::to_string(r.slot), r.scheme,
                               format_double(r.eta),    format_double(r.delta_t), format_double(r.objective),
                               format_double(r.pcrlb_sum), format_double(r.rate_mbps_sum),
                               std::to_string(r.ao_iters), std::to_string(r.solve_count)};
    for (std::size_t i = 0; i < r.u.size(); ++i) {
      c.push_back(std::to_string(r.u[i]));
      c.push_back(format_double(r.p[i]));
      c.push_back(format_double(r.b[i]));
    }
    t.rows.push_back(std::move(c));
  }
  return t;
}

/// Inverse of mission_table; M and K come from the last u_m_k column.
inline std::vector<MissionRow> parse_mission_table(const CsvTable& t) {
  if (t.header.size() < 10 || (t.header.size() - 10) % 3 != 0) throw ConfigError("mission.csv: malformed header");
  int M = 0, K = 0;
  if (t.header.size() > 10) {
    const auto& last = t.header[t.header.size() - 3];
    const auto a = last.find('_', 2);
    if (last.rfind("u_", 0) != 0 || a == std::string::npos) throw ConfigError("mission.csv: bad column '" + last + "'");
    M = static_cast<int>(parse_long(last.substr(2, a - 2), "mission.csv header")) + 1;
    K = static_cast<int>(parse_long(last.substr(a + 1), "mission.csv header")) + 1;
  }
  if (t.header != mission_header(M, K)) throw ConfigError("mission.csv: header does not match the schema");
  std::vector<MissionRow> out;
  for (const auto& c : t.rows) {
    MissionRow r;
    r.trial = static_cast<int>(parse_long(c[0], "trial"));
    r.slot = static_cast<int>(parse_long(c[1], "slot"));
    r.scheme = c[2];
    r.eta = parse_double(c[3], "eta");
    r.delta_t = parse_double(c[4], "delta_t");
    r.objective = parse_double(c[5], "objective");
    r.pcrlb_sum = parse_double(c[6], "pcrlb_sum");
    r.rate_mbps_sum = parse_double(c[7], "rate_mbps_sum");
    r.ao_iters = static_cast<int>(parse_long(c[8], "ao_iters"));
    r.solve_count = parse_long(c[9], "solve_count");
    r.M = M;
    r.K = K;
    for (std::size_t i = 10; i < c.size(); i += 3) {
      r.u.push_back(static_cast<int>(parse_long(c[i], t.header[i])));
      r.p.push_back(parse_double(c[i + 1], t.header[i + 1]));
      r.b.push_back(parse_double(c[i + 2], t.header[i + 2]));
    }
    out.push_back(std::move(r));
  }
  return out;
}

// sweep.csv --------------------------------------------------------------

/// `key_name` is "eta" or "M".
inline CsvTable sweep_table(const std::vector<SweepRow>& rows, const std::string& key_name) {
  CsvTable t;
  t.header = {"scheme", key_name, "delta_t", "mean_objective", "mean_pcrlb_sum", "mean_rate_mbps"};
  for (const auto& r : rows) {
    if (r.skipped) continue;
    t.rows.push_back({r.scheme, key_name == "M" ? std::to_string(std::lround(r.key)) : format_double(r.key),
                      format_double(r.delta_t), format_double(r.mean_objective), format_double(r.mean_pcrlb_sum),
                      format_double(r.mean_rate_mbps)});
  }
  return t;
}

inline std::vector<SweepRow> parse_sweep_table(const CsvTable& t) {
  if (t.header.size() != 6 || t.header[0] != "scheme" || (t.header[1] != "eta" && t.header[1] != "M") ||
      t.header[2] != "delta_t" || t.header[3] != "mean_objective" || t.header[4] != "mean_pcrlb_sum" ||
      t.header[5] != "mean_rate_mbps")
    throw ConfigError("sweep.csv: header does not match the schema");
  std::vector<SweepRow> out;
  for (const auto& c : t.rows) {
    SweepRow r;
    r.scheme = c[0];
    r.key = parse_double(c[1], t.header[1]);
    r.delta_t = parse_double(c[2], "delta_t");
    r.mean_objective = parse_double(c[3], "mean_objective");
    r.mean_pcrlb_sum = parse_double(c[4], "mean_pcrlb_sum");
    r.mean_rate_mbps = parse_double(c[5], "mean_rate_mbps");
    out.push_back(r);
  }
  return out;
}

// files ------------------------------------------------------------------

inline void write_csv_file(const std::filesystem::path& path, const CsvTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_csv(out, t);
}

inline CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  return read_csv(in, path.string());
}

/// Run manifest: version, config echo, seeds and timings. `extra` is merged
/// in at top level.
inline nlohmann::json make_manifest(const std::string& command, const ScenarioConfig& cfg,
                                    const nlohmann::json& extra = nlohmann::json::object()) {
  nlohmann::json j;
  j["tool"] = "cbara";
  j["version"] = CBARA_VERSION;
  j["command"] = command;
  j["config"] = to_json(cfg);
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  if (const char* env = std::getenv("CBARA_THREADS")) j["threads_env"] = env;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

inline nlohmann::json trial_seeds(const MonteCarloResult& mc) {
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& t : mc.trials) seeds.push_back({{"trial", t.trial}, {"seed", t.seed}, {"wall_s", t.wall_seconds}});
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : mc.failures) failures.push_back({{"trial", f.trial}, {"seed", f.seed}, {"error", f.message}});
  return {{"scheme", mc.scheme}, {"trials", seeds}, {"failures", failures}};
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace cbara
