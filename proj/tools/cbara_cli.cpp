// Command-line front end: single runs, eta and object-count sweeps, and
// invariant checks on a scenario.

#include "cbara/cbara.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cbara;
namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list '" + s + "'");
  return out;
}

std::vector<Scheme> parse_schemes(const std::string& s) {
  std::vector<Scheme> out;
  for (const auto& name : split_list(s)) out.push_back(parse_scheme(name));
  return out;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_double(item, what));
  return out;
}

std::vector<int> parse_ints(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(static_cast<int>(parse_long(item, what)));
  return out;
}

struct Common {
  std::string scenario = "paper_fig2";
  std::string out = ".";
  int trials = -1;
  long long seed = -1;

  ScenarioConfig load() const {
    auto cfg = load_scenario(scenario);
    if (trials >= 0) cfg.trials = trials;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.validate();
    return cfg;
  }
  fs::path out_dir() const {
    fs::create_directories(out);
    return out;
  }
  void attach(CLI::App* app) {
    app->add_option("--scenario", scenario, "scenario file or bundled fixture name")->capture_default_str();
    app->add_option("--out", out, "output directory")->capture_default_str();
    app->add_option("--trials", trials, "Monte Carlo trials (default: from scenario)")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "base seed (default: from scenario)")->check(CLI::NonNegativeNumber);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_run(const Common& common, const std::string& scheme_name, double eta) {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = common.load();
  const Scheme scheme = parse_scheme(scheme_name);
  if (eta > 0.0) cfg.eta = eta;
  cfg.validate();
  const auto mc = monte_carlo(cfg, scheme);
  for (const auto& f : mc.failures)
    std::cerr << "warning: trial " << f.trial << " (seed " << f.seed << ") failed: " << f.message << "\n";
  if (mc.trials.empty()) {
    std::cerr << "error: every trial failed\n";
    return 2;
  }
  std::vector<MissionRow> rows;
  for (const auto& t : mc.trials) {
    auto r = mission_rows(t);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  const auto dir = common.out_dir();
  write_csv_file(dir / "mission.csv", mission_table(rows));
  auto manifest = make_manifest("run", cfg,
                                {{"scheme", mc.scheme},
                                 {"trial_seeds", trial_seeds(mc)},
                                 {"mean_objective", mc.mean_objective()},
                                 {"mean_pcrlb_sum", mc.mean_pcrlb_sum()},
                                 {"mean_rate_mbps", mc.mean_rate_mbps()},
                                 {"failed_trials", mc.failures.size()},
                                 {"wall_seconds", seconds_since(t0)}});
  write_json_file(dir / "manifest.json", manifest);
  std::cout << mc.scheme << ": " << mc.trials.size() << " trials, mean F " << mc.mean_objective() << ", mean PCRLB sum "
            << mc.mean_pcrlb_sum() << ", mean rate " << mc.mean_rate_mbps() << " Mbit/s\n";
  return 0;
}

int cmd_sweep_eta(const Common& common, const std::string& values, const std::string& schemes,
                  const std::string& delta_t) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = common.load();
  const auto etas = parse_range(values);
  const auto list = parse_schemes(schemes);
  const auto dts = delta_t.empty() ? std::vector<double>{cfg.delta_t} : parse_doubles(delta_t, "--delta-t");
  const auto rows = sweep_eta(cfg, list, etas, dts);
  int failed = 0;
  for (const auto& r : rows) failed += r.failures;
  const auto dir = common.out_dir();
  write_csv_file(dir / "sweep.csv", sweep_table(rows, "eta"));
  write_json_file(dir / "manifest.json",
                  make_manifest("sweep-eta", cfg,
                                {{"schemes", schemes}, {"eta_values", etas}, {"delta_t_values", dts},
                                 {"failed_trials", failed}, {"wall_seconds", seconds_since(t0)}}));
  std::cout << rows.size() << " rows written to " << (dir / "sweep.csv").string() << "\n";
  if (failed) std::cerr << "warning: " << failed << " trials failed across the sweep\n";
  return 0;
}

int cmd_sweep_objects(const Common& common, const std::string& m_values, const std::string& schemes, double p_total,
                      double b_total, int draws, long long placement_seed) {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = common.load();
  if (p_total > 0.0) cfg.P_total = p_total;
  if (b_total > 0.0) cfg.B_total = b_total;
  if (placement_seed >= 0) cfg.seed = static_cast<std::uint64_t>(placement_seed);
  const auto ms = parse_ints(m_values, "--m-values");
  const auto rows = sweep_objects(cfg, ms, parse_schemes(schemes), draws);
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& r : rows) {
    if (r.skipped) {
      skipped.push_back({{"scheme", r.scheme}, {"M", r.key}, {"reason", r.note}});
      std::cerr << "warning: " << r.scheme << " at M = " << r.key << " skipped (" << r.note << ")\n";
    }
  }
  const auto dir = common.out_dir();
  write_csv_file(dir / "sweep.csv", sweep_table(rows, "M"));
  write_json_file(dir / "manifest.json",
                  make_manifest("sweep-objects", cfg,
                                {{"schemes", schemes}, {"m_values", ms}, {"draws", draws}, {"skipped", skipped},
                                 {"wall_seconds", seconds_since(t0)}}));
  std::cout << rows.size() - skipped.size() << " rows written to " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_validate(const Common& common) {
  const auto cfg = common.load();
  const auto checks = check_invariants(cfg);
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
    ok = ok && c.passed;
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cbara: cooperative BS assignment and resource allocation simulator"};
  app.require_subcommand(1);

  Common run_c, eta_c, obj_c, val_c;
  std::string scheme = "cbara";
  double eta = -1.0;
  auto* run = app.add_subcommand("run", "Monte Carlo missions of one scheme; writes mission.csv and manifest.json");
  run_c.attach(run);
  run->add_option("--scheme", scheme, "cbara, exhaustive, bench1, bench2 or bench3")->capture_default_str();
  run->add_option("--eta", eta, "trade-off factor in (0, 1) (default: from scenario)");

  std::string values = "0.05:0.95:0.1", eta_schemes = "cbara", delta_t;
  auto* sweep_eta_cmd = app.add_subcommand("sweep-eta", "mission-averaged metrics over an eta grid; writes sweep.csv");
  eta_c.attach(sweep_eta_cmd);
  sweep_eta_cmd->add_option("--values", values, "start:stop:step")->capture_default_str();
  sweep_eta_cmd->add_option("--schemes", eta_schemes, "comma-separated scheme list")->capture_default_str();
  sweep_eta_cmd->add_option("--delta-t", delta_t, "comma-separated delta_t list (default: from scenario)");

  std::string m_values = "3,4,5,6", obj_schemes = "cbara,bench1,bench2,bench3";
  double p_total = -1.0, b_total = -1.0;
  int draws = 1;
  long long placement_seed = -1;
  auto* sweep_obj_cmd = app.add_subcommand("sweep-objects", "mean objective versus object count; writes sweep.csv");
  obj_c.attach(sweep_obj_cmd);
  sweep_obj_cmd->add_option("--m-values", m_values, "comma-separated object counts")->capture_default_str();
  sweep_obj_cmd->add_option("--schemes", obj_schemes, "comma-separated scheme list")->capture_default_str();
  sweep_obj_cmd->add_option("--p-total-w", p_total, "override per-BS power budget");
  sweep_obj_cmd->add_option("--b-total-hz", b_total, "override total bandwidth");
  sweep_obj_cmd->add_option("--draws", draws, "random placements per M")->check(CLI::PositiveNumber)->capture_default_str();
  sweep_obj_cmd->add_option("--placement-seed", placement_seed, "seed of the object placement");

  auto* validate = app.add_subcommand("validate", "check structural invariants on a scenario");
  val_c.attach(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(run_c, scheme, eta);
    if (*sweep_eta_cmd) return cmd_sweep_eta(eta_c, values, eta_schemes, delta_t);
    if (*sweep_obj_cmd) return cmd_sweep_objects(obj_c, m_values, obj_schemes, p_total, b_total, draws, placement_seed);
    if (*validate) return cmd_validate(val_c);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
