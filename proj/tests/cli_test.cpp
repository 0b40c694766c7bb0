#include "test_support.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace cbara;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string output;
};

Outcome cli(const std::string& args) {
  const std::string cmd = std::string(CBARA_CLI_PATH) + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) o.output += buf;
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("cbara_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Cli, RunWritesMissionAndManifest) {
  const auto dir = scratch_dir("run");
  const auto o = cli("run --scheme cbara --trials 2 --seed 7 --out " + dir.string());
  ASSERT_EQ(o.code, 0) << o.output;
  const auto rows = parse_mission_table(read_csv_file(dir / "mission.csv"));
  EXPECT_EQ(rows.size(), 2u * 30u);
  std::ifstream in(dir / "manifest.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["trial_seeds"]["trials"].size(), 2u);
  EXPECT_TRUE(j.contains("version"));
  fs::remove_all(dir);
}

TEST(Cli, UnknownSchemeListsValidOnes) {
  const auto o = cli("run --scheme greedy --trials 1 --out " + scratch_dir("bad").string());
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.output.find("bench2"), std::string::npos) << o.output;
}

TEST(Cli, MissingScenarioIsConfigError) {
  const auto o = cli("validate --scenario no_such_scenario");
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.output.find("no_such_scenario"), std::string::npos) << o.output;
}

TEST(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(cli("").code, 1); }

TEST(Cli, SweepEtaNineteenRowsPerScheme) {
  const auto dir = scratch_dir("eta");
  const auto o = cli("sweep-eta --values 0.05:0.95:0.05 --schemes cbara,bench1 --trials 1 --out " + dir.string());
  ASSERT_EQ(o.code, 0) << o.output;
  const auto rows = parse_sweep_table(read_csv_file(dir / "sweep.csv"));
  EXPECT_EQ(rows.size(), 38u);
  int cbara = 0;
  for (const auto& r : rows) cbara += r.scheme == "cbara";
  EXPECT_EQ(cbara, 19);
  fs::remove_all(dir);
}

TEST(Cli, SweepEtaRejectsBadRange) {
  const auto o = cli("sweep-eta --values 0.05-0.95 --trials 1 --out " + scratch_dir("range").string());
  EXPECT_EQ(o.code, 1);
}

TEST(Cli, SweepObjectsWritesRowPerSchemeAndCount) {
  const auto dir = scratch_dir("obj");
  const auto o = cli("sweep-objects --m-values 3,4 --schemes cbara,bench1 --trials 1 --p-total-w 90 --b-total-hz 120e6 --out " +
                     dir.string());
  ASSERT_EQ(o.code, 0) << o.output;
  const auto t = read_csv_file(dir / "sweep.csv");
  EXPECT_EQ(t.header[1], "M");
  EXPECT_EQ(t.rows.size(), 4u);
  fs::remove_all(dir);
}

TEST(Cli, ValidatePasses) {
  const auto o = cli("validate");
  EXPECT_EQ(o.code, 0) << o.output;
  EXPECT_EQ(o.output.find("FAIL"), std::string::npos) << o.output;
  EXPECT_NE(o.output.find("PASS"), std::string::npos);
}
