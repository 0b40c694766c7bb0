#include "test_support.hpp"

#include <sstream>

using namespace cbara;
using cbara::testing::bundled;

namespace {

ScenarioConfig quick(int trials = 2, int N = 4) {
  auto cfg = bundled();
  cfg.trials = trials;
  cfg.N = N;
  return cfg;
}

CsvTable round_trip(const CsvTable& t) {
  std::stringstream ss;
  write_csv(ss, t);
  return read_csv(ss);
}

}  // namespace

TEST(MissionCsv, HeaderLayout) {
  const auto h = mission_header(3, 3);
  ASSERT_EQ(h.size(), 10u + 27u);
  EXPECT_EQ(h[10], "u_0_0");
  EXPECT_EQ(h[11], "p_0_0");
  EXPECT_EQ(h[12], "b_0_0");
  EXPECT_EQ(h.back(), "b_2_2");
}

TEST(MissionCsv, RoundTripIsExact) {
  const auto rec = run_mission(quick(), Scheme::cbara, Rng(5));
  const auto rows = mission_rows(rec);
  ASSERT_EQ(rows.size(), 4u);
  const auto parsed = parse_mission_table(round_trip(mission_table(rows)));
  EXPECT_EQ(parsed, rows);
}

TEST(MissionCsv, RejectsForeignHeader) {
  CsvTable t;
  t.header = {"a", "b"};
  EXPECT_THROW(parse_mission_table(t), ConfigError);
}

TEST(SweepCsv, RoundTripDropsSkippedRows) {
  std::vector<SweepRow> rows{{"cbara", 0.35, 1.05, -12.5, 3.25, 840.125, 2, 0, false, ""},
                             {"exhaustive", 7, 1.0, 0, 0, 0, 0, 0, true, "cap"}};
  const auto parsed = parse_sweep_table(round_trip(sweep_table(rows, "eta")));
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].scheme, "cbara");
  EXPECT_EQ(parsed[0].key, 0.35);
  EXPECT_EQ(parsed[0].mean_rate_mbps, 840.125);
}

TEST(Csv, RaggedRowRejected) {
  std::stringstream ss("a,b\n1,2,3\n");
  EXPECT_THROW(read_csv(ss), ConfigError);
}

TEST(ParseRange, InclusiveGrid) {
  const auto v = parse_range("0.05:0.95:0.05");
  ASSERT_EQ(v.size(), 19u);
  EXPECT_EQ(v.front(), 0.05);
  EXPECT_EQ(v[3], 0.2);
  EXPECT_EQ(v.back(), 0.95);
  EXPECT_EQ(parse_range("0.05:0.95:0.1").size(), 10u);
}

TEST(ParseRange, MalformedSpecs) {
  EXPECT_THROW(parse_range("0.1,0.9"), ConfigError);
  EXPECT_THROW(parse_range("0.1:x:0.1"), ConfigError);
  EXPECT_THROW(parse_range("0.9:0.1:0.1"), ConfigError);
  EXPECT_THROW(parse_range("0.1:0.9:0"), ConfigError);
}

TEST(MonteCarlo, SingleTrialEqualsDirectMission) {
  const auto cfg = quick(1);
  const auto mc = monte_carlo(cfg, Scheme::cbara);
  const auto direct = run_mission(cfg, Scheme::cbara, Rng(cfg.seed).split(0));
  ASSERT_EQ(mc.trials.size(), 1u);
  EXPECT_EQ(mission_rows(mc.trials[0]), mission_rows(direct));
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  const auto cfg = quick(3);
  ::setenv("CBARA_THREADS", "1", 1);
  const auto a = monte_carlo(cfg, Scheme::bench3);
  ::setenv("CBARA_THREADS", "3", 1);
  const auto b = monte_carlo(cfg, Scheme::bench3);
  ::unsetenv("CBARA_THREADS");
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t t = 0; t < a.trials.size(); ++t) EXPECT_EQ(mission_rows(a.trials[t]), mission_rows(b.trials[t]));
}

TEST(MonteCarlo, AggregateIsPerSlotMean) {
  const auto mc = monte_carlo(quick(3), Scheme::cbara);
  ASSERT_EQ(mc.mean.size(), 4u);
  for (std::size_t n = 0; n < 4; ++n) {
    double f = 0.0;
    for (const auto& t : mc.trials) f += t.slots[n].objective;
    EXPECT_NEAR(mc.mean[n].objective, f / 3, 1e-12 * std::abs(f));
  }
  double m = 0.0;
  for (const auto& t : mc.trials) m += t.mean_objective();
  EXPECT_NEAR(mc.mean_objective(), m / 3, 1e-12 * std::abs(m));
}

TEST(Mission, TrueStatesFeedPredictions) {
  const auto cfg = quick(1, 3);
  const auto rec = run_mission(cfg, Scheme::bench1, Rng(9));
  ASSERT_EQ(rec.slots.size(), 3u);
  for (const auto& s : rec.slots) {
    EXPECT_EQ(s.U, AssignmentMatrix::all_ones(3, 3));
    EXPECT_EQ(s.rate_mbps.size(), 1u);
    EXPECT_EQ(s.solve_count, 0);
  }
}

TEST(SweepEta, OneRowPerSchemeAndEta) {
  const auto rows = sweep_eta(quick(1, 2), {Scheme::cbara, Scheme::bench1}, parse_range("0.2:0.8:0.3"), {1.0, 1.05});
  ASSERT_EQ(rows.size(), 2u * 3u * 2u);
  EXPECT_EQ(rows[0].delta_t, 1.0);
  EXPECT_EQ(rows.back().delta_t, 1.05);
  EXPECT_EQ(rows[1].scheme, "bench1");
  EXPECT_THROW(sweep_eta(quick(1, 2), {Scheme::cbara}, {1.0}, {1.0}), ConfigError);
}

TEST(RandomObjects, NestedAcrossObjectCounts) {
  const auto base = bundled();
  const auto small = with_random_objects(base, 4, 77);
  const auto large = with_random_objects(base, 6, 77);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(small.initial_states[i], large.initial_states[i]);
  EXPECT_EQ(large.initial_states[0].kind, ObjectKind::isac_user);
  EXPECT_EQ(large.Q, 5);
  EXPECT_EQ(large.I, 1);
  EXPECT_NO_THROW(large.validate());
}

TEST(RandomObjects, PathsStayClearOfStations) {
  const auto c = with_random_objects(bundled(), 6, 3);
  for (const auto& s : c.initial_states) {
    for (int n = 0; n <= c.N; ++n) {
      for (const auto& bs : c.bs_positions) {
        const double x = s.x + s.vx * c.T_s * n, y = s.y + s.vy * c.T_s * n;
        EXPECT_GE(std::hypot(x - bs.x, y - bs.y), 10.0 - 1e-9);
      }
    }
  }
}

TEST(SweepObjects, SkipsExhaustiveAboveCap) {
  auto base = quick(1, 2);
  base.exhaustive_cap = 16;
  const auto rows = sweep_objects(base, {2, 3}, {Scheme::cbara, Scheme::exhaustive});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_FALSE(rows[0].skipped);
  EXPECT_FALSE(rows[1].skipped);  // 16 assignments
  EXPECT_EQ(rows[1].failures, 0);
  EXPECT_TRUE(rows[3].skipped);   // 64 > 16
  EXPECT_EQ(sweep_table(rows, "M").rows.size(), 3u);
}

TEST(Manifest, CarriesVersionConfigAndSeed) {
  const auto cfg = quick();
  const auto j = make_manifest("run", cfg, {{"extra", 1}});
  EXPECT_EQ(j["tool"], "cbara");
  EXPECT_EQ(j["command"], "run");
  EXPECT_EQ(j["seed"], cfg.seed);
  EXPECT_EQ(j["extra"], 1);
  EXPECT_TRUE(j["config"].contains("beta"));
  EXPECT_FALSE(std::string(j["version"]).empty());
}

TEST(Invariants, HoldOnBundledScenario) {
  const auto checks = check_invariants(quick(1, 6));
  ASSERT_FALSE(checks.empty());
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(SweepObjects, SingleObjectForcedAssignmentCoincides) {
  auto cfg = with_random_objects(quick(1, 3), 1, 11);
  cfg.p_bounds = {0.05, 1.0};
  cfg.L_min = cfg.L_max = 3;
  cfg.validate();
  const auto ref = run_mission(cfg, Scheme::bench1, Rng(1));
  for (Scheme s : {Scheme::cbara, Scheme::exhaustive, Scheme::bench2, Scheme::bench3}) {
    const auto rec = run_mission(cfg, s, Rng(1));
    for (std::size_t n = 0; n < rec.slots.size(); ++n) EXPECT_EQ(rec.slots[n].U, ref.slots[n].U) << to_string(s);
  }
}
