#include "test_support.hpp"

#include <sstream>

using namespace cbara;
using cbara::testing::bundled;

TEST(TransitionMatrix, CouplesPositionToOwnVelocity) {
  const Mat4 F = transition_matrix(0.5);
  Mat4 expected = Mat4::Identity();
  expected(0, 2) = 0.5;
  expected(1, 3) = 0.5;
  EXPECT_EQ(F, expected);
}

TEST(TransitionMatrix, ZeroVelocityIsFixedPoint) {
  for (double T : {0.1, 0.5, 3.0}) EXPECT_EQ(transition_matrix(T) * Vec4(3, 4, 0, 0), Vec4(3, 4, 0, 0));
}

TEST(TransitionMatrix, UnitStep) { EXPECT_EQ(transition_matrix(1.0) * Vec4(0, 0, 2, -1), Vec4(2, -1, 2, -1)); }

TEST(TransitionMatrix, RejectsNonPositiveStep) {
  EXPECT_THROW(transition_matrix(0.0), InvalidArgument);
  EXPECT_THROW(transition_matrix(-1.0), InvalidArgument);
}

TEST(ProcessNoise, PerAxisBlock) {
  const Mat4 Q = process_noise_cov(1.5, 0.5);
  // x axis occupies (0, 2), y axis (1, 3) in canonical order.
  EXPECT_NEAR(Q(0, 0), 0.0625, 1e-15);
  EXPECT_NEAR(Q(0, 2), 0.1875, 1e-15);
  EXPECT_NEAR(Q(2, 0), 0.1875, 1e-15);
  EXPECT_NEAR(Q(2, 2), 0.75, 1e-15);
  EXPECT_NEAR(Q(1, 1), 0.0625, 1e-15);
  EXPECT_NEAR(Q(1, 3), 0.1875, 1e-15);
  EXPECT_NEAR(Q(3, 3), 0.75, 1e-15);
  EXPECT_EQ(Q(0, 1), 0.0);
  EXPECT_EQ(Q(0, 3), 0.0);
  EXPECT_EQ(Q(2, 3), 0.0);
}

TEST(ProcessNoise, ZeroLevelGivesZeroMatrix) { EXPECT_EQ(process_noise_cov(0.0, 0.7), Mat4::Zero()); }

TEST(ProcessNoise, PositiveSemidefinite) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Mat4 Q = process_noise_cov(rng.uniform(0, 5), rng.uniform(0.01, 3));
    EXPECT_TRUE(Q.isApprox(Q.transpose(), 0.0));
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat4>(Q).eigenvalues().minCoeff(), -1e-14);
  }
}

TEST(ProcessNoise, RejectsNegativeLevel) { EXPECT_THROW(process_noise_cov(-0.1, 0.5), InvalidArgument); }

TEST(PropagateState, Target2OneStep) {
  const ObjectState t2{66.0, 12.0, 0.0, 4.64, ObjectKind::sensing_target};
  const auto next = propagate_state(t2, 0.5);
  EXPECT_DOUBLE_EQ(next.x, 66.0);
  EXPECT_NEAR(next.y, 14.32, 1e-12);
  EXPECT_DOUBLE_EQ(next.vx, 0.0);
  EXPECT_DOUBLE_EQ(next.vy, 4.64);
  EXPECT_EQ(next.kind, ObjectKind::sensing_target);
}

TEST(PropagateState, ZeroStateStaysZero) {
  const ObjectState zero{};
  EXPECT_EQ(propagate_state(zero, 0.5), zero);
}

TEST(Trajectory, SameSeedSameTrajectory) {
  const auto cfg = bundled();
  Rng a(77), b(77);
  const auto ta = generate_trajectory(cfg, a);
  const auto tb = generate_trajectory(cfg, b);
  ASSERT_EQ(ta.states.size(), static_cast<std::size_t>(cfg.N));
  EXPECT_EQ(ta.states, tb.states);
  EXPECT_TRUE(ta.noisy);
}

TEST(Trajectory, NoiselessIsConstantVelocity) {
  auto cfg = bundled();
  std::fill(cfg.sigma_m.begin(), cfg.sigma_m.end(), 0.0);
  Rng rng(1);
  const auto t = generate_trajectory(cfg, rng);
  EXPECT_FALSE(t.noisy);
  for (int n = 0; n < cfg.N; ++n) {
    for (int m = 0; m < cfg.M(); ++m) {
      const auto& s0 = cfg.initial_states[static_cast<std::size_t>(m)];
      const auto& s = t.states[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
      EXPECT_NEAR(s.x, s0.x + n * cfg.T_s * s0.vx, 1e-9);
      EXPECT_NEAR(s.y, s0.y + n * cfg.T_s * s0.vy, 1e-9);
      EXPECT_EQ(s.vx, s0.vx);
      EXPECT_EQ(s.vy, s0.vy);
    }
  }
}

TEST(Trajectory, SingleSlotIsInitialState) {
  auto cfg = bundled();
  cfg.N = 1;
  Rng rng(9);
  const auto t = generate_trajectory(cfg, rng);
  ASSERT_EQ(t.states.size(), 1u);
  EXPECT_EQ(t.states[0], cfg.initial_states);
}

TEST(Trajectory, NoiseHasProcessCovariance) {
  // Empirical covariance of one-step increments against Q.
  auto cfg = bundled();
  cfg.N = 2;
  const Mat4 Q = process_noise_cov(cfg.sigma_m[1], cfg.T_s);
  const Mat4 F = transition_matrix(cfg.T_s);
  Mat4 acc = Mat4::Zero();
  const int draws = 20000;
  Rng root(5);
  for (int i = 0; i < draws; ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    const auto t = generate_trajectory(cfg, rng);
    const Vec4 w = t.states[1][1].vec() - F * cfg.initial_states[1].vec();
    acc += w * w.transpose();
  }
  acc /= draws;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(acc(i, j), Q(i, j), 0.05 * std::sqrt(Q(i, i) * Q(j, j)) + 1e-12);
}

TEST(LoadScenario, BundledFixture) {
  const auto cfg = bundled();
  EXPECT_EQ(cfg.K, 3);
  EXPECT_EQ(cfg.M(), 3);
  EXPECT_EQ(cfg.Q, 2);
  EXPECT_EQ(cfg.I, 1);
  EXPECT_EQ(cfg.P_total, 30.0);
  EXPECT_EQ(cfg.B_total, 65e6);
  EXPECT_EQ(cfg.eta, 0.7);
  EXPECT_EQ(cfg.delta_t, 1.05);
  EXPECT_EQ(cfg.N, 30);
  EXPECT_EQ(cfg.T_s, 0.5);
  EXPECT_EQ(cfg.L_min, 2);
  EXPECT_EQ(cfg.L_max, 3);
  EXPECT_EQ(cfg.phi, 0.1);
  EXPECT_EQ(cfg.sigma_m, (std::vector<double>{1.5, 2.0, 1.0}));
  EXPECT_EQ(cfg.initial_states[2].kind, ObjectKind::isac_user);
  EXPECT_EQ(cfg.bs_positions[1].x, 60.0);
  EXPECT_EQ(cfg.bs_positions[1].y, -51.96);
  EXPECT_NEAR(cfg.sigma_c2, 3.1622776601683795e-18, 1e-30);
}

TEST(LoadScenario, FixtureCrlbConstantsMatchCalibration) {
  const auto cfg = bundled();
  const auto beta = calibrate_crlb_constants(cfg);
  EXPECT_NEAR(cfg.beta.range, beta.range, 1e-12 * beta.range);
  EXPECT_NEAR(cfg.beta.velocity, beta.velocity, 1e-12 * beta.velocity);
  EXPECT_NEAR(cfg.beta.angle, beta.angle, 1e-12 * beta.angle);
}

namespace {

std::string minimal_ini(const std::string& system_extra = "", const std::string& radio_extra = "") {
  return "[system]\nK = 1\nQ = 1\nI = 0\nT_s = 0.5\nN = 3\nP_total_w = 10\nB_total_hz = 1e6\neta = 0.5\n"
         "L_min = 1\nL_max = 1\n" +
         system_extra +
         "[radio]\nf_c_hz = 3e9\nsigma_r2_w = 1e-12\nsensing_pathloss_c0 = 1\nbeta1 = 1\nbeta2 = 1\nbeta3 = 1\n" +
         radio_extra + "[bs]\nx_m = 0\ny_m = 0\n[object]\nkind = target\nx_m = 10\ny_m = 0\nvx_mps = 1\nvy_mps = 0\n";
}

std::string config_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_scenario(in, "inline.ini");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(LoadScenario, MinimalFileUsesDefaults) {
  std::istringstream in(minimal_ini());
  const auto cfg = parse_scenario(in, "inline.ini");
  EXPECT_EQ(cfg.delta_t, 1.0);
  EXPECT_EQ(cfg.p_bounds[1], 0.85);
  EXPECT_EQ(cfg.N_t, 32);
  EXPECT_EQ(cfg.sigma_m[0], 1.0);
  EXPECT_EQ(cfg.trials, 50);
}

TEST(LoadScenario, LminAboveLmaxIsConfigError) {
  auto text = minimal_ini();
  text.replace(text.find("L_min = 1"), 9, "L_min = 2");
  EXPECT_NE(config_error(text).find("L_min"), std::string::npos);
}

TEST(LoadScenario, ErrorsNameTheField) {
  EXPECT_NE(config_error(minimal_ini("eta = 0.3\n")).find("'eta'"), std::string::npos);  // duplicate
  EXPECT_NE(config_error(minimal_ini("bogus = 1\n")).find("bogus"), std::string::npos);
  EXPECT_NE(config_error(minimal_ini("phi = abc\n")).find("phi"), std::string::npos);
  auto no_beta = minimal_ini();
  no_beta.erase(no_beta.find("beta2 = 1\n"), 10);
  EXPECT_NE(config_error(no_beta).find("beta2"), std::string::npos);
  auto bad_eta = minimal_ini();
  bad_eta.replace(bad_eta.find("eta = 0.5"), 9, "eta = 1.0");
  EXPECT_NE(config_error(bad_eta).find("eta"), std::string::npos);
  auto bad_kind = minimal_ini();
  bad_kind.replace(bad_kind.find("kind = target"), 13, "kind = drone");
  EXPECT_NE(config_error(bad_kind).find("kind"), std::string::npos);
}

TEST(LoadScenario, CountMismatchIsConfigError) {
  auto text = minimal_ini();
  text.replace(text.find("Q = 1"), 5, "Q = 2");
  EXPECT_NE(config_error(text).find("'Q'"), std::string::npos);
}

TEST(LoadScenario, EtaValueIsRead) {
  auto text = minimal_ini();
  text.replace(text.find("eta = 0.5"), 9, "eta = 0.7");
  std::istringstream in(text);
  EXPECT_EQ(parse_scenario(in, "x.ini").eta, 0.7);
}

TEST(LoadScenario, WriteThenParseRoundTrips) {
  const auto cfg = bundled();
  std::stringstream ss;
  write_scenario(ss, cfg);
  const auto back = parse_scenario(ss, "roundtrip.ini");
  EXPECT_EQ(back.name, cfg.name);
  EXPECT_EQ(back.initial_states, cfg.initial_states);
  EXPECT_EQ(back.sigma_m, cfg.sigma_m);
  EXPECT_EQ(back.beta.range, cfg.beta.range);
  EXPECT_EQ(back.beta.angle, cfg.beta.angle);
  EXPECT_NEAR(back.sigma_c2, cfg.sigma_c2, 1e-12 * cfg.sigma_c2);
  EXPECT_EQ(back.P_total, cfg.P_total);
  EXPECT_EQ(back.delta_t, cfg.delta_t);
}

TEST(LoadScenario, UnknownScenarioIsConfigError) { EXPECT_THROW(load_scenario("no_such_scenario"), ConfigError); }
