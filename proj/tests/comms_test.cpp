#include "test_support.hpp"

#include <numbers>

using namespace cbara;
using cbara::testing::rel_err;

TEST(LinkRate, SnrThreeGivesTwoBitsPerHertz) {
  // p varsigma / (b sigma) = 3 with b = 1 MHz.
  EXPECT_NEAR(link_rate(3.0, 1e6, 1e6, 1.0), 2e6, 1e-6);
}

TEST(LinkRate, UnitSnr) { EXPECT_NEAR(link_rate(1.0, 1.0, 1.0, 1.0), 1.0, 1e-15); }

TEST(LinkRate, ZeroPowerAndZeroBandwidth) {
  EXPECT_EQ(link_rate(0.0, 1e6, 1.0, 1.0), 0.0);
  EXPECT_EQ(link_rate(5.0, 0.0, 1.0, 1.0), 0.0);
}

TEST(LinkSnr, RejectsZeroBandwidth) { EXPECT_THROW(link_snr(1.0, 0.0, 1.0, 1.0), InvalidArgument); }

TEST(UserRate, EmptyAssignmentIsZero) {
  const std::vector<int> u{0, 0, 0};
  const std::vector<double> z{0, 0, 0}, g{1, 1, 1};
  EXPECT_EQ(user_rate(u, z, z, g, 1.0), 0.0);
}

TEST(UserRate, AdditiveOverLinks) {
  const std::vector<int> u{1, 1, 0};
  const std::vector<double> p{2.0, 2.0, 0.0}, b{1e6, 1e6, 0.0}, g{5e5, 5e5, 9e9};
  const double one = link_rate(2.0, 1e6, 5e5, 1.0);
  EXPECT_DOUBLE_EQ(user_rate(u, p, b, g, 1.0), 2 * one);
}

TEST(UserRate, JointlyConcaveAlongChords) {
  Rng rng(3);
  const std::vector<int> u{1, 1, 1};
  const std::vector<double> g{3e-8, 1e-8, 5e-9};
  const double sigma = 3.16e-18;
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> p1(3), p2(3), b1(3), b2(3), pm(3), bm(3);
    const double a = rng.uniform(0, 1);
    for (std::size_t k = 0; k < 3; ++k) {
      p1[k] = rng.uniform(0.1, 30);
      p2[k] = rng.uniform(0.1, 30);
      b1[k] = rng.uniform(1e5, 6e7);
      b2[k] = rng.uniform(1e5, 6e7);
      pm[k] = a * p1[k] + (1 - a) * p2[k];
      bm[k] = a * b1[k] + (1 - a) * b2[k];
    }
    const double mid = user_rate(u, pm, bm, g, sigma);
    const double chord = a * user_rate(u, p1, b1, g, sigma) + (1 - a) * user_rate(u, p2, b2, g, sigma);
    ASSERT_GE(mid, chord - 1e-9 * std::abs(chord));
  }
}

TEST(LinkRate, SecondDerivativesMatchFiniteDifferences) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform(0.5, 30), b = rng.uniform(1e6, 6e7);
    const double h = std::pow(10.0, rng.uniform(5, 11));
    const auto [fpp, fbb] = cbara::oracle::neg_rate_fd_second(p, b, h);
    EXPECT_LT(rel_err(fpp, cbara::oracle::neg_rate_d2_pp(p, b, h)), 1e-5) << "p=" << p << " b=" << b << " h=" << h;
    EXPECT_LT(rel_err(fbb, cbara::oracle::neg_rate_d2_bb(p, b, h)), 1e-5) << "p=" << p << " b=" << b << " h=" << h;
  }
}

TEST(LinkRateGradient, MatchesFiniteDifferences) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform(0.5, 30), b = rng.uniform(1e6, 6e7), g = std::pow(10.0, rng.uniform(-10, -7));
    const double s = 3.16e-18;
    const auto grad = link_rate_gradient(p, b, g, s);
    const double hp = 1e-5 * p, hb = 1e-5 * b;
    const double dp = (link_rate(p + hp, b, g, s) - link_rate(p - hp, b, g, s)) / (2 * hp);
    const double db = (link_rate(p, b + hb, g, s) - link_rate(p, b - hb, g, s)) / (2 * hb);
    EXPECT_LT(rel_err(grad.dp, dp), 1e-6);
    EXPECT_LT(rel_err(grad.db, db), 1e-6);
    EXPECT_GT(grad.dp, 0.0);
    EXPECT_GT(grad.db, 0.0);
  }
}
