#pragma once

#include "cbara/mission.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace cbara {

/// One row of an eta or object-count sweep. `key` is eta or M.
struct SweepRow {
  std::string scheme;
  double key = 0.0;
  double delta_t = 1.0;
  double mean_objective = 0.0;
  double mean_pcrlb_sum = 0.0;
  double mean_rate_mbps = 0.0;
  int trials = 0;
  int failures = 0;
  bool skipped = false;  // exhaustive refused at this point
  std::string note;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// start:stop:step, inclusive of stop up to round-off.
inline std::vector<double> parse_range(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos)
    throw ConfigError("range '" + spec + "' must look like start:stop:step");
  double start = 0, stop = 0, step = 0;
  try {
    start = std::stod(spec.substr(0, a));
    stop = std::stod(spec.substr(a + 1, b - a - 1));
    step = std::stod(spec.substr(b + 1));
  } catch (const std::logic_error&) {
    throw ConfigError("range '" + spec + "' has a non-numeric part");
  }
  if (!(step > 0.0) || stop < start) throw ConfigError("range '" + spec + "' needs step > 0 and stop >= start");
  std::vector<double> out;
  const long count = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) {
    // Rounded to 12 digits so 0.05 + 3*0.05 prints as 0.2.
    out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

inline SweepRow summarize(const MonteCarloResult& mc, double key, double delta_t) {
  SweepRow row;
  row.scheme = mc.scheme;
  row.key = key;
  row.delta_t = delta_t;
  row.mean_objective = mc.mean_objective();
  row.mean_pcrlb_sum = mc.mean_pcrlb_sum();
  row.mean_rate_mbps = mc.mean_rate_mbps();
  row.trials = static_cast<int>(mc.trials.size());
  row.failures = static_cast<int>(mc.failures.size());
  return row;
}

/// Mission-averaged metrics for every (delta_t, eta, scheme).
inline std::vector<SweepRow> sweep_eta(const ScenarioConfig& base, const std::vector<Scheme>& schemes,
                                       const std::vector<double>& etas, const std::vector<double>& delta_ts,
                                       const AoOptions& opt = {}) {
  std::vector<SweepRow> rows;
  for (double dt : delta_ts) {
    for (double eta : etas) {
      if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta value " + std::to_string(eta) + " outside (0, 1)");
      for (Scheme s : schemes) {
        ScenarioConfig c = base;
        c.eta = eta;
        c.delta_t = dt;
        c.validate();
        rows.push_back(summarize(monte_carlo(c, s, opt), eta, dt));
      }
    }
  }
  return rows;
}

/// Draws objects uniformly over the triangle spanned by the first three BSs
/// grown by `margin` metres. Object 0 is an ISAC user, the rest are sensing
/// targets; speeds are uniform in [2, 10] m/s with uniform heading. Samples
/// whose noise-free path comes within 10 m of a BS during the mission are
/// redrawn. The i-th object depends only on (seed, i), so the set for M is a
/// prefix of the set for M + 1.
inline ScenarioConfig with_random_objects(const ScenarioConfig& base, int M, std::uint64_t seed,
                                          double margin = 20.0, double sigma = 1.5) {
  if (base.bs_positions.size() < 3) throw ConfigError("random placement needs at least 3 BSs");
  const auto& A = base.bs_positions[0];
  const auto& Bp = base.bs_positions[1];
  const auto& C = base.bs_positions[2];
  auto seg_dist = [](double px, double py, const Position& a, const Position& b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double t = std::clamp(((px - a.x) * vx + (py - a.y) * vy) / (vx * vx + vy * vy), 0.0, 1.0);
    return std::hypot(px - a.x - t * vx, py - a.y - t * vy);
  };
  auto cross = [](const Position& o, const Position& a, double px, double py) {
    return (a.x - o.x) * (py - o.y) - (a.y - o.y) * (px - o.x);
  };
  auto in_region = [&](double px, double py) {
    const double c1 = cross(A, Bp, px, py), c2 = cross(Bp, C, px, py), c3 = cross(C, A, px, py);
    const bool inside = (c1 >= 0 && c2 >= 0 && c3 >= 0) || (c1 <= 0 && c2 <= 0 && c3 <= 0);
    if (inside) return true;
    return std::min({seg_dist(px, py, A, Bp), seg_dist(px, py, Bp, C), seg_dist(px, py, C, A)}) <= margin;
  };
  const double xmin = std::min({A.x, Bp.x, C.x}) - margin, xmax = std::max({A.x, Bp.x, C.x}) + margin;
  const double ymin = std::min({A.y, Bp.y, C.y}) - margin, ymax = std::max({A.y, Bp.y, C.y}) + margin;
  const double duration = base.T_s * base.N;

  ScenarioConfig c = base;
  c.initial_states.clear();
  c.sigma_m.clear();
  const Rng root(seed);
  for (int i = 0; i < M; ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw ConfigError("random placement: no admissible object position found");
      const double px = rng.uniform(xmin, xmax), py = rng.uniform(ymin, ymax);
      const double speed = rng.uniform(2.0, 10.0), heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
      if (!in_region(px, py)) continue;
      const double vx = speed * std::cos(heading), vy = speed * std::sin(heading);
      bool clear = true;
      for (const auto& bs : base.bs_positions) {
        const Position a{px, py}, b{px + vx * duration, py + vy * duration};
        if (seg_dist(bs.x, bs.y, a, b) < 10.0) clear = false;
      }
      if (!clear) continue;
      c.initial_states.push_back({px, py, vx, vy, i == 0 ? ObjectKind::isac_user : ObjectKind::sensing_target});
      c.sigma_m.push_back(sigma);
      break;
    }
  }
  c.I = M >= 1 ? 1 : 0;
  c.Q = M - c.I;
  return c;
}

/// Mean objective per (M, scheme) over `draws` random object placements.
/// Exhaustive search beyond its cap is recorded as a skipped row.
inline std::vector<SweepRow> sweep_objects(const ScenarioConfig& base, const std::vector<int>& m_values,
                                           const std::vector<Scheme>& schemes, int draws = 1,
                                           const AoOptions& opt = {}) {
  std::vector<SweepRow> rows;
  for (int M : m_values) {
    if (M < 1) throw ConfigError("object count must be >= 1");
    for (Scheme s : schemes) {
      SweepRow acc;
      acc.scheme = to_string(s);
      acc.key = M;
      acc.delta_t = base.delta_t;
      int ok = 0;
      for (int d = 0; d < draws; ++d) {
        const auto c = with_random_objects(base, M, base.seed + static_cast<std::uint64_t>(d));
        c.validate();
        if (s == Scheme::exhaustive && assignment_count(M, c.K, c.L_min, c.L_max) > c.exhaustive_cap) {
          acc.skipped = true;
          acc.note = "exhaustive cap exceeded";
          break;
        }
        const auto mc = monte_carlo(c, s, opt);
        if (mc.trials.empty()) continue;
        acc.mean_objective += mc.mean_objective();
        acc.mean_pcrlb_sum += mc.mean_pcrlb_sum();
        acc.mean_rate_mbps += mc.mean_rate_mbps();
        acc.trials += static_cast<int>(mc.trials.size());
        acc.failures += static_cast<int>(mc.failures.size());
        ++ok;
      }
      if (ok > 0) {
        acc.mean_objective /= ok;
        acc.mean_pcrlb_sum /= ok;
        acc.mean_rate_mbps /= ok;
      }
      rows.push_back(acc);
    }
  }
  return rows;
}

}  // namespace cbara
