#pragma once

#include "cbara/cbara.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace cbara::testing {

inline ScenarioConfig bundled() { return load_scenario("paper_fig2"); }

/// Slot context for the first slot of the bundled scenario, optionally with
/// a different trade-off factor.
inline SlotContext first_slot(double eta = 0.7) {
  auto cfg = bundled();
  cfg.eta = eta;
  std::vector<FimState> fims(static_cast<std::size_t>(cfg.M()), initial_fim(cfg));
  return make_slot_context(cfg, fims, cfg.initial_states);
}

/// Slot context n slots into a noiseless mission driven by uniform
/// resources on all links.
inline SlotContext later_slot(int n, double eta = 0.7) {
  auto cfg = bundled();
  cfg.eta = eta;
  const int M = cfg.M();
  std::vector<FimState> fims(static_cast<std::size_t>(M), initial_fim(cfg));
  std::vector<ObjectState> states = cfg.initial_states;
  const auto all = AssignmentMatrix::all_ones(M, cfg.K);
  const auto uni = uniform_allocation(all, cfg.P_total, cfg.B_total);
  for (int s = 0; s < n; ++s) {
    for (int m = 0; m < M; ++m) {
      std::vector<double> pr(static_cast<std::size_t>(cfg.K)), br(static_cast<std::size_t>(cfg.K));
      for (int k = 0; k < cfg.K; ++k) {
        pr[static_cast<std::size_t>(k)] = uni.P(m, k);
        br[static_cast<std::size_t>(k)] = uni.B(m, k);
      }
      fims[static_cast<std::size_t>(m)] = posterior_fim(fims[static_cast<std::size_t>(m)], states[static_cast<std::size_t>(m)],
                                                        all.row(m), pr, br, cfg.sigma_m[static_cast<std::size_t>(m)], cfg);
      states[static_cast<std::size_t>(m)] = predict_state(states[static_cast<std::size_t>(m)], cfg.T_s);
    }
  }
  return make_slot_context(cfg, fims, states);
}

inline Mat4 random_spd(Rng& rng, double scale = 1.0) {
  Mat4 A;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = rng.normal();
  return scale * (A * A.transpose() + 0.5 * Mat4::Identity());
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace cbara::testing
