#pragma once

#include "cbara/mission.hpp"

#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace cbara {

struct InvariantCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

inline bool non_increasing(const std::vector<double>& trace, double tol = 1e-9) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1] + tol) return false;
  }
  return true;
}

/// Largest increase of tr(J^-1) when one BS is added to a support, over all
/// 2^K supports of object m. Links share a fixed (p, b).
inline double worst_information_violation(const SlotContext& ctx, int m, double p, double b) {
  const int K = ctx.K();
  auto trace_of = [&](unsigned mask) {
    Mat4 J = ctx.prior[static_cast<std::size_t>(m)];
    for (int k = 0; k < K; ++k) {
      if (!(mask & (1u << k))) continue;
      const auto& t = ctx.link(m, k);
      J += p * (b * t.G_pb + t.G_p);
    }
    return pcrlb_trace(J);
  };
  double worst = -std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << K); ++mask) {
    const double base = trace_of(mask);
    for (int k = 0; k < K; ++k) {
      if (mask & (1u << k)) continue;
      worst = std::max(worst, trace_of(mask | (1u << k)) - base);
    }
  }
  return worst;
}

/// Runs one cbara mission on `cfg` and checks the structural invariants
/// slot by slot. Never throws on a violated invariant; solver errors are
/// reported as a failed check.
inline std::vector<InvariantCheck> check_invariants(const ScenarioConfig& cfg, const AoOptions& opt = {}) {
  std::vector<InvariantCheck> out;
  auto add = [&](const std::string& name, bool ok, const std::string& detail) { out.push_back({name, ok, detail}); };

  Rng rng = Rng(cfg.seed).split(0);
  const auto truth = generate_trajectory(cfg, rng);
  const int M = cfg.M();
  std::vector<FimState> fims(static_cast<std::size_t>(M), initial_fim(cfg));
  const double p_uni = cfg.P_total / M;
  const double b_uni = cfg.B_total / (static_cast<double>(M) * cfg.K);

  int info_bad = 0, trace_bad = 0, count_bad = 0, feas_bad = 0, pd_bad = 0;
  std::ostringstream info_msg, trace_msg, count_msg, feas_msg, pd_msg;
  try {
    for (int n = 0; n < cfg.N; ++n) {
      std::vector<ObjectState> predicted;
      for (int m = 0; m < M; ++m) {
        predicted.push_back(n == 0 ? truth.states[0][static_cast<std::size_t>(m)]
                                   : predict_state(truth.states[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(m)], cfg.T_s));
      }
      const auto ctx = make_slot_context(cfg, fims, predicted);
      for (int m = 0; m < M; ++m) {
        const double v = worst_information_violation(ctx, m, p_uni, b_uni);
        if (v > 1e-12 * pcrlb_trace(ctx.prior[static_cast<std::size_t>(m)])) {
          if (info_bad++ == 0) info_msg << "slot " << n << " object " << m << " trace grew by " << v;
        }
      }
      const auto res = cbara_solve(ctx, opt);
      if (!non_increasing(res.trace)) {
        if (trace_bad++ == 0) trace_msg << "slot " << n;
      }
      if (res.solve_count != 2L * res.ao_iterations + 1) {
        if (count_bad++ == 0) count_msg << "slot " << n << ": " << res.solve_count << " solves for l = " << res.ao_iterations;
      }
      try {
        check_feasible(ctx, res.U, res.alloc.P, res.alloc.B);
      } catch (const ConstraintError& e) {
        if (feas_bad++ == 0) feas_msg << "slot " << n << ": " << e.what();
      }
      for (int m = 0; m < M; ++m) {
        std::vector<double> p(static_cast<std::size_t>(cfg.K)), b(static_cast<std::size_t>(cfg.K));
        for (int k = 0; k < cfg.K; ++k) {
          p[static_cast<std::size_t>(k)] = res.alloc.P(m, k);
          b[static_cast<std::size_t>(k)] = res.alloc.B(m, k);
        }
        fims[static_cast<std::size_t>(m)] = posterior_fim(fims[static_cast<std::size_t>(m)], predicted[static_cast<std::size_t>(m)],
                                                          res.U.row(m), p, b, cfg.sigma_m[static_cast<std::size_t>(m)], cfg);
        const Mat4& J = fims[static_cast<std::size_t>(m)].J;
        const bool sym = (J - J.transpose()).norm() <= 1e-9 * J.norm();
        const bool pd = Eigen::SelfAdjointEigenSolver<Mat4>(J).eigenvalues().minCoeff() > 0.0;
        if (!(sym && pd) && pd_bad++ == 0) pd_msg << "slot " << n << " object " << m;
      }
    }
  } catch (const Error& e) {
    add("mission completes", false, e.what());
    return out;
  }
  add("mission completes", true, "");
  add("adding a BS never increases the PCRLB trace", info_bad == 0, info_msg.str());
  add("AO objective trace non-increasing", trace_bad == 0, trace_msg.str());
  add("cbara solve count equals 2l + 1", count_bad == 0, count_msg.str());
  add("allocations satisfy all constraints", feas_bad == 0, feas_msg.str());
  add("posterior FIMs symmetric positive definite", pd_bad == 0, pd_msg.str());

  const auto a = run_mission(cfg, Scheme::cbara, Rng(cfg.seed).split(0), 0, opt);
  const auto b = run_mission(cfg, Scheme::cbara, Rng(cfg.seed).split(0), 0, opt);
  bool same = a.slots.size() == b.slots.size();
  for (std::size_t i = 0; same && i < a.slots.size(); ++i) {
    same = a.slots[i].U == b.slots[i].U && a.slots[i].P == b.slots[i].P && a.slots[i].B == b.slots[i].B &&
           a.slots[i].objective == b.slots[i].objective;
  }
  add("same seed reproduces the mission bit for bit", same, "");
  return out;
}

}  // namespace cbara
