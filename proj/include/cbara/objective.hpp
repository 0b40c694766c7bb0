#pragma once

#include "cbara/allocation.hpp"
#include "cbara/comms.hpp"
#include "cbara/estimation.hpp"
#include "cbara/scenario.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace cbara {

/// Per-link quantities that stay fixed while resources change.
///
/// With Lambda^-1 = diag(p b z/(d b1), p z/(d b2), p z/(d b3)) the data
/// information of one link is  p b G_pb + p G_p, so the posterior FIM is
/// affine in p for fixed b and affine in b for fixed p.
struct LinkTerms {
  Mat34 H = Mat34::Zero();
  Mat4 G_pb = Mat4::Zero();
  Mat4 G_p = Mat4::Zero();
  double zeta2 = 0.0;
  double varsigma = 0.0;
};

/// Everything one slot's allocation problem needs: the prior FIMs carried
/// from the previous slot, predicted states, link terms and the scenario.
struct SlotContext {
  ScenarioConfig config;
  std::vector<FimState> previous;
  std::vector<ObjectState> predicted;
  std::vector<Mat4> prior;          // J_P per object
  std::vector<LinkTerms> links;     // row-major [m * K + k]
  std::vector<int> users;           // object indices of ISAC users

  [[nodiscard]] int M() const { return static_cast<int>(predicted.size()); }
  [[nodiscard]] int K() const { return static_cast<int>(config.bs_positions.size()); }
  [[nodiscard]] const LinkTerms& link(int m, int k) const {
    return links[static_cast<std::size_t>(m * K() + k)];
  }
  [[nodiscard]] bool is_user(int m) const { return predicted[static_cast<std::size_t>(m)].kind == ObjectKind::isac_user; }
};

inline SlotContext make_slot_context(const ScenarioConfig& config, std::span<const FimState> previous,
                                     std::span<const ObjectState> predicted) {
  const int M = static_cast<int>(predicted.size());
  const int K = static_cast<int>(config.bs_positions.size());
  if (static_cast<int>(previous.size()) != M) throw InvalidArgument("make_slot_context: one FIM per object required");
  if (static_cast<int>(config.sigma_m.size()) != M)
    throw InvalidArgument("make_slot_context: config object count differs from predicted states");
  SlotContext ctx;
  ctx.config = config;
  ctx.previous.assign(previous.begin(), previous.end());
  ctx.predicted.assign(predicted.begin(), predicted.end());
  const Mat4 F = transition_matrix(config.T_s);
  ctx.prior.reserve(static_cast<std::size_t>(M));
  ctx.links.reserve(static_cast<std::size_t>(M * K));
  for (int m = 0; m < M; ++m) {
    ctx.prior.push_back(prior_fim(ctx.previous[static_cast<std::size_t>(m)],
                                  process_noise_cov(config.sigma_m[static_cast<std::size_t>(m)], config.T_s), F));
    if (ctx.predicted[static_cast<std::size_t>(m)].kind == ObjectKind::isac_user) ctx.users.push_back(m);
    for (int k = 0; k < K; ++k) {
      const auto& s = ctx.predicted[static_cast<std::size_t>(m)];
      const auto& bs = config.bs_positions[static_cast<std::size_t>(k)];
      LinkTerms t;
      t.H = measurement_jacobian(s, bs);
      const auto g = link_gains(s, bs, config);
      t.zeta2 = g.zeta2;
      t.varsigma = g.varsigma;
      const Eigen::RowVector4d h1 = t.H.row(0), h2 = t.H.row(1), h3 = t.H.row(2);
      const double scale = t.zeta2 / config.delta_t;
      t.G_pb = scale / config.beta.range * (h1.transpose() * h1);
      t.G_p = scale * (h2.transpose() * h2 / config.beta.velocity + h3.transpose() * h3 / config.beta.angle);
      ctx.links.push_back(t);
    }
  }
  return ctx;
}

/// Posterior FIM of object m under (U, P, B), using the affine link form.
inline Mat4 object_fim(const SlotContext& ctx, const AssignmentMatrix& U, const MatX& P, const MatX& B, int m) {
  Mat4 J = ctx.prior[static_cast<std::size_t>(m)];
  for (int k = 0; k < ctx.K(); ++k) {
    if (!U(m, k)) continue;
    const auto& t = ctx.link(m, k);
    J.noalias() += P(m, k) * (B(m, k) * t.G_pb + t.G_p);
  }
  return J;
}

inline double user_rate_bps(const SlotContext& ctx, const AssignmentMatrix& U, const MatX& P, const MatX& B, int m) {
  double r = 0.0;
  for (int k = 0; k < ctx.K(); ++k) {
    if (!U(m, k)) continue;
    r += link_rate(P(m, k), B(m, k), ctx.link(m, k).varsigma, ctx.config.sigma_c2);
  }
  return r;
}

struct ObjectiveBreakdown {
  double value = 0.0;
  double sensing_sum = 0.0;        // sum of PCRLB traces
  double rate_sum_bps = 0.0;       // sum of user rates
  std::vector<double> pcrlb;       // per object
  std::vector<double> rate_bps;    // per ISAC user, in ctx.users order
};

/// Weighted objective without constraint checks.
inline ObjectiveBreakdown evaluate_objective(const SlotContext& ctx, const AssignmentMatrix& U, const MatX& P,
                                             const MatX& B) {
  const auto& c = ctx.config;
  ObjectiveBreakdown out;
  out.pcrlb.reserve(static_cast<std::size_t>(ctx.M()));
  for (int m = 0; m < ctx.M(); ++m) {
    const double tr = pcrlb_trace(object_fim(ctx, U, P, B, m));
    out.pcrlb.push_back(tr);
    out.sensing_sum += tr;
  }
  for (int m : ctx.users) {
    const double r = user_rate_bps(ctx, U, P, B, m);
    out.rate_bps.push_back(r);
    out.rate_sum_bps += r;
  }
  out.value = c.eta * c.w_sensing * out.sensing_sum - (1.0 - c.eta) * c.w_comm * out.rate_sum_bps;
  return out;
}

inline double objective_value(const SlotContext& ctx, const AssignmentMatrix& U, const MatX& P, const MatX& B) {
  return evaluate_objective(ctx, U, P, B).value;
}

/// Throws ConstraintError naming the first violated allocation constraint.
inline void check_feasible(const SlotContext& ctx, const AssignmentMatrix& U, const MatX& P, const MatX& B,
                           double rel_tol = 1e-9) {
  const auto& c = ctx.config;
  const int M = ctx.M();
  const int K = ctx.K();
  auto fail = [](const std::string& what) { throw ConstraintError(what); };
  if (U.objects() != M || U.stations() != K || P.rows() != M || P.cols() != K || B.rows() != M || B.cols() != K)
    fail("dimensions: U, P and B must all be M x K");
  U.check_cardinality(c.L_min, c.L_max);
  const double p_lo = c.P_min() * (1 - rel_tol), p_hi = c.P_max() * (1 + rel_tol);
  const double b_lo = c.B_min() * (1 - rel_tol), b_hi = c.B_max() * (1 + rel_tol);
  double b_sum = 0.0;
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const std::string at = " at (" + std::to_string(m) + ", " + std::to_string(k) + ")";
      if (!U(m, k)) {
        if (P(m, k) != 0.0) fail("power support: unassigned link has nonzero power" + at);
        if (B(m, k) != 0.0) fail("bandwidth support: unassigned link has nonzero bandwidth" + at);
        continue;
      }
      if (!(P(m, k) >= p_lo && P(m, k) <= p_hi)) fail("power box bounds violated" + at);
      if (!(B(m, k) >= b_lo && B(m, k) <= b_hi)) fail("bandwidth box bounds violated" + at);
      b_sum += B(m, k);
    }
  }
  for (int k = 0; k < K; ++k) {
    if (U.column_count(k) == 0) continue;
    if (std::abs(P.col(k).sum() - c.P_total) > rel_tol * c.P_total)
      fail("per-BS power conservation violated at BS " + std::to_string(k));
  }
  if (std::abs(b_sum - c.B_total) > rel_tol * c.B_total) fail("total bandwidth conservation violated");
}

/// Objective of a feasible (U, P, B); infeasible input throws ConstraintError.
inline double objective(const SlotContext& ctx, const AssignmentMatrix& U, const MatX& P, const MatX& B) {
  check_feasible(ctx, U, P, B);
  return objective_value(ctx, U, P, B);
}

struct ObjectiveGradient {
  MatX dP;
  MatX dB;
};

/// Objective value and its analytic gradient on the assigned links (zero
/// elsewhere), using d tr(J^-1) = -tr(J^-1 dJ J^-1).
inline double objective_with_gradient(const SlotContext& ctx, const AssignmentMatrix& U, const MatX& P,
                                      const MatX& B, ObjectiveGradient& g) {
  const auto& c = ctx.config;
  const int M = ctx.M();
  const int K = ctx.K();
  g.dP.setZero(M, K);
  g.dB.setZero(M, K);
  const double ws = c.eta * c.w_sensing;
  const double wc = (1.0 - c.eta) * c.w_comm;
  double sensing = 0.0;
  double rate = 0.0;
  for (int m = 0; m < M; ++m) {
    const Mat4 Jinv = inverse_sym4(object_fim(ctx, U, P, B, m));
    sensing += Jinv.trace();
    const Mat4 Jinv2 = Jinv * Jinv;
    const bool user = ctx.is_user(m);
    for (int k = 0; k < K; ++k) {
      if (!U(m, k)) continue;
      const auto& t = ctx.link(m, k);
      const double pb_term = Jinv2.cwiseProduct(t.G_pb).sum();
      const double p_term = Jinv2.cwiseProduct(t.G_p).sum();
      g.dP(m, k) = -ws * (B(m, k) * pb_term + p_term);
      g.dB(m, k) = -ws * P(m, k) * pb_term;
      if (user) {
        const auto rg = link_rate_gradient(P(m, k), B(m, k), t.varsigma, c.sigma_c2);
        g.dP(m, k) -= wc * rg.dp;
        g.dB(m, k) -= wc * rg.db;
        rate += link_rate(P(m, k), B(m, k), t.varsigma, c.sigma_c2);
      }
    }
  }
  return ws * sensing - wc * rate;
}

inline ObjectiveGradient objective_gradient(const SlotContext& ctx, const AssignmentMatrix& U, const MatX& P,
                                            const MatX& B) {
  ObjectiveGradient g;
  objective_with_gradient(ctx, U, P, B, g);
  return g;
}

/// Uniform resources on the support of U: each used BS splits P_total
/// equally over its objects; B_total is split equally over all links.
inline AllocationPair uniform_allocation(const AssignmentMatrix& U, double P_total, double B_total) {
  const int M = U.objects();
  const int K = U.stations();
  AllocationPair a{MatX::Zero(M, K), MatX::Zero(M, K)};
  const int links = U.links();
  for (int k = 0; k < K; ++k) {
    const int c = U.column_count(k);
    for (int m = 0; m < M; ++m) {
      if (!U(m, k)) continue;
      a.P(m, k) = P_total / c;
      a.B(m, k) = B_total / links;
    }
  }
  return a;
}

}  // namespace cbara
