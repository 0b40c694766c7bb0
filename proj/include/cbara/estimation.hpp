#pragma once

#include "cbara/channel.hpp"
#include "cbara/scenario.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace cbara {

/// Posterior Fisher information of one object after slot `slot`.
struct FimState {
  Mat4 J = Mat4::Identity();
  int slot = 0;
};

inline constexpr double kConditionLimit = 1e12;

/// Closed-form 4x4 inverse through 2x2 minors (adjugate / determinant).
/// Throws NumericalError if the 1-norm condition estimate exceeds 1e12.
inline Mat4 inverse4(const Mat4& m) {
  const double s0 = m(0, 0) * m(1, 1) - m(1, 0) * m(0, 1);
  const double s1 = m(0, 0) * m(1, 2) - m(1, 0) * m(0, 2);
  const double s2 = m(0, 0) * m(1, 3) - m(1, 0) * m(0, 3);
  const double s3 = m(0, 1) * m(1, 2) - m(1, 1) * m(0, 2);
  const double s4 = m(0, 1) * m(1, 3) - m(1, 1) * m(0, 3);
  const double s5 = m(0, 2) * m(1, 3) - m(1, 2) * m(0, 3);

  const double c5 = m(2, 2) * m(3, 3) - m(3, 2) * m(2, 3);
  const double c4 = m(2, 1) * m(3, 3) - m(3, 1) * m(2, 3);
  const double c3 = m(2, 1) * m(3, 2) - m(3, 1) * m(2, 2);
  const double c2 = m(2, 0) * m(3, 3) - m(3, 0) * m(2, 3);
  const double c1 = m(2, 0) * m(3, 2) - m(3, 0) * m(2, 2);
  const double c0 = m(2, 0) * m(3, 1) - m(3, 0) * m(2, 1);

  const double det = s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
  if (det == 0.0 || !std::isfinite(det)) throw NumericalError("inverse4: singular matrix");
  const double inv_det = 1.0 / det;

  Mat4 r;
  r(0, 0) = (m(1, 1) * c5 - m(1, 2) * c4 + m(1, 3) * c3) * inv_det;
  r(0, 1) = (-m(0, 1) * c5 + m(0, 2) * c4 - m(0, 3) * c3) * inv_det;
  r(0, 2) = (m(3, 1) * s5 - m(3, 2) * s4 + m(3, 3) * s3) * inv_det;
  r(0, 3) = (-m(2, 1) * s5 + m(2, 2) * s4 - m(2, 3) * s3) * inv_det;
  r(1, 0) = (-m(1, 0) * c5 + m(1, 2) * c2 - m(1, 3) * c1) * inv_det;
  r(1, 1) = (m(0, 0) * c5 - m(0, 2) * c2 + m(0, 3) * c1) * inv_det;
  r(1, 2) = (-m(3, 0) * s5 + m(3, 2) * s2 - m(3, 3) * s1) * inv_det;
  r(1, 3) = (m(2, 0) * s5 - m(2, 2) * s2 + m(2, 3) * s1) * inv_det;
  r(2, 0) = (m(1, 0) * c4 - m(1, 1) * c2 + m(1, 3) * c0) * inv_det;
  r(2, 1) = (-m(0, 0) * c4 + m(0, 1) * c2 - m(0, 3) * c0) * inv_det;
  r(2, 2) = (m(3, 0) * s4 - m(3, 1) * s2 + m(3, 3) * s0) * inv_det;
  r(2, 3) = (-m(2, 0) * s4 + m(2, 1) * s2 - m(2, 3) * s0) * inv_det;
  r(3, 0) = (-m(1, 0) * c3 + m(1, 1) * c1 - m(1, 2) * c0) * inv_det;
  r(3, 1) = (m(0, 0) * c3 - m(0, 1) * c1 + m(0, 2) * c0) * inv_det;
  r(3, 2) = (-m(3, 0) * s3 + m(3, 1) * s1 - m(3, 2) * s0) * inv_det;
  r(3, 3) = (m(2, 0) * s3 - m(2, 1) * s1 + m(2, 2) * s0) * inv_det;

  const double cond = m.cwiseAbs().colwise().sum().maxCoeff() * r.cwiseAbs().colwise().sum().maxCoeff();
  if (!(cond <= kConditionLimit)) throw NumericalError("inverse4: condition number exceeds 1e12");
  return r;
}

/// Inverse of a symmetric matrix, symmetrized to remove round-off skew.
inline Mat4 inverse_sym4(const Mat4& m) {
  Mat4 r = inverse4(m);
  return 0.5 * (r + r.transpose());
}

/// J^0 = diag(sx^2, sx^2, sv^2, sv^2)^-1.
inline FimState initial_fim(double sigma_pos, double sigma_vel) {
  FimState s;
  s.J = Vec4(1.0 / (sigma_pos * sigma_pos), 1.0 / (sigma_pos * sigma_pos), 1.0 / (sigma_vel * sigma_vel),
             1.0 / (sigma_vel * sigma_vel))
            .asDiagonal();
  s.slot = -1;
  return s;
}

inline FimState initial_fim(const ScenarioConfig& c) { return initial_fim(c.init_sigma_pos, c.init_sigma_vel); }

/// Zero-process-noise prediction.
inline ObjectState predict_state(const ObjectState& prev, double T_s) { return propagate_state(prev, T_s); }

/// d(range, radial velocity, azimuth) / d[x, y, vx, vy].
inline Mat34 measurement_jacobian(const ObjectState& s, const Position& bs) {
  const double dx = s.x - bs.x;
  const double dy = s.y - bs.y;
  const double d2 = dx * dx + dy * dy;
  if (!(d2 > 0.0)) throw GeometryError("measurement_jacobian: object co-located with base station");
  const double d = std::sqrt(d2);
  const double d3 = d2 * d;
  const double cross = s.vx * dy - s.vy * dx;
  Mat34 H;
  H << dx / d, dy / d, 0.0, 0.0,
      dy * cross / d3, -dx * cross / d3, dx / d, dy / d,
      -dy / d2, dx / d2, 0.0, 0.0;
  return H;
}

/// Prior information carried into the next slot: (Q + F J^-1 F^T)^-1.
inline Mat4 prior_fim(const FimState& prev, const Mat4& Q_m, const Mat4& F_x) {
  const Mat4 inner = Q_m + F_x * inverse_sym4(prev.J) * F_x.transpose();
  return inverse_sym4(inner);
}

struct MeasurementLink {
  Mat34 H;
  Mat3 lambda;
};

/// Sum of H^T Lambda^-1 H over the assigned links.
inline Mat4 data_fim(std::span<const MeasurementLink> links) {
  Mat4 out = Mat4::Zero();
  for (const auto& link : links) {
    const Vec3 diag = link.lambda.diagonal();
    if (!(diag.minCoeff() > 0.0)) throw InvalidArgument("data_fim: measurement covariance must be positive definite");
    Mat3 inv;
    if (link.lambda.isDiagonal()) {
      inv = diag.cwiseInverse().asDiagonal();
    } else {
      bool ok = false;
      double det = 0.0;
      link.lambda.computeInverseAndDetWithCheck(inv, det, ok);
      if (!ok || !(det > 0.0)) throw InvalidArgument("data_fim: singular measurement covariance");
    }
    out.noalias() += link.H.transpose() * inv * link.H;
  }
  return out;
}

/// Posterior FIM of one object for one slot, given its assignment row and
/// the power / bandwidth rows. Every assigned link is linearized at the
/// predicted state.
inline FimState posterior_fim(const FimState& prev, const ObjectState& predicted, std::span<const int> u,
                              std::span<const double> p, std::span<const double> b, double sigma_m,
                              const ScenarioConfig& config) {
  const std::size_t K = config.bs_positions.size();
  if (u.size() != K || p.size() != K || b.size() != K)
    throw InvalidArgument("posterior_fim: rows must have one entry per base station");
  std::vector<MeasurementLink> links;
  for (std::size_t k = 0; k < K; ++k) {
    const bool assigned = u[k] != 0;
    if (assigned != (p[k] > 0.0) || assigned != (b[k] > 0.0))
      throw InvalidArgument("posterior_fim: support of p and b must equal the assignment row");
    if (!assigned) continue;
    const auto& bs = config.bs_positions[k];
    const double zeta2 = link_gains(predicted, bs, config).zeta2;
    const auto cov = measurement_crlbs(p[k], b[k], zeta2, config.beta, config.delta_t);
    links.push_back({measurement_jacobian(predicted, bs), cov.lambda});
  }
  const Mat4 prior = prior_fim(prev, process_noise_cov(sigma_m, config.T_s), transition_matrix(config.T_s));
  FimState out;
  out.J = prior + data_fim(links);
  out.J = 0.5 * (out.J + out.J.transpose());
  out.slot = prev.slot + 1;
  return out;
}

/// Predictive PCRLB: trace of the inverse posterior FIM.
inline double pcrlb_trace(const FimState& s) { return inverse4(s.J).trace(); }
inline double pcrlb_trace(const Mat4& J) { return inverse4(J).trace(); }

}  // namespace cbara
