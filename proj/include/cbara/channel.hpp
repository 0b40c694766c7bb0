#pragma once

#include "cbara/scenario.hpp"

#include <cmath>
#include <numbers>

namespace cbara {

/// Range (m), radial velocity (m/s) and azimuth (rad) seen from one BS.
struct MeasurementTriple {
  double d = 0.0;
  double v = 0.0;
  double theta = 0.0;

  [[nodiscard]] Vec3 vec() const { return Vec3(d, v, theta); }
};

/// Diagonal measurement CRLBs and the synchronization-inflated covariance.
struct MeasurementCov {
  double var_d = 0.0;
  double var_v = 0.0;
  double var_theta = 0.0;
  Mat3 lambda = Mat3::Zero();

  [[nodiscard]] Mat3 sigma() const { return Vec3(var_d, var_v, var_theta).asDiagonal(); }
};

/// Communication gain (varsigma) and normalized sensing gain (zeta2) of one
/// object-BS link under perfect beamforming.
struct LinkGains {
  double varsigma = 0.0;
  double zeta2 = 0.0;
};

inline MeasurementTriple measure(const ObjectState& state, const Position& bs) {
  const double dx = state.x - bs.x;
  const double dy = state.y - bs.y;
  const double d = std::hypot(dx, dy);
  if (!(d > 0.0)) throw GeometryError("measure: object co-located with base station");
  return {d, (state.vx * dx + state.vy * dy) / d, std::atan2(dy, dx)};
}

/// Free-space path loss as a linear power gain; d in metres, f_c in hertz
/// (the dB formula itself takes gigahertz).
inline double comm_pathloss_db(double d, double f_c) {
  if (!(d > 0.0)) throw InvalidArgument("comm_pathloss: distance must be > 0");
  if (!(f_c > 0.0)) throw InvalidArgument("comm_pathloss: carrier must be > 0");
  return 32.4 + 20.0 * std::log10(d) + 20.0 * std::log10(f_c / 1e9);
}

inline double comm_pathloss_linear(double d, double f_c) {
  return std::pow(10.0, -comm_pathloss_db(d, f_c) / 10.0);
}

/// Normalized sensing gain at range d; alpha = c0 / d^2 and every
/// beamforming-mismatch factor equal to one.
inline double sensing_gain(double d, const ScenarioConfig& c) {
  if (!(d > 0.0)) throw GeometryError("sensing_gain: zero range");
  const double array = static_cast<double>(c.N_t) * static_cast<double>(c.N_r);
  const double alpha = c.sensing_pathloss_c0 / (d * d);
  return array * array * alpha * alpha * c.rcs * c.rcs / (static_cast<double>(c.N_r) * c.sigma_r2);
}

inline LinkGains link_gains(const ObjectState& state, const Position& bs, const ScenarioConfig& c) {
  const double d = std::hypot(state.x - bs.x, state.y - bs.y);
  if (!(d > 0.0)) throw GeometryError("link_gains: object co-located with base station");
  const double rho2 = static_cast<double>(c.N_t) * static_cast<double>(c.N_r_user);
  return {rho2 * comm_pathloss_linear(d, c.f_c), sensing_gain(d, c)};
}

inline MeasurementCov measurement_crlbs(double p, double b, double zeta2, const CrlbConstants& beta,
                                        double delta_t = 1.0) {
  if (!(p > 0.0)) throw InvalidArgument("measurement_crlbs: power must be > 0 on an assigned link");
  if (!(b > 0.0)) throw InvalidArgument("measurement_crlbs: bandwidth must be > 0 on an assigned link");
  if (!(zeta2 > 0.0)) throw InvalidArgument("measurement_crlbs: sensing gain must be > 0");
  MeasurementCov cov;
  cov.var_d = beta.range / (p * zeta2 * b);
  cov.var_v = beta.velocity / (p * zeta2);
  cov.var_theta = beta.angle / (p * zeta2);
  cov.lambda = delta_t * cov.sigma();
  return cov;
}

/// Reference point for deriving the CRLB constants.
struct CrlbCalibration {
  double range_m = 100.0;
  double var_range = 1.0;      // m^2
  double var_velocity = 1.0;   // (m/s)^2
  double var_angle = 1e-4;     // rad^2
};

/// Chooses beta1..beta3 so that a single link at `ref.range_m`, driven by the
/// uniform full-connectivity allocation (P_total / M watts and
/// B_total / (M K) hertz), has exactly the reference CRLBs. All other
/// constants are taken from `c`.
inline CrlbConstants calibrate_crlb_constants(const ScenarioConfig& c, const CrlbCalibration& ref = {}) {
  const double p = c.P_total / c.M();
  const double b = c.B_total / (static_cast<double>(c.M()) * c.K);
  const double zeta2 = sensing_gain(ref.range_m, c);
  return {ref.var_range * p * zeta2 * b, ref.var_velocity * p * zeta2, ref.var_angle * p * zeta2};
}

}  // namespace cbara
