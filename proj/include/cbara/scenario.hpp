#pragma once

#include "cbara/rng.hpp"
#include "cbara/types.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace cbara {

enum class ObjectKind { sensing_target, isac_user };

inline const char* to_string(ObjectKind kind) {
  return kind == ObjectKind::isac_user ? "isac_user" : "sensing_target";
}

/// Kinematic state in canonical order [x, y, vx, vy].
struct ObjectState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  ObjectKind kind = ObjectKind::sensing_target;

  [[nodiscard]] Vec4 vec() const { return Vec4(x, y, vx, vy); }

  static ObjectState from_vec(const Vec4& v, ObjectKind kind) {
    return ObjectState{v(0), v(1), v(2), v(3), kind};
  }

  [[nodiscard]] bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(vx) && std::isfinite(vy);
  }

  [[nodiscard]] Position position() const { return {x, y}; }

  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

/// CRLB calibration constants of the range, velocity and angle bounds.
struct CrlbConstants {
  double range = 1.0;
  double velocity = 1.0;
  double angle = 1.0;
};

/// Full description of one experiment.
///
/// Per-object process-noise levels live next to the initial states; weights
/// of the two objective terms (`w_sensing`, `w_comm`) default to traces in
/// squared metres and rates in Mbit/s.
struct ScenarioConfig {
  std::string name = "unnamed";

  int K = 0;
  int Q = 0;
  int I = 0;
  std::vector<Position> bs_positions;
  std::vector<ObjectState> initial_states;
  std::vector<double> sigma_m;

  double T_s = 0.5;
  int N = 30;

  double P_total = 30.0;
  double B_total = 65e6;
  std::array<double, 2> p_bounds{0.05, 0.85};
  std::array<double, 2> b_bounds{0.05, 0.85};
  int L_min = 2;
  int L_max = 3;

  double eta = 0.7;
  double delta_t = 1.0;
  double phi = 0.1;
  CrlbConstants beta;

  double sigma_c2 = 3.1622776601683795e-18;  // -145 dBm/Hz in W/Hz
  double sigma_r2 = 1e-12;
  double f_c = 3e9;
  int N_t = 32;
  int N_r = 32;
  int N_r_user = 2;
  double rcs = 1.0;
  double sensing_pathloss_c0 = 1.0;

  double ao_epsilon = 1e-4;
  std::uint64_t seed = 1;
  int trials = 50;

  double init_sigma_pos = 5.0;
  double init_sigma_vel = 2.0;
  double w_sensing = 1.0;
  double w_comm = 1e-6;
  double exhaustive_cap = 1e5;

  [[nodiscard]] int M() const { return Q + I; }
  [[nodiscard]] double P_min() const { return p_bounds[0] * P_total; }
  [[nodiscard]] double P_max() const { return p_bounds[1] * P_total; }
  [[nodiscard]] double B_min() const { return b_bounds[0] * B_total; }
  [[nodiscard]] double B_max() const { return b_bounds[1] * B_total; }

  [[nodiscard]] std::vector<int> user_indices() const {
    std::vector<int> out;
    for (std::size_t m = 0; m < initial_states.size(); ++m) {
      if (initial_states[m].kind == ObjectKind::isac_user) out.push_back(static_cast<int>(m));
    }
    return out;
  }

  /// Throws ConfigError naming the first offending field.
  void validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
      throw ConfigError("invalid '" + field + "': " + why);
    };
    if (K < 1) fail("K", "need at least one base station");
    if (Q < 0) fail("Q", "must be >= 0");
    if (I < 0) fail("I", "must be >= 0");
    if (M() < 1) fail("Q", "Q + I must be >= 1");
    if (static_cast<int>(bs_positions.size()) != K)
      fail("K", "declares " + std::to_string(K) + " BSs but " +
                    std::to_string(bs_positions.size()) + " [bs] blocks given");
    if (static_cast<int>(initial_states.size()) != M())
      fail("Q", "Q + I = " + std::to_string(M()) + " but " +
                    std::to_string(initial_states.size()) + " [object] blocks given");
    if (sigma_m.size() != initial_states.size()) fail("sigma_m", "one value per object required");
    int users = 0;
    for (std::size_t m = 0; m < initial_states.size(); ++m) {
      if (!initial_states[m].finite()) fail("object", "non-finite state for object " + std::to_string(m));
      if (!(sigma_m[m] >= 0.0)) fail("sigma_m", "must be >= 0");
      users += initial_states[m].kind == ObjectKind::isac_user ? 1 : 0;
    }
    if (users != I) fail("I", "declares " + std::to_string(I) + " ISAC users but objects list " + std::to_string(users));
    if (!(T_s > 0.0)) fail("T_s", "must be > 0");
    if (N < 1) fail("N", "must be >= 1");
    if (!(P_total > 0.0)) fail("P_total_w", "must be > 0");
    if (!(B_total > 0.0)) fail("B_total_hz", "must be > 0");
    auto check_fracs = [&](const std::array<double, 2>& f, const std::string& lo, const std::string& hi) {
      if (!(f[0] > 0.0)) fail(lo, "must be > 0");
      if (!(f[1] <= 1.0)) fail(hi, "must be <= 1");
      if (!(f[0] <= f[1])) fail(lo, "must not exceed " + hi);
    };
    check_fracs(p_bounds, "p_frac_min", "p_frac_max");
    check_fracs(b_bounds, "b_frac_min", "b_frac_max");
    if (L_min < 1) fail("L_min", "must be >= 1");
    if (L_min > L_max) fail("L_min", "exceeds L_max");
    if (L_max > K) fail("L_max", "exceeds K");
    if (L_min * p_bounds[0] > 1.0) fail("p_frac_min", "L_min * p_frac_min exceeds 1");
    if (L_min * b_bounds[0] > 1.0) fail("b_frac_min", "L_min * b_frac_min exceeds 1");
    if (!(eta > 0.0 && eta < 1.0)) fail("eta", "must lie in (0, 1)");
    if (!(delta_t >= 1.0)) fail("delta_t", "must be >= 1");
    if (!(phi > 0.0 && phi < 1.0)) fail("phi", "must lie in (0, 1)");
    if (!(beta.range > 0.0)) fail("beta1", "must be > 0");
    if (!(beta.velocity > 0.0)) fail("beta2", "must be > 0");
    if (!(beta.angle > 0.0)) fail("beta3", "must be > 0");
    if (!(sigma_c2 > 0.0)) fail("sigma_c2_dbm_per_hz", "noise density must be positive");
    if (!(sigma_r2 > 0.0)) fail("sigma_r2_w", "must be > 0");
    if (!(f_c > 0.0)) fail("f_c_hz", "must be > 0");
    if (N_t < 1) fail("N_t", "must be >= 1");
    if (N_r < 1) fail("N_r", "must be >= 1");
    if (N_r_user < 1) fail("N_r_user", "must be >= 1");
    if (!(rcs >= 0.0)) fail("rcs_m2", "must be >= 0");
    if (!(sensing_pathloss_c0 > 0.0)) fail("sensing_pathloss_c0", "must be > 0");
    if (!(ao_epsilon > 0.0)) fail("ao_epsilon", "must be > 0");
    if (trials < 1) fail("trials", "must be >= 1");
    if (!(init_sigma_pos > 0.0)) fail("init_sigma_pos_m", "must be > 0");
    if (!(init_sigma_vel > 0.0)) fail("init_sigma_vel_mps", "must be > 0");
    if (!(w_sensing >= 0.0)) fail("w_sensing", "must be >= 0");
    if (!(w_comm >= 0.0)) fail("w_comm", "must be >= 0");
  }
};

namespace detail {

// Canonical [x, y, vx, vy] -> interleaved [x, vx, y, vy].
inline Mat4 interleave_permutation() {
  Mat4 perm = Mat4::Zero();
  perm(0, 0) = 1.0;
  perm(1, 2) = 1.0;
  perm(2, 1) = 1.0;
  perm(3, 3) = 1.0;
  return perm;
}

inline Mat4 kron_i2(const Eigen::Matrix2d& block) {
  Mat4 out = Mat4::Zero();
  out.block<2, 2>(0, 0) = block;
  out.block<2, 2>(2, 2) = block;
  return out;
}

}  // namespace detail

/// Constant-velocity transition in canonical ordering.
///
/// Built as I2 (x) [[1, T], [0, 1]] on the interleaved ordering and then
/// conjugated by the fixed permutation.
inline Mat4 transition_matrix(double T_s) {
  if (!(T_s > 0.0)) throw InvalidArgument("transition_matrix: T_s must be > 0");
  Eigen::Matrix2d block;
  block << 1.0, T_s, 0.0, 1.0;
  const Mat4 perm = detail::interleave_permutation();
  return perm.transpose() * detail::kron_i2(block) * perm;
}

/// Process-noise covariance of the constant-velocity model.
inline Mat4 process_noise_cov(double sigma_m, double T_s) {
  if (!(sigma_m >= 0.0)) throw InvalidArgument("process_noise_cov: sigma_m must be >= 0");
  if (!(T_s > 0.0)) throw InvalidArgument("process_noise_cov: T_s must be > 0");
  Eigen::Matrix2d block;
  block << T_s * T_s * T_s / 3.0, T_s * T_s / 2.0, T_s * T_s / 2.0, T_s;
  const Mat4 perm = detail::interleave_permutation();
  return perm.transpose() * (sigma_m * detail::kron_i2(block)) * perm;
}

inline ObjectState propagate_state(const ObjectState& state, double T_s, const Vec4& noise = Vec4::Zero()) {
  if (!state.finite()) throw InvalidArgument("propagate_state: non-finite state");
  return ObjectState::from_vec(transition_matrix(T_s) * state.vec() + noise, state.kind);
}

/// Ground-truth trajectory, indexed states[slot][object].
struct Trajectory {
  std::vector<std::vector<ObjectState>> states;
  bool noisy = false;
};

/// Draws N slots of constant-velocity motion; slot 0 is the initial state.
inline Trajectory generate_trajectory(const ScenarioConfig& config, Rng& rng) {
  const std::size_t M = config.initial_states.size();
  std::vector<Mat4> noise_factor(M, Mat4::Zero());
  bool noisy = false;
  for (std::size_t m = 0; m < M; ++m) {
    if (config.sigma_m[m] > 0.0) {
      noise_factor[m] = process_noise_cov(config.sigma_m[m], config.T_s).llt().matrixL();
      noisy = true;
    }
  }
  Trajectory traj;
  traj.noisy = noisy;
  traj.states.reserve(static_cast<std::size_t>(config.N));
  traj.states.push_back(config.initial_states);
  for (int n = 1; n < config.N; ++n) {
    const auto& prev = traj.states.back();
    std::vector<ObjectState> next;
    next.reserve(M);
    for (std::size_t m = 0; m < M; ++m) {
      Vec4 noise = Vec4::Zero();
      if (config.sigma_m[m] > 0.0) {
        Vec4 white;
        for (int j = 0; j < 4; ++j) white(j) = rng.normal();
        noise = noise_factor[m] * white;
      }
      next.push_back(propagate_state(prev[m], config.T_s, noise));
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

}  // namespace cbara
