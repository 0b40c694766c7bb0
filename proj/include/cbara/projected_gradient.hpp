#pragma once

#include "cbara/projection.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace cbara {

struct PgOptions {
  double tolerance = 1e-6;  // scaled by (1 + |f|)
  int max_iterations = 5000;
  double armijo = 1e-4;
  double step_min = 1e-12;
  double step_max = 1e12;
};

struct PgResult {
  VecX x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double stationarity = 0.0;  // ||P(x - g) - x||_inf
  bool converged = false;
};

/// Spectral projected gradient with monotone Armijo backtracking on a
/// product of box-truncated simplices.
///
/// `fn(x, grad)` returns f(x) and fills grad. The start point is projected
/// first; every accepted step satisfies the Armijo condition, so the
/// returned value never exceeds f(P(x0)).
template <class Fn>
PgResult projected_gradient(Fn&& fn, const VecX& x0, std::span<const SimplexGroup> groups,
                            const PgOptions& opt = {}) {
  PgResult res;
  const Eigen::Index n = x0.size();
  VecX x(n), g(n), trial(n), g_trial(n), y(n), d(n);
  project_groups(x0, groups, x);
  double f = fn(x, g);
  ++res.evaluations;

  auto stationarity = [&](const VecX& at, const VecX& grad) {
    project_groups(at - grad, groups, y);
    return (y - at).lpNorm<Eigen::Infinity>();
  };

  double alpha = 1.0;
  {
    const double r0 = stationarity(x, g);
    if (r0 > 0.0) alpha = std::clamp(1.0 / g.lpNorm<Eigen::Infinity>(), opt.step_min, opt.step_max);
  }

  for (;;) {
    res.stationarity = stationarity(x, g);
    if (res.stationarity <= opt.tolerance * (1.0 + std::abs(f))) {
      res.converged = true;
      break;
    }
    if (res.iterations >= opt.max_iterations) break;
    ++res.iterations;

    project_groups(x - alpha * g, groups, y);
    d = y - x;
    const double slope = g.dot(d);
    if (!(slope < 0.0)) break;  // no descent direction left at working precision

    double lambda = 1.0;
    double f_trial = 0.0;
    bool accepted = false;
    while (lambda > 1e-20) {
      trial = x + lambda * d;
      f_trial = fn(trial, g_trial);
      ++res.evaluations;
      if (f_trial <= f + opt.armijo * lambda * slope) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;

    const VecX s = trial - x;
    const VecX yk = g_trial - g;
    const double sty = s.dot(yk);
    alpha = sty > 0.0 ? std::clamp(s.squaredNorm() / sty, opt.step_min, opt.step_max) : opt.step_max;
    x = trial;
    g = g_trial;
    f = f_trial;
  }
  // Clean up round-off from the line search so bounds hold exactly.
  project_groups(x, groups, y);
  res.x = y;
  res.value = fn(res.x, g);
  ++res.evaluations;
  return res;
}

}  // namespace cbara
