#pragma once

#include "cbara/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace cbara {

/// Euclidean projection of y onto {x : sum x = total, lo <= x_i <= hi}.
///
/// The solution is x_i = clamp(y_i - tau, lo, hi). The sum is piecewise
/// linear and non-increasing in tau with kinks at y_i - hi and y_i - lo; the
/// kinks are sorted, the bracketing segment located, and tau solved for
/// exactly on that segment.
inline void project_capped_simplex(std::span<const double> y, double lo, double hi, double total,
                                   std::span<double> x) {
  const std::size_t n = y.size();
  if (n == 0) {
    if (total != 0.0) throw InfeasibleError("capped simplex: empty variable set with nonzero total");
    return;
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(total));
  if (static_cast<double>(n) * lo > total + slack || static_cast<double>(n) * hi < total - slack)
    throw InfeasibleError("capped simplex: " + std::to_string(n) + " variables in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] cannot sum to " + std::to_string(total));

  auto sum_at = [&](double tau) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::clamp(y[i] - tau, lo, hi);
    return s;
  };

  std::vector<double> knots;
  knots.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    knots.push_back(y[i] - hi);
    knots.push_back(y[i] - lo);
  }
  std::sort(knots.begin(), knots.end());

  // sum_at(knots.front()) == n*hi >= total, sum_at(knots.back()) == n*lo <= total.
  std::size_t a = 0;
  std::size_t b = knots.size() - 1;
  while (b - a > 1) {
    const std::size_t mid = (a + b) / 2;
    if (sum_at(knots[mid]) >= total) {
      a = mid;
    } else {
      b = mid;
    }
  }
  const double s_a = sum_at(knots[a]);
  const double s_b = sum_at(knots[b]);
  double tau = knots[a];
  if (s_a != s_b) tau = knots[a] + (s_a - total) * (knots[b] - knots[a]) / (s_a - s_b);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(y[i] - tau, lo, hi);
}

/// One block of variables constrained to a box-truncated simplex.
struct SimplexGroup {
  std::vector<int> index;  // positions in the flat variable vector
  double lo = 0.0;
  double hi = 1.0;
  double total = 1.0;
  std::string label;
};

inline void project_groups(const VecX& y, std::span<const SimplexGroup> groups, VecX& x) {
  x = y;
  std::vector<double> in, out;
  for (const auto& g : groups) {
    in.resize(g.index.size());
    out.resize(g.index.size());
    for (std::size_t i = 0; i < g.index.size(); ++i) in[i] = y(g.index[i]);
    try {
      project_capped_simplex(in, g.lo, g.hi, g.total, out);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError(g.label + ": " + e.what());
    }
    for (std::size_t i = 0; i < g.index.size(); ++i) x(g.index[i]) = out[i];
  }
}

}  // namespace cbara
