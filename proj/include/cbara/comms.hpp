#pragma once

#include "cbara/types.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace cbara {

struct RateReport {
  std::vector<double> rate_bps;          // one per ISAC user
  std::vector<std::vector<double>> snr;  // [user][bs], 0 on unassigned links
};

inline double link_snr(double p, double b, double varsigma, double sigma_c2) {
  if (!(b > 0.0)) throw InvalidArgument("link_snr: bandwidth must be > 0 on an assigned link");
  return p * varsigma / (b * sigma_c2);
}

/// b log2(1 + p varsigma / (b sigma_c2)) for one link; 0 in the b -> 0 limit.
inline double link_rate(double p, double b, double varsigma, double sigma_c2) {
  if (b <= 0.0) return 0.0;
  return b * std::log2(1.0 + p * varsigma / (b * sigma_c2));
}

/// Achievable rate of one ISAC user summed over its serving BSs, bit/s.
inline double user_rate(std::span<const int> u, std::span<const double> p, std::span<const double> b,
                        std::span<const double> varsigma, double sigma_c2) {
  double total = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] == 0) continue;
    total += link_rate(p[k], b[k], varsigma[k], sigma_c2);
  }
  return total;
}

/// Partial derivatives of one link's rate with respect to p and b.
struct RateGradient {
  double dp = 0.0;
  double db = 0.0;
};

inline RateGradient link_rate_gradient(double p, double b, double varsigma, double sigma_c2) {
  const double h = varsigma / sigma_c2;
  const double x = p * h / b;
  return {h / ((1.0 + x) * std::numbers::ln2), std::log2(1.0 + x) - x / ((1.0 + x) * std::numbers::ln2)};
}

}  // namespace cbara
