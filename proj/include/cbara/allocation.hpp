#pragma once

#include "cbara/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace cbara {

/// Binary M x K base-station assignment (row m = object, column k = BS).
class AssignmentMatrix {
 public:
  AssignmentMatrix() = default;
  AssignmentMatrix(int M, int K) : u_(Eigen::MatrixXi::Zero(M, K)) {}
  explicit AssignmentMatrix(Eigen::MatrixXi u) : u_(std::move(u)) {}

  static AssignmentMatrix all_ones(int M, int K) { return AssignmentMatrix(Eigen::MatrixXi::Ones(M, K)); }

  [[nodiscard]] int objects() const { return static_cast<int>(u_.rows()); }
  [[nodiscard]] int stations() const { return static_cast<int>(u_.cols()); }
  [[nodiscard]] bool operator()(int m, int k) const { return u_(m, k) != 0; }
  void set(int m, int k, bool on) { u_(m, k) = on ? 1 : 0; }

  [[nodiscard]] int row_count(int m) const { return u_.row(m).sum(); }
  [[nodiscard]] int column_count(int k) const { return u_.col(k).sum(); }
  [[nodiscard]] int links() const { return u_.sum(); }
  [[nodiscard]] const Eigen::MatrixXi& matrix() const { return u_; }

  [[nodiscard]] std::vector<int> row(int m) const {
    std::vector<int> out(static_cast<std::size_t>(stations()));
    for (int k = 0; k < stations(); ++k) out[static_cast<std::size_t>(k)] = u_(m, k);
    return out;
  }

  /// Throws ConstraintError if a row sum falls outside [L_min, L_max].
  void check_cardinality(int L_min, int L_max) const {
    for (int m = 0; m < objects(); ++m) {
      const int c = row_count(m);
      if (c < L_min || c > L_max)
        throw ConstraintError("assignment cardinality: object " + std::to_string(m) + " served by " +
                              std::to_string(c) + " BSs, allowed [" + std::to_string(L_min) + ", " +
                              std::to_string(L_max) + "]");
    }
  }

  friend bool operator==(const AssignmentMatrix& a, const AssignmentMatrix& b) {
    return a.u_.rows() == b.u_.rows() && a.u_.cols() == b.u_.cols() && a.u_ == b.u_;
  }

 private:
  Eigen::MatrixXi u_;
};

/// Power (W) and bandwidth (Hz) per object-BS link.
struct AllocationPair {
  MatX P;
  MatX B;
};

/// Every subset of {0..K-1} with size in [L_min, L_max], as 0/1 rows,
/// ordered by size and then lexicographically.
inline std::vector<std::vector<int>> assignment_row_options(int K, int L_min, int L_max) {
  std::vector<std::vector<int>> out;
  for (int L = L_min; L <= L_max; ++L) {
    std::vector<int> row(static_cast<std::size_t>(K), 0);
    std::fill(row.begin(), row.begin() + L, 1);
    // prev_permutation over a sorted-descending mask enumerates in lexicographic order of chosen indices.
    do {
      out.push_back(row);
    } while (std::prev_permutation(row.begin(), row.end()));
  }
  return out;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Number of assignments with every row cardinality in [L_min, L_max].
inline double assignment_count(int M, int K, int L_min, int L_max) {
  double per_row = 0.0;
  for (int L = L_min; L <= L_max; ++L) per_row += binomial(K, L);
  return std::pow(per_row, M);
}

}  // namespace cbara
