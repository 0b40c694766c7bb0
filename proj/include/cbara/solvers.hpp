#pragma once

#include "cbara/allocation.hpp"
#include "cbara/objective.hpp"
#include "cbara/projected_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cbara {

struct SubproblemResult {
  MatX X;  // the optimized matrix (P or B)
  double objective = 0.0;
  int iterations = 0;
  double stationarity = 0.0;
  bool converged = false;
};

struct AoOptions {
  int max_iterations = 100;
  PgOptions pg;
};

namespace detail {

inline std::vector<std::pair<int, int>> support(const AssignmentMatrix& U) {
  std::vector<std::pair<int, int>> out;
  for (int m = 0; m < U.objects(); ++m)
    for (int k = 0; k < U.stations(); ++k)
      if (U(m, k)) out.emplace_back(m, k);
  return out;
}

inline void require_power_feasible(const AssignmentMatrix& U, const ScenarioConfig& c) {
  std::string bad;
  for (int k = 0; k < U.stations(); ++k) {
    const int n = U.column_count(k);
    if (n == 0) continue;
    if (n * c.P_min() > c.P_total * (1 + 1e-12) || n * c.P_max() < c.P_total * (1 - 1e-12))
      bad += (bad.empty() ? "" : ", ") + std::string("BS ") + std::to_string(k) + " (" + std::to_string(n) + " objects)";
  }
  if (!bad.empty()) throw InfeasibleError("power subproblem infeasible: " + bad);
}

inline void require_bandwidth_feasible(const AssignmentMatrix& U, const ScenarioConfig& c) {
  const int n = U.links();
  if (n * c.B_min() > c.B_total * (1 + 1e-12) || n * c.B_max() < c.B_total * (1 - 1e-12))
    throw InfeasibleError("bandwidth subproblem infeasible: " + std::to_string(n) + " assigned links");
}

}  // namespace detail

/// True if both resource subproblems have a nonempty feasible set under U.
inline bool resources_feasible(const AssignmentMatrix& U, const ScenarioConfig& c) {
  try {
    detail::require_power_feasible(U, c);
    detail::require_bandwidth_feasible(U, c);
  } catch (const InfeasibleError&) {
    return false;
  }
  return true;
}

/// Minimizes the objective over P with B fixed. Each BS in use carries a
/// box-truncated simplex constraint on its column; variables are scaled to
/// fractions of P_total internally. `start` warm-starts the iteration.
inline SubproblemResult solve_power_subproblem(const SlotContext& ctx, const AssignmentMatrix& U, const MatX& B,
                                               const MatX* start = nullptr, const PgOptions& opt = {}) {
  const auto& c = ctx.config;
  detail::require_power_feasible(U, c);
  const auto links = detail::support(U);
  const int n = static_cast<int>(links.size());
  std::vector<SimplexGroup> groups;
  for (int k = 0; k < U.stations(); ++k) {
    SimplexGroup g{{}, c.p_bounds[0], c.p_bounds[1], 1.0, "power at BS " + std::to_string(k)};
    for (int i = 0; i < n; ++i)
      if (links[static_cast<std::size_t>(i)].second == k) g.index.push_back(i);
    if (!g.index.empty()) groups.push_back(std::move(g));
  }

  VecX x0(n);
  const MatX P0 = start ? *start : uniform_allocation(U, c.P_total, c.B_total).P;
  for (int i = 0; i < n; ++i) x0(i) = P0(links[static_cast<std::size_t>(i)].first, links[static_cast<std::size_t>(i)].second) / c.P_total;

  MatX P = MatX::Zero(U.objects(), U.stations());
  ObjectiveGradient grad;
  auto fn = [&](const VecX& x, VecX& g) {
    for (int i = 0; i < n; ++i) P(links[static_cast<std::size_t>(i)].first, links[static_cast<std::size_t>(i)].second) = x(i) * c.P_total;
    const double f = objective_with_gradient(ctx, U, P, B, grad);
    g.resize(n);
    for (int i = 0; i < n; ++i) g(i) = grad.dP(links[static_cast<std::size_t>(i)].first, links[static_cast<std::size_t>(i)].second) * c.P_total;
    return f;
  };
  const auto r = projected_gradient(fn, x0, groups, opt);
  SubproblemResult out{MatX::Zero(U.objects(), U.stations()), r.value, r.iterations, r.stationarity, r.converged};
  for (int i = 0; i < n; ++i) out.X(links[static_cast<std::size_t>(i)].first, links[static_cast<std::size_t>(i)].second) = r.x(i) * c.P_total;
  return out;
}

/// Minimizes the objective over B with P fixed, on the single global
/// box-truncated simplex of all assigned links.
inline SubproblemResult solve_bandwidth_subproblem(const SlotContext& ctx, const AssignmentMatrix& U, const MatX& P,
                                                   const MatX* start = nullptr, const PgOptions& opt = {}) {
  const auto& c = ctx.config;
  detail::require_bandwidth_feasible(U, c);
  const auto links = detail::support(U);
  const int n = static_cast<int>(links.size());
  std::vector<SimplexGroup> groups(1);
  groups[0] = {{}, c.b_bounds[0], c.b_bounds[1], 1.0, "total bandwidth"};
  groups[0].index.resize(static_cast<std::size_t>(n));
  std::iota(groups[0].index.begin(), groups[0].index.end(), 0);

  VecX x0(n);
  const MatX B0 = start ? *start : uniform_allocation(U, c.P_total, c.B_total).B;
  for (int i = 0; i < n; ++i) x0(i) = B0(links[static_cast<std::size_t>(i)].first, links[static_cast<std::size_t>(i)].second) / c.B_total;

  MatX B = MatX::Zero(U.objects(), U.stations());
  ObjectiveGradient grad;
  auto fn = [&](const VecX& x, VecX& g) {
    for (int i = 0; i < n; ++i) B(links[static_cast<std::size_t>(i)].first, links[static_cast<std::size_t>(i)].second) = x(i) * c.B_total;
    const double f = objective_with_gradient(ctx, U, P, B, grad);
    g.resize(n);
    for (int i = 0; i < n; ++i) g(i) = grad.dB(links[static_cast<std::size_t>(i)].first, links[static_cast<std::size_t>(i)].second) * c.B_total;
    return f;
  };
  const auto r = projected_gradient(fn, x0, groups, opt);
  SubproblemResult out{MatX::Zero(U.objects(), U.stations()), r.value, r.iterations, r.stationarity, r.converged};
  for (int i = 0; i < n; ++i) out.X(links[static_cast<std::size_t>(i)].first, links[static_cast<std::size_t>(i)].second) = r.x(i) * c.B_total;
  return out;
}

/// Threshold selection on a power-ratio matrix.
///
/// Keeps the links whose ratio exceeds phi, tops a row up to L_min with the
/// strongest unselected BSs and trims it to the L_max strongest. Ties go to
/// the lower BS index.
inline AssignmentMatrix select_by_threshold(const MatX& ratio, double phi, int L_min, int L_max) {
  const int M = static_cast<int>(ratio.rows());
  const int K = static_cast<int>(ratio.cols());
  AssignmentMatrix U(M, K);
  for (int m = 0; m < M; ++m) {
    std::vector<int> order(static_cast<std::size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ratio(m, a) > ratio(m, b); });
    int selected = 0;
    for (int k = 0; k < K; ++k) selected += ratio(m, k) > phi ? 1 : 0;
    const int keep = std::clamp(selected, L_min, L_max);
    // The strongest `keep` BSs are exactly: all above-threshold ones (when
    // within bounds), topped up or trimmed by rank.
    for (int i = 0; i < keep; ++i) U.set(m, order[static_cast<std::size_t>(i)], true);
  }
  return U;
}

/// Makes every used BS column power-feasible (n P_min <= P_total <= n P_max)
/// by adding the strongest eligible link to under-populated columns or
/// dropping the weakest eligible link from over-populated ones, while keeping
/// row cardinalities within [L_min, L_max].
inline void repair_power_feasibility(AssignmentMatrix& U, const MatX& ratio, const ScenarioConfig& c) {
  const int M = U.objects();
  const int K = U.stations();
  for (int guard = 0; guard < M * K + 1; ++guard) {
    bool changed = false;
    for (int k = 0; k < K && !changed; ++k) {
      const int n = U.column_count(k);
      if (n == 0) continue;
      const bool too_few = n * c.P_max() < c.P_total * (1 - 1e-12);
      const bool too_many = n * c.P_min() > c.P_total * (1 + 1e-12);
      if (!too_few && !too_many) continue;
      int best = -1;
      if (too_few) {
        for (int m = 0; m < M; ++m)
          if (!U(m, k) && U.row_count(m) < c.L_max && (best < 0 || ratio(m, k) > ratio(best, k))) best = m;
        if (best >= 0) {
          U.set(best, k, true);
          changed = true;
          continue;
        }
      }
      for (int m = 0; m < M; ++m)
        if (U(m, k) && U.row_count(m) > c.L_min && (best < 0 || ratio(m, k) < ratio(best, k))) best = m;
      if (best >= 0) {
        U.set(best, k, false);
        changed = true;
      }
    }
    if (!changed) break;
  }
}

struct HeuristicResult {
  AssignmentMatrix U;
  MatX power_ratio;
  SubproblemResult full_power;  // the all-BS power solve
};

/// Heuristic BS assignment: one power solve with every BS serving every
/// object and bandwidth split evenly, then threshold selection.
inline HeuristicResult heuristic_assignment(const SlotContext& ctx, const PgOptions& opt = {}) {
  const auto& c = ctx.config;
  const int M = ctx.M();
  const int K = ctx.K();
  const auto all = AssignmentMatrix::all_ones(M, K);
  const MatX B_uni = MatX::Constant(M, K, c.B_total / (static_cast<double>(M) * K));
  HeuristicResult h;
  h.full_power = solve_power_subproblem(ctx, all, B_uni, nullptr, opt);
  h.power_ratio = h.full_power.X / c.P_total;
  h.U = select_by_threshold(h.power_ratio, c.phi, c.L_min, c.L_max);
  repair_power_feasibility(h.U, h.power_ratio, c);
  return h;
}

struct SolveResult {
  std::string scheme;
  AssignmentMatrix U;
  AllocationPair alloc;
  double objective = 0.0;
  std::vector<double> pcrlb;     // per object
  std::vector<double> rate_bps;  // per ISAC user
  int ao_iterations = 0;
  long solve_count = 0;
  std::vector<double> trace;     // objective after initialization and after each AO iteration
  bool hit_iteration_cap = false;
  long enumerated = 0;
  long skipped_infeasible = 0;
};

inline void fill_metrics(const SlotContext& ctx, SolveResult& r) {
  const auto e = evaluate_objective(ctx, r.U, r.alloc.P, r.alloc.B);
  r.objective = e.value;
  r.pcrlb = e.pcrlb;
  r.rate_bps = e.rate_bps;
}

/// Alternating optimization of P and B for a fixed assignment.
///
/// Starts from `start` if given, else from the uniform split on the support
/// of U. Each iteration solves the power subproblem then the bandwidth
/// subproblem, both warm-started, and stops once the objective changes by
/// at most ao_epsilon * max(1, |F|).
inline SolveResult alternating_optimize(const SlotContext& ctx, const AssignmentMatrix& U,
                                        const AllocationPair* start = nullptr, const AoOptions& opt = {}) {
  const auto& c = ctx.config;
  U.check_cardinality(c.L_min, c.L_max);
  detail::require_power_feasible(U, c);
  detail::require_bandwidth_feasible(U, c);

  SolveResult r;
  r.scheme = "ao";
  r.U = U;
  r.alloc = start ? *start : uniform_allocation(U, c.P_total, c.B_total);
  double f_prev = objective_value(ctx, U, r.alloc.P, r.alloc.B);
  r.trace.push_back(f_prev);
  for (;;) {
    if (r.ao_iterations >= opt.max_iterations) {
      r.hit_iteration_cap = true;
      break;
    }
    ++r.ao_iterations;
    r.alloc.P = solve_power_subproblem(ctx, U, r.alloc.B, &r.alloc.P, opt.pg).X;
    const auto bw = solve_bandwidth_subproblem(ctx, U, r.alloc.P, &r.alloc.B, opt.pg);
    r.alloc.B = bw.X;
    const double f = bw.objective;
    r.trace.push_back(f);
    const bool done = std::abs(f - f_prev) <= c.ao_epsilon * std::max(1.0, std::abs(f));
    f_prev = f;
    if (done) break;
  }
  r.solve_count = 2L * r.ao_iterations;
  fill_metrics(ctx, r);
  return r;
}

enum class Scheme { cbara, exhaustive, bench1, bench2, bench3 };

inline constexpr std::string_view kSchemeNames = "cbara, exhaustive, bench1, bench2, bench3";

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::cbara: return "cbara";
    case Scheme::exhaustive: return "exhaustive";
    case Scheme::bench1: return "bench1";
    case Scheme::bench2: return "bench2";
    case Scheme::bench3: return "bench3";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::cbara, Scheme::exhaustive, Scheme::bench1, Scheme::bench2, Scheme::bench3})
    if (name == to_string(s)) return s;
  throw ConfigError("unknown scheme '" + std::string(name) + "'; valid schemes: " + std::string(kSchemeNames));
}

/// Heuristic assignment followed by alternating optimization; the power
/// solve inside the heuristic makes the solve count 2l + 1.
inline SolveResult cbara_solve(const SlotContext& ctx, const AoOptions& opt = {}) {
  const auto h = heuristic_assignment(ctx, opt.pg);
  auto r = alternating_optimize(ctx, h.U, nullptr, opt);
  r.scheme = "cbara";
  r.solve_count = 2L * r.ao_iterations + 1;
  return r;
}

/// Runs alternating optimization on every assignment whose rows have
/// cardinality in [L_min, L_max] and keeps the best. Assignments with an
/// empty resource set are counted in `skipped_infeasible`.
inline SolveResult exhaustive_solve(const SlotContext& ctx, const AoOptions& opt = {}) {
  const auto& c = ctx.config;
  const int M = ctx.M();
  const int K = ctx.K();
  const double count = assignment_count(M, K, c.L_min, c.L_max);
  if (count > c.exhaustive_cap)
    throw EnumerationCapError("exhaustive search refused: " + std::to_string(static_cast<long long>(count)) +
                              " assignments exceed cap " + std::to_string(static_cast<long long>(c.exhaustive_cap)));
  const auto options = assignment_row_options(K, c.L_min, c.L_max);
  const int per_row = static_cast<int>(options.size());
  std::vector<int> digit(static_cast<std::size_t>(M), 0);

  SolveResult best;
  bool have_best = false;
  long enumerated = 0;
  long skipped = 0;
  long solves = 0;
  for (;;) {
    AssignmentMatrix U(M, K);
    for (int m = 0; m < M; ++m)
      for (int k = 0; k < K; ++k) U.set(m, k, options[static_cast<std::size_t>(digit[static_cast<std::size_t>(m)])][static_cast<std::size_t>(k)] != 0);
    ++enumerated;
    if (resources_feasible(U, c)) {
      auto r = alternating_optimize(ctx, U, nullptr, opt);
      solves += r.solve_count;
      if (!have_best || r.objective < best.objective) {
        best = std::move(r);
        have_best = true;
      }
    } else {
      ++skipped;
    }
    int pos = M - 1;
    while (pos >= 0 && ++digit[static_cast<std::size_t>(pos)] == per_row) digit[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  if (!have_best) throw InfeasibleError("exhaustive search: no assignment admits a feasible allocation");
  best.scheme = "exhaustive";
  best.enumerated = enumerated;
  best.skipped_infeasible = skipped;
  best.solve_count = solves;
  return best;
}

inline SolveResult uniform_solve(const SlotContext& ctx, const AssignmentMatrix& U) {
  const auto& c = ctx.config;
  detail::require_power_feasible(U, c);
  detail::require_bandwidth_feasible(U, c);
  SolveResult r;
  r.U = U;
  r.alloc = uniform_allocation(U, c.P_total, c.B_total);
  fill_metrics(ctx, r);
  r.trace.push_back(r.objective);
  return r;
}

/// bench1: all BSs, uniform resources. bench2: all BSs, AO resources.
/// bench3: heuristic assignment, uniform resources.
inline SolveResult benchmark_solve(Scheme scheme, const SlotContext& ctx, const AoOptions& opt = {}) {
  const auto all = AssignmentMatrix::all_ones(ctx.M(), ctx.K());
  SolveResult r;
  switch (scheme) {
    case Scheme::bench1:
      r = uniform_solve(ctx, all);
      break;
    case Scheme::bench2:
      r = alternating_optimize(ctx, all, nullptr, opt);
      break;
    case Scheme::bench3:
      r = uniform_solve(ctx, heuristic_assignment(ctx, opt.pg).U);
      r.solve_count = 1;
      break;
    default:
      throw InvalidArgument("benchmark_solve: not a benchmark scheme");
  }
  r.scheme = to_string(scheme);
  return r;
}

inline SolveResult solve_scheme(Scheme scheme, const SlotContext& ctx, const AoOptions& opt = {}) {
  switch (scheme) {
    case Scheme::cbara: return cbara_solve(ctx, opt);
    case Scheme::exhaustive: return exhaustive_solve(ctx, opt);
    default: return benchmark_solve(scheme, ctx, opt);
  }
}

}  // namespace cbara
