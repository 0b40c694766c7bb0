#pragma once

#include "cbara/estimation.hpp"
#include "cbara/objective.hpp"
#include "cbara/rng.hpp"
#include "cbara/scenario.hpp"
#include "cbara/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace cbara {

/// A solver failure inside a mission, tagged with the slot it happened in.
class MissionError : public Error {
 public:
  MissionError(int slot, const std::string& what)
      : Error("slot " + std::to_string(slot) + ": " + what), slot_(slot) {}
  [[nodiscard]] int slot() const { return slot_; }

 private:
  int slot_;
};

struct SlotRecord {
  int slot = 0;
  AssignmentMatrix U;
  MatX P;
  MatX B;
  double objective = 0.0;
  std::vector<double> pcrlb;      // per object
  std::vector<double> rate_mbps;  // per ISAC user
  int ao_iterations = 0;
  long solve_count = 0;
  double wall_seconds = 0.0;

  [[nodiscard]] double pcrlb_sum() const {
    double s = 0.0;
    for (double v : pcrlb) s += v;
    return s;
  }
  [[nodiscard]] double rate_mbps_sum() const {
    double s = 0.0;
    for (double v : rate_mbps) s += v;
    return s;
  }
};

struct MissionRecord {
  std::string scheme;
  double eta = 0.0;
  double delta_t = 1.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<SlotRecord> slots;
  std::vector<std::vector<double>> trace_per_slot;  // AO objective traces
  double wall_seconds = 0.0;

  [[nodiscard]] double mean_objective() const {
    double s = 0.0;
    for (const auto& r : slots) s += r.objective;
    return slots.empty() ? 0.0 : s / static_cast<double>(slots.size());
  }
  [[nodiscard]] double mean_pcrlb_sum() const {
    double s = 0.0;
    for (const auto& r : slots) s += r.pcrlb_sum();
    return slots.empty() ? 0.0 : s / static_cast<double>(slots.size());
  }
  [[nodiscard]] double mean_rate_mbps() const {
    double s = 0.0;
    for (const auto& r : slots) s += r.rate_mbps_sum();
    return slots.empty() ? 0.0 : s / static_cast<double>(slots.size());
  }
};

/// Plays one mission: ground truth with process noise, then per slot the
/// zero-noise prediction, the scheme's solve and the FIM update with the
/// chosen allocation. Slot 0 uses the known initial states as prediction.
inline MissionRecord run_mission(const ScenarioConfig& config, Scheme scheme, Rng rng, int trial = 0,
                                 const AoOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  MissionRecord rec;
  rec.scheme = to_string(scheme);
  rec.eta = config.eta;
  rec.delta_t = config.delta_t;
  rec.trial = trial;
  rec.seed = rng.seed();

  const auto truth = generate_trajectory(config, rng);
  const int M = config.M();
  std::vector<FimState> fims(static_cast<std::size_t>(M), initial_fim(config));
  for (int n = 0; n < config.N; ++n) {
    const auto ts = clock::now();
    std::vector<ObjectState> predicted;
    predicted.reserve(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
      const auto& s = n == 0 ? truth.states[0][static_cast<std::size_t>(m)]
                             : predict_state(truth.states[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(m)], config.T_s);
      predicted.push_back(s);
    }
    SlotRecord slot;
    slot.slot = n;
    try {
      const auto ctx = make_slot_context(config, fims, predicted);
      const auto res = solve_scheme(scheme, ctx, opt);
      for (int m = 0; m < M; ++m) {
        const auto u = res.U.row(m);
        std::vector<double> p(static_cast<std::size_t>(config.K)), b(static_cast<std::size_t>(config.K));
        for (int k = 0; k < config.K; ++k) {
          p[static_cast<std::size_t>(k)] = res.alloc.P(m, k);
          b[static_cast<std::size_t>(k)] = res.alloc.B(m, k);
        }
        fims[static_cast<std::size_t>(m)] =
            posterior_fim(fims[static_cast<std::size_t>(m)], predicted[static_cast<std::size_t>(m)], u, p, b,
                          config.sigma_m[static_cast<std::size_t>(m)], config);
      }
      slot.U = res.U;
      slot.P = res.alloc.P;
      slot.B = res.alloc.B;
      slot.objective = res.objective;
      slot.pcrlb = res.pcrlb;
      for (double r : res.rate_bps) slot.rate_mbps.push_back(r * 1e-6);
      slot.ao_iterations = res.ao_iterations;
      slot.solve_count = res.solve_count;
      rec.trace_per_slot.push_back(res.trace);
    } catch (const MissionError&) {
      throw;
    } catch (const Error& e) {
      throw MissionError(n, e.what());
    }
    slot.wall_seconds = std::chrono::duration<double>(clock::now() - ts).count();
    rec.slots.push_back(std::move(slot));
  }
  rec.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return rec;
}

/// Worker count: CBARA_THREADS if set and positive, else hardware threads.
inline int worker_threads(int jobs) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CBARA_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) n = v;
  }
  return std::max(1, std::min(n, jobs));
}

/// Runs fn(i) for i in [0, jobs) on a small pool of threads.
template <class Fn>
void parallel_for(int jobs, Fn&& fn) {
  const int workers = worker_threads(jobs);
  if (workers <= 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < jobs; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct TrialFailure {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct MonteCarloResult {
  std::string scheme;
  std::vector<MissionRecord> trials;  // successful trials, ordered by trial index
  std::vector<TrialFailure> failures;
  std::vector<SlotRecord> mean;       // per-slot means over successful trials

  [[nodiscard]] double mean_objective() const { return average([](const MissionRecord& r) { return r.mean_objective(); }); }
  [[nodiscard]] double mean_pcrlb_sum() const { return average([](const MissionRecord& r) { return r.mean_pcrlb_sum(); }); }
  [[nodiscard]] double mean_rate_mbps() const { return average([](const MissionRecord& r) { return r.mean_rate_mbps(); }); }

  template <class Fn>
  [[nodiscard]] double average(Fn&& fn) const {
    if (trials.empty()) return 0.0;
    double s = 0.0;
    for (const auto& t : trials) s += fn(t);
    return s / static_cast<double>(trials.size());
  }
};

/// Per-slot means of every numeric field. U entries become the fraction of
/// trials in which the link was assigned.
inline std::vector<SlotRecord> aggregate_slots(const std::vector<MissionRecord>& trials) {
  std::vector<SlotRecord> mean;
  if (trials.empty()) return mean;
  const double inv = 1.0 / static_cast<double>(trials.size());
  const auto& first = trials.front().slots;
  for (std::size_t n = 0; n < first.size(); ++n) {
    SlotRecord acc;
    acc.slot = first[n].slot;
    acc.P = MatX::Zero(first[n].P.rows(), first[n].P.cols());
    acc.B = acc.P;
    MatX u = acc.P;
    acc.pcrlb.assign(first[n].pcrlb.size(), 0.0);
    acc.rate_mbps.assign(first[n].rate_mbps.size(), 0.0);
    double ao = 0.0, solves = 0.0;
    for (const auto& t : trials) {
      const auto& s = t.slots.at(n);
      acc.P += s.P * inv;
      acc.B += s.B * inv;
      u += s.U.matrix().cast<double>() * inv;
      acc.objective += s.objective * inv;
      for (std::size_t m = 0; m < acc.pcrlb.size(); ++m) acc.pcrlb[m] += s.pcrlb[m] * inv;
      for (std::size_t i = 0; i < acc.rate_mbps.size(); ++i) acc.rate_mbps[i] += s.rate_mbps[i] * inv;
      ao += s.ao_iterations * inv;
      solves += static_cast<double>(s.solve_count) * inv;
      acc.wall_seconds += s.wall_seconds * inv;
    }
    // Majority assignment; the exact frequency is recoverable from the trials.
    acc.U = AssignmentMatrix((u.array() >= 0.5).cast<int>().matrix());
    acc.ao_iterations = static_cast<int>(std::lround(ao));
    acc.solve_count = std::lround(solves);
    mean.push_back(std::move(acc));
  }
  return mean;
}

/// Independent trials of one scheme; trial t draws from Rng(seed).split(t).
inline MonteCarloResult monte_carlo(const ScenarioConfig& config, Scheme scheme, const AoOptions& opt = {}) {
  MonteCarloResult out;
  out.scheme = to_string(scheme);
  const int trials = config.trials;
  std::vector<std::optional<MissionRecord>> done(static_cast<std::size_t>(trials));
  std::vector<std::optional<TrialFailure>> failed(static_cast<std::size_t>(trials));
  const Rng root(config.seed);
  parallel_for(trials, [&](int t) {
    const Rng rng = root.split(static_cast<std::uint64_t>(t));
    try {
      done[static_cast<std::size_t>(t)] = run_mission(config, scheme, rng, t, opt);
    } catch (const Error& e) {
      failed[static_cast<std::size_t>(t)] = TrialFailure{t, rng.seed(), e.what()};
    }
  });
  for (int t = 0; t < trials; ++t) {
    if (done[static_cast<std::size_t>(t)]) out.trials.push_back(std::move(*done[static_cast<std::size_t>(t)]));
    if (failed[static_cast<std::size_t>(t)]) out.failures.push_back(*failed[static_cast<std::size_t>(t)]);
  }
  out.mean = aggregate_slots(out.trials);
  return out;
}

}  // namespace cbara
