// Sweeps the trade-off factor for cbara on the bundled scenario and prints
// the mission-averaged sensing and communication metrics.

#include "cbara/cbara.hpp"

#include <cstdio>

int main(int argc, char** argv) {
  using namespace cbara;
  auto cfg = load_scenario("paper_fig2");
  cfg.trials = argc > 1 ? std::atoi(argv[1]) : 5;
  const auto rows = sweep_eta(cfg, {Scheme::cbara}, parse_range("0.05:0.95:0.1"), {cfg.delta_t});
  std::printf("%6s %12s %14s %12s\n", "eta", "F", "PCRLB sum", "rate Mbit/s");
  for (const auto& r : rows)
    std::printf("%6.2f %12.4f %14.4f %12.2f\n", r.key, r.mean_objective, r.mean_pcrlb_sum, r.mean_rate_mbps);
}
