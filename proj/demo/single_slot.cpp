// Solves the first slot of the bundled scenario with every scheme and
// prints the chosen assignment and resources.

#include "cbara/cbara.hpp"

#include <cstdio>

int main() {
  using namespace cbara;
  const auto cfg = load_scenario("paper_fig2");
  std::vector<FimState> fims(static_cast<std::size_t>(cfg.M()), initial_fim(cfg));
  const auto ctx = make_slot_context(cfg, fims, cfg.initial_states);

  for (Scheme s : {Scheme::cbara, Scheme::exhaustive, Scheme::bench1, Scheme::bench2, Scheme::bench3}) {
    const auto r = solve_scheme(s, ctx);
    std::printf("%-10s F = %10.4f  PCRLB sum = %8.4f m^2  rate = %8.2f Mbit/s\n", to_string(s), r.objective,
                [&] { double t = 0; for (double v : r.pcrlb) t += v; return t; }(),
                [&] { double t = 0; for (double v : r.rate_bps) t += v; return t * 1e-6; }());
    for (int m = 0; m < ctx.M(); ++m) {
      std::printf("  object %d:", m);
      for (int k = 0; k < ctx.K(); ++k) {
        if (r.U(m, k))
          std::printf("  BS%d %5.2f W %6.2f MHz", k + 1, r.alloc.P(m, k), r.alloc.B(m, k) * 1e-6);
        else
          std::printf("  BS%d      -           -", k + 1);
      }
      std::printf("\n");
    }
  }
}
