// Scans the electromechanical coupling at fixed optomechanical coupling and
// prints the exact and approximate LC occupancy.

#include <cstdio>

#include "lc_cooldown/lc_cooldown.hpp"

int main() {
  using namespace lcc;
  SweepSpec spec;
  spec.axes = {{"coupling_mode.g_over_kappa", make_grid(0.01, 0.5, 25, "log")}};
  spec.outputs = {SweepOutput::n_lc_eff, SweepOutput::approx_n_lc_eff, SweepOutput::V_DC};
  const auto records = run_sweep(reference_config(4e4, 10e-3), spec);

  std::printf("%10s %12s %12s %10s  %s\n", "g/kappa", "n_LC exact", "n_LC approx", "V_DC [V]", "status");
  for (const auto& r : records)
    std::printf("%10.4f %12.4f %12.4f %10.3f  %s\n", r.axis_values[0], r.outputs[0], r.outputs[1],
                r.outputs[2], to_string(r.status));
}
