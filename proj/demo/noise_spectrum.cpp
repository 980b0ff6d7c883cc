// Charge-noise spectrum of the cooled circuit around its resonance, and the
// variance it integrates to.

#include <cstdio>

#include "lc_cooldown/lc_cooldown.hpp"

int main() {
  using namespace lcc;
  const auto p = parse_parameter_set(reference_config(4e4, 10e-3, 0.8, 0.12, false));
  const auto s = steady_state(p);
  const VoltageCalibration cal{s.derived.q_zpf, s.working.C_at_xs};

  for (double w : make_grid(0.9 * s.rates.omegaLC, 1.1 * s.rates.omegaLC, 21, "linear")) {
    const auto x = spectrum_sample(s.rates, cal, w);
    std::printf("omega/omegaLC = %.3f   S_dq = %.4e   S_dVC = %.4e V^2/(rad/s)\n", w / s.rates.omegaLC, x.S_dq,
                x.S_dVC);
  }
  const auto var = integrate_spectrum(s.rates);
  std::printf("<dq^2> = %.6f (covariance: %.6f)\n", var.var_q, s.covariance.V(kQ, kQ));
  std::printf("n_LC_eff = %.4f, peak estimate %.4e, full %.4e\n", s.n_lc_eff, spectrum_peak(s.rates),
              charge_noise_spectrum(s.rates, s.rates.omegaLC));
}
