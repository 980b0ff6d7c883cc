#pragma once

// Shared fixtures and independent oracles for the test suite.

#include <cmath>
#include <functional>
#include <random>

#include "lc_cooldown/lc_cooldown.hpp"

namespace lcc::test {

inline ParameterSet reference(double QLC = 4e4, double T = 10e-3, double G_over_kappa = 0.8,
                              double g_over_kappa = 0.12, bool spring_shift = false) {
  return parse_parameter_set(reference_config(QLC, T, G_over_kappa, g_over_kappa, spring_shift));
}

inline ParameterSet physical_reference(double V_DC, double P = 1e-3) {
  auto doc = reference_config();
  doc["coupling_mode"] = {{"type", "Physical"}};
  doc["optics"]["input_power_P"] = P;
  doc["drives"] = {{"V_DC", V_DC}};
  return parse_parameter_set(doc);
}

inline double kappa_ref() { return cavity_kappa(8e-3, 5e4); }

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

/// Random linear system with all rates in a moderate range; stability is not
/// guaranteed and has to be checked by the caller.
inline LinearRates random_rates(std::mt19937_64& rng, double min_log_q = 2.0, double max_log_q = 3.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto range = [&](double a, double b) { return a + (b - a) * u(rng); };
  LinearRates r;
  r.omega0 = constants::two_pi * 1e6 * range(0.5, 2.0);
  r.omega_m = r.omega0 * range(0.85, 1.15);
  r.gamma_m = r.omega0 / std::pow(10.0, range(min_log_q, max_log_q));
  r.omegaLC = r.omega0 * range(0.7, 1.3);
  r.gamma_LC = r.omegaLC / std::pow(10.0, range(min_log_q, max_log_q));
  r.kappa = r.omega0 * range(0.1, 1.0);
  r.Delta = r.omega0 * range(0.5, 1.5);
  r.G = r.kappa * range(0.0, 0.8);
  r.g = r.kappa * range(0.0, 0.3);
  r.nbar_m = range(0.0, 100.0);
  r.nbar_LC = range(0.0, 100.0);
  return r;
}

/// Draws until the system is stable with a margin of at least 1e-4 of omega0.
inline LinearRates random_stable_rates(std::mt19937_64& rng, double min_log_q = 2.0, double max_log_q = 3.0) {
  for (;;) {
    auto r = random_rates(rng, min_log_q, max_log_q);
    const auto rep = stability(drift_matrix(r));
    if (rep.stable && rep.margin > 1e-4 * r.omega0) return r;
  }
}

/// Full width at half maximum of a single peak of f inside [lo, hi], found by a
/// dense scan followed by bisection on both flanks.
inline double numerical_fwhm(const std::function<double(double)>& f, double lo, double hi, int samples = 20000) {
  double x_peak = lo;
  double f_peak = f(lo);
  const double step = (hi - lo) / samples;
  for (int i = 1; i <= samples; ++i) {
    const double x = lo + i * step;
    const double v = f(x);
    if (v > f_peak) {
      f_peak = v;
      x_peak = x;
    }
  }
  const double half = 0.5 * f_peak;
  auto crossing = [&](double inside, double dir) {
    double outside = inside;
    while (f(outside) > half) outside += dir * step;
    double a = inside;
    double b = outside;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (a + b);
      (f(m) > half ? a : b) = m;
    }
    return 0.5 * (a + b);
  };
  return crossing(x_peak, 1.0) - crossing(x_peak, -1.0);
}

}  // namespace lcc::test
