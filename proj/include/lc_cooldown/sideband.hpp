#pragma once

// Approximate (weak-coupling, resolved-sideband) cooling theory for the
// mechanical resonator and, through it, the LC resonator.

#include "lc_cooldown/errors.hpp"

namespace lcc {

struct OpticalRates {
  double A_plus = 0.0;       // Stokes, rad/s
  double A_minus = 0.0;      // anti-Stokes, rad/s
  double Gamma_m = 0.0;      // net optical damping, rad/s
  double gamma_m_eff = 0.0;  // rad/s
};

/// Scattering rates A+- = (G^2 kappa/2) / (kappa^2 + (Delta +- omega_m)^2).
inline OpticalRates optical_rates(double G, double kappa, double Delta, double omega_m,
                                  double gamma_m) {
  if (!(kappa > 0.0)) throw DomainError("optical_rates: kappa must be > 0");
  OpticalRates r;
  const double num = 0.5 * G * G * kappa;
  r.A_plus = num / (kappa * kappa + (Delta + omega_m) * (Delta + omega_m));
  r.A_minus = num / (kappa * kappa + (Delta - omega_m) * (Delta - omega_m));
  r.Gamma_m = r.A_minus - r.A_plus;
  r.gamma_m_eff = gamma_m + r.Gamma_m;
  return r;
}

/// Mechanical occupancy with a zero-temperature optical reservoir.
inline double mech_occupancy_approx(const OpticalRates& r, double nbar_m, double gamma_m) {
  const double den = gamma_m + r.Gamma_m;
  if (!(den > 0.0)) throw DomainError("mech_occupancy_approx: gamma_m + Gamma_m must be > 0");
  return (gamma_m * nbar_m + r.A_plus) / den;
}

struct LcRates {
  double A_plus = 0.0;   // rad/s
  double A_minus = 0.0;  // rad/s
  double Gamma_LC = 0.0;
  double gamma_LC_eff = 0.0;
};

/// Polariton scattering rates A+-^LC = g^2 gm_eff / (gm_eff^2 + 4 (omega_m +- omegaLC)^2).
inline LcRates lc_rates(double g, double gamma_m_eff, double omega_m, double omegaLC,
                        double gamma_LC) {
  if (!(gamma_m_eff > 0.0)) throw DomainError("lc_rates: gamma_m_eff must be > 0");
  LcRates r;
  const double num = g * g * gamma_m_eff;
  const double g2 = gamma_m_eff * gamma_m_eff;
  r.A_plus = num / (g2 + 4.0 * (omega_m + omegaLC) * (omega_m + omegaLC));
  r.A_minus = num / (g2 + 4.0 * (omega_m - omegaLC) * (omega_m - omegaLC));
  r.Gamma_LC = r.A_minus - r.A_plus;
  r.gamma_LC_eff = gamma_LC + r.Gamma_LC;
  return r;
}

inline double lc_occupancy_approx(const LcRates& r, double nbar_LC, double gamma_LC,
                                  double n_m_eff) {
  const double den = gamma_LC + r.Gamma_LC;
  if (!(den > 0.0)) throw DomainError("lc_occupancy_approx: gamma_LC + Gamma_LC must be > 0");
  return (gamma_LC * nbar_LC + r.Gamma_LC * n_m_eff + r.A_plus) / den;
}

struct Cooperativities {
  double C_om = 0.0;
  double C_em = 0.0;
  bool regime_ok = false;  // C_em >> C_om >> 1, ">>" read as a factor 10
};

inline Cooperativities cooperativities(double G, double g, double kappa, double gamma_m,
                                       double gamma_LC) {
  if (!(kappa > 0.0 && gamma_m > 0.0 && gamma_LC > 0.0))
    throw DomainError("cooperativities: rates must be > 0");
  Cooperativities c;
  c.C_om = G * G / (2.0 * kappa * gamma_m);
  c.C_em = g * g / (gamma_LC * gamma_m);
  c.regime_ok = c.C_em > 10.0 * c.C_om && c.C_om > 10.0;
  return c;
}

/// All closed-form quantities for one operating point.
struct CoolingRates {
  OpticalRates optical;
  LcRates lc;
  Cooperativities coop;
  double n_m_eff = 0.0;
  double n_lc_eff = 0.0;
  double omega_m_used = 0.0;  // mechanical frequency entering the rates
};

inline CoolingRates cooling_rates(double G, double g, double kappa, double Delta, double omega_m,
                                  double gamma_m, double omegaLC, double gamma_LC, double nbar_m,
                                  double nbar_LC) {
  CoolingRates c;
  c.omega_m_used = omega_m;
  c.optical = optical_rates(G, kappa, Delta, omega_m, gamma_m);
  c.n_m_eff = mech_occupancy_approx(c.optical, nbar_m, gamma_m);
  c.lc = lc_rates(g, c.optical.gamma_m_eff, omega_m, omegaLC, gamma_LC);
  c.n_lc_eff = lc_occupancy_approx(c.lc, nbar_LC, gamma_LC, c.n_m_eff);
  c.coop = cooperativities(G, g, kappa, gamma_m, gamma_LC);
  return c;
}

}  // namespace lcc
