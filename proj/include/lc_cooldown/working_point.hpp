#pragma once

// Classical working point: static membrane displacement, intracavity photon
// number, capacitor charge, coupling rates and the renormalized mechanical
// frequency. Includes the membrane-in-the-middle model of omega(x).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>

#include "lc_cooldown/constants.hpp"
#include "lc_cooldown/errors.hpp"
#include "lc_cooldown/params.hpp"

namespace lcc {

// --- membrane-in-the-middle cavity frequency -------------------------------

inline double cavity_wavenumber(const Optics& o) { return constants::two_pi / o.wavelength_lambda; }
inline double cavity_frequency(const Optics& o) { return constants::c * cavity_wavenumber(o); }

/// omega(x) - omega_c: the membrane-induced shift of the cavity resonance.
inline double mim_frequency_shift(double x, const Optics& o) {
  const double phase = 2.0 * cavity_wavenumber(o) * (o.membrane_axial_position_z0 + x);
  return o.overlap_Theta * (constants::c / o.cavity_length_Lc) *
         std::asin(std::sqrt(o.membrane_reflectivity_Rm) * std::cos(phase));
}

/// Cavity resonance frequency with the membrane displaced by x (rad/s).
inline double mim_frequency(double x, const Optics& o) {
  return cavity_frequency(o) + mim_frequency_shift(x, o);
}

struct FrequencyDerivatives {
  double first = 0.0;   // rad/s/m
  double second = 0.0;  // rad/s/m^2
};

inline FrequencyDerivatives mim_frequency_derivatives(double x, const Optics& o) {
  const double k = cavity_wavenumber(o);
  const double wc = cavity_frequency(o);
  const double R = o.membrane_reflectivity_Rm;
  const double phase = 2.0 * k * (o.membrane_axial_position_z0 + x);
  const double cs = std::cos(phase);
  const double sn = std::sin(phase);
  const double denom = 1.0 - R * cs * cs;
  FrequencyDerivatives d;
  d.first = -o.overlap_Theta * (2.0 * wc / o.cavity_length_Lc) * sn * std::sqrt(R / denom);
  // d/dphase [sin / sqrt(1 - R cos^2)] = cos (1 - R) / (1 - R cos^2)^{3/2}
  d.second = -o.overlap_Theta * (4.0 * wc * wc / (constants::c * o.cavity_length_Lc)) *
             std::sqrt(R) * cs * (1.0 - R) / (denom * std::sqrt(denom));
  return d;
}

// --- electrostatics ----------------------------------------------------------

/// Largest DC bias with a stable equilibrium (radiation pressure neglected).
inline double pull_in_voltage(const ParameterSet& p) {
  const double m = p.mechanics.mass_m;
  const double w0 = p.mechanics.omega0;
  const double h0 = p.circuit.gap_h0;
  return std::sqrt(8.0 * m * w0 * w0 * h0 * h0 * h0 /
                   (27.0 * constants::epsilon0 * p.circuit.effective_area_Aeff));
}

/// Total circuit capacitance C(x) = C0 + eps0 Aeff / (h0 + x).
inline double capacitance(const ParameterSet& p, const DerivedConstants& dc, double x) {
  return dc.C0 + constants::epsilon0 * p.circuit.effective_area_Aeff / (p.circuit.gap_h0 + x);
}

namespace wp_detail {

// Static force balance residual m w0^2 x + eps0 A V^2 / 2(h0+x)^2 + F_rad.
inline double force_balance(const ParameterSet& p, double V, double radiation_force, double x) {
  const double m = p.mechanics.mass_m;
  const double w0 = p.mechanics.omega0;
  const double h = p.circuit.gap_h0 + x;
  return m * w0 * w0 * x +
         constants::epsilon0 * p.circuit.effective_area_Aeff * V * V / (2.0 * h * h) +
         radiation_force;
}

inline double force_balance_slope(const ParameterSet& p, double V, double x) {
  const double m = p.mechanics.mass_m;
  const double w0 = p.mechanics.omega0;
  const double h = p.circuit.gap_h0 + x;
  return m * w0 * w0 - constants::epsilon0 * p.circuit.effective_area_Aeff * V * V / (h * h * h);
}

// Root on the stable branch x > -h0/3 for a fixed radiation force (N,
// counted as +hbar omega' n on the residual side).
inline double stable_root(const ParameterSet& p, double V, double radiation_force) {
  const double m = p.mechanics.mass_m;
  const double w0 = p.mechanics.omega0;
  const double h0 = p.circuit.gap_h0;
  double lo = -h0 / 3.0;
  if (force_balance(p, V, radiation_force, lo) >= 0.0) {
    std::ostringstream msg;
    msg << "no stable equilibrium at V_DC = " << V << " V (pull-in voltage "
        << pull_in_voltage(p) << " V)";
    throw PullInError(msg.str());
  }
  double hi = std::max(0.0, -radiation_force / (m * w0 * w0));
  if (force_balance(p, V, radiation_force, hi) == 0.0) return hi;
  // The residual is strictly increasing on [-h0/3, inf) below pull-in, so the
  // bracket holds exactly one root.
  for (int it = 0; it < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * h0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (force_balance(p, V, radiation_force, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 2; ++it) {
    const double slope = force_balance_slope(p, V, x);
    if (!(slope > 0.0)) break;
    const double next = x - force_balance(p, V, radiation_force, x) / slope;
    if (next <= lo || next >= hi) break;
    x = next;
  }
  return x;
}

}  // namespace wp_detail

/// Static membrane displacement x_s (m) on the stable branch.
///
/// Without radiation pressure the root lies in (-h0/3, 0]. With it, the
/// radiation force is iterated to a fixed point with omega'(x_s) updated each
/// pass; n_cav itself does not depend on x_s because the detuning is fixed.
inline double solve_equilibrium(const ParameterSet& p, double V_DC, bool include_radiation,
                                double n_cav = 0.0) {
  if (!(V_DC >= 0.0)) throw DomainError("solve_equilibrium: V_DC must be >= 0");
  if (!include_radiation || n_cav == 0.0) {
    if (V_DC >= pull_in_voltage(p)) {
      std::ostringstream msg;
      msg << "V_DC = " << V_DC << " V is at or beyond the pull-in voltage " << pull_in_voltage(p)
          << " V";
      throw PullInError(msg.str());
    }
    if (V_DC == 0.0) return 0.0;
    return wp_detail::stable_root(p, V_DC, 0.0);
  }
  const double scale = p.circuit.gap_h0;
  double x = 0.0;
  double step = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double force = constants::hbar * mim_frequency_derivatives(x, p.optics).first * n_cav;
    const double next = wp_detail::stable_root(p, V_DC, force);
    step = std::abs(next - x);
    x = next;
    if (step <= 1e-15 * scale) return x;
  }
  std::ostringstream msg;
  msg << "radiation-pressure fixed point did not converge: last step " << step << " m at x_s = "
      << x << " m";
  throw NumericalError(msg.str());
}

/// Electromechanical coupling g (rad/s) at bias V and displacement x_s.
inline double electromechanical_coupling(const ParameterSet& p, const DerivedConstants& dc,
                                         double V_DC, double x_s) {
  const auto& c = p.circuit;
  const double h = c.gap_h0 + x_s;
  return constants::epsilon0 * c.effective_area_Aeff * V_DC /
         (capacitance(p, dc, x_s) * h * h *
          std::sqrt(p.mechanics.mass_m * c.inductance_L * c.omegaLC * p.mechanics.omega0));
}

/// Optomechanical coupling G (rad/s) for n_cav photons at displacement x_s.
inline double optomechanical_coupling(const ParameterSet& p, const DerivedConstants& dc,
                                      double x_s, double n_cav) {
  return -dc.x_zpf * mim_frequency_derivatives(x_s, p.optics).first * std::sqrt(2.0 * n_cav);
}

struct Couplings {
  double G = 0.0;  // rad/s
  double g = 0.0;  // rad/s
};

/// Coupling rates at the working point; Direct mode returns the configured pair.
inline Couplings couplings(const ParameterSet& p, double x_s, double n_cav) {
  if (const auto* d = p.direct()) return {d->G, d->g};
  const auto dc = derive_constants(p);
  return {optomechanical_coupling(p, dc, x_s, n_cav),
          electromechanical_coupling(p, dc, p.v_dc(), x_s)};
}

/// The three contributions to omega_m^2.
struct MechFrequencyTerms {
  double bare = 0.0;           // omega0^2
  double radiation = 0.0;      // (hbar/m) omega'' n_cav
  double electrostatic = 0.0;  // -V^2 eps0 A / m (h0+x_s)^3
  double omega_m_squared() const { return bare + radiation + electrostatic; }
};

inline MechFrequencyTerms mech_frequency_terms(const ParameterSet& p, double V_DC, double x_s,
                                               double n_cav) {
  const double m = p.mechanics.mass_m;
  const double w0 = p.mechanics.omega0;
  const double h = p.circuit.gap_h0 + x_s;
  MechFrequencyTerms t;
  t.bare = w0 * w0;
  t.radiation = constants::hbar / m * mim_frequency_derivatives(x_s, p.optics).second * n_cav;
  t.electrostatic =
      -V_DC * V_DC * constants::epsilon0 * p.circuit.effective_area_Aeff / (m * h * h * h);
  return t;
}

/// Renormalized mechanical frequency omega_m at bias V_DC; throws when omega_m^2 <= 0.
inline double effective_mech_frequency(const ParameterSet& p, double V_DC, double x_s,
                                       double n_cav) {
  const double w2 = mech_frequency_terms(p, V_DC, x_s, n_cav).omega_m_squared();
  if (!(w2 > 0.0)) {
    std::ostringstream msg;
    msg << "omega_m^2 = " << w2 << " rad^2/s^2 is not positive: membrane is unstable (pull-in)";
    throw InstabilityError(msg.str());
  }
  return std::sqrt(w2);
}

inline double effective_mech_frequency(const ParameterSet& p, double x_s, double n_cav) {
  return effective_mech_frequency(p, p.v_dc(), x_s, n_cav);
}

/// DC bias that produces electromechanical coupling g (bisection; g(V) is
/// increasing on [0, V_pull)).
inline double voltage_for_coupling(const ParameterSet& p, double g, bool include_radiation = false,
                                   double n_cav = 0.0) {
  if (g < 0.0) throw DomainError("voltage_for_coupling: g must be >= 0");
  if (g == 0.0) return 0.0;
  const auto dc = derive_constants(p);
  auto coupling_at = [&](double V) {
    return electromechanical_coupling(p, dc, V, solve_equilibrium(p, V, include_radiation, n_cav));
  };
  const double v_pull = pull_in_voltage(p);
  // Largest bias that still has an equilibrium (radiation pressure can move
  // pull-in slightly below v_pull).
  double top = 0.0;
  double g_top = 0.0;
  for (int j = 0; j < 12; ++j) {
    top = v_pull * (1.0 - std::pow(10.0, -12.0 + j));
    try {
      g_top = coupling_at(top);
      break;
    } catch (const PullInError&) {
      if (j == 11) throw;
    }
  }
  if (g_top < g) {
    std::ostringstream msg;
    msg << "g = " << g << " rad/s exceeds the largest coupling " << g_top
        << " rad/s reachable below pull-in";
    throw PullInError(msg.str());
  }
  double lo = 0.0;
  double hi = top;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * top; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (coupling_at(mid) < g)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Intracavity photon number giving an optomechanical coupling of magnitude
/// |G| at x_s. The sign of G only fixes the phase convention of the cavity
/// quadratures and drops out of every occupancy.
inline double photons_for_coupling(const ParameterSet& p, const DerivedConstants& dc, double G,
                                   double x_s) {
  if (G == 0.0) return 0.0;
  const double unit = dc.x_zpf * std::abs(mim_frequency_derivatives(x_s, p.optics).first);
  if (unit == 0.0)
    throw ConfigError(
        "omega'(x_s) vanishes at the membrane position, so no photon number realizes the "
        "requested G; adjust optics.membrane_axial_position_z0");
  const double root = G / unit;
  return 0.5 * root * root;
}

enum class CouplingSource { Physical, Direct };

struct WorkingPoint {
  double x_s = 0.0;                    // m
  double n_cav = 0.0;                  // photons
  std::complex<double> alpha_s{0.0};  // cavity amplitude
  double q_s = 0.0;                    // C
  double omega_m = 0.0;                // rad/s
  double G = 0.0;                      // rad/s
  double g = 0.0;                      // rad/s
  double Delta = 0.0;                  // rad/s
  double C_at_xs = 0.0;                // F
  double V_pull = 0.0;                 // V
  double V_DC = 0.0;                   // V, bias actually used
  CouplingSource couplings_source = CouplingSource::Physical;
  MechFrequencyTerms omega_m_terms;
};

/// Full classical working point of the system.
inline WorkingPoint working_point(const ParameterSet& p) {
  const auto dc = derive_constants(p);
  const bool radiation = p.solver.include_radiation;
  WorkingPoint wp;
  wp.Delta = p.optics.detuning_Delta;
  wp.V_pull = pull_in_voltage(p);

  if (const auto* d = p.direct()) {
    wp.couplings_source = CouplingSource::Direct;
    wp.G = d->G;
    wp.g = d->g;
    if (d->apply_spring_shift) {
      // Drive that reproduces (G, g) in the physical model.
      double n = photons_for_coupling(p, dc, d->G, 0.0);
      double V = voltage_for_coupling(p, d->g, radiation, n);
      double x = solve_equilibrium(p, V, radiation, n);
      for (int it = 0; it < 50; ++it) {
        const double n_next = photons_for_coupling(p, dc, d->G, x);
        const double V_next = voltage_for_coupling(p, d->g, radiation, n_next);
        const double x_next = solve_equilibrium(p, V_next, radiation, n_next);
        const bool done = std::abs(n_next - n) <= 1e-13 * std::max(1.0, n) &&
                          std::abs(V_next - V) <= 1e-13 * wp.V_pull;
        n = n_next;
        V = V_next;
        x = x_next;
        if (done) break;
      }
      wp.V_DC = V;
      wp.n_cav = n;
      wp.x_s = x;
      wp.omega_m_terms = mech_frequency_terms(p, V, x, n);
      wp.omega_m = effective_mech_frequency(p, V, x, n);
    } else {
      wp.V_DC = p.v_dc();
      wp.n_cav = dc.E_drive * dc.E_drive / (dc.kappa * dc.kappa + wp.Delta * wp.Delta);
      wp.x_s = solve_equilibrium(p, wp.V_DC, radiation, wp.n_cav);
      wp.omega_m_terms = mech_frequency_terms(p, wp.V_DC, wp.x_s, wp.n_cav);
      wp.omega_m = p.mechanics.omega0;
    }
    wp.alpha_s = std::sqrt(wp.n_cav) * std::complex<double>(dc.kappa, -wp.Delta) /
                 std::hypot(dc.kappa, wp.Delta);
  } else {
    wp.couplings_source = CouplingSource::Physical;
    wp.V_DC = p.v_dc();
    wp.alpha_s = dc.E_drive / std::complex<double>(dc.kappa, wp.Delta);
    wp.n_cav = dc.E_drive * dc.E_drive / (dc.kappa * dc.kappa + wp.Delta * wp.Delta);
    wp.x_s = solve_equilibrium(p, wp.V_DC, radiation, wp.n_cav);
    const auto c = couplings(p, wp.x_s, wp.n_cav);
    wp.G = c.G;
    wp.g = c.g;
    wp.omega_m_terms = mech_frequency_terms(p, wp.V_DC, wp.x_s, wp.n_cav);
    wp.omega_m = effective_mech_frequency(p, wp.V_DC, wp.x_s, wp.n_cav);
  }
  wp.C_at_xs = capacitance(p, dc, wp.x_s);
  wp.q_s = wp.C_at_xs * wp.V_DC;
  return wp;
}

}  // namespace lcc
