#pragma once

// Physical parameters of the cavity / membrane / LC system and the constants
// derived from them. Every frequency is stored as an angular frequency (rad/s).

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>

#include "lc_cooldown/constants.hpp"
#include "lc_cooldown/errors.hpp"

namespace lcc {

struct Optics {
  double wavelength_lambda = 1064e-9;     // m
  double cavity_length_Lc = 8e-3;         // m
  double finesse_F = 5e4;
  double kappa_in_fraction = 0.4;         // kappa_in / kappa
  double membrane_reflectivity_Rm = 0.4;  // intensity reflectivity, [0, 1)
  double overlap_Theta = 1.0;             // [0, 1]
  // Default puts 2 k z0 = pi/4, where |omega'(x)| is largest.
  double membrane_axial_position_z0 = 1064e-9 / 16.0;  // m
  double detuning_Delta = 0.0;            // rad/s
  std::optional<double> input_power_P;    // W
};

struct Mechanics {
  double mass_m = 0.7e-10;  // kg
  double omega0 = 0.0;      // rad/s
  double quality_Qm = 1e6;
};

struct Circuit {
  double inductance_L = 1e-3;  // H
  double omegaLC = 0.0;        // rad/s
  double quality_QLC = 1e4;
  // When given, omegaLC is recomputed from it at ingestion.
  std::optional<double> tunable_capacitance_C0;  // F
  double effective_area_Aeff = 1.1e-7;           // m^2
  double gap_h0 = 2e-6;                          // m
};

struct Drives {
  std::optional<double> V_DC;  // V
};

struct Baths {
  double T_mech = 0.0;  // K
  double T_LC = 0.0;    // K
};

/// Couplings computed from the drives (laser power, DC bias).
struct PhysicalCoupling {};

/// Couplings fixed directly, bypassing the drive model.
struct DirectCoupling {
  double G = 0.0;  // rad/s
  double g = 0.0;  // rad/s
  // Renormalize omega_m with the DC bias (and photon number) that would
  // produce (G, g) in the physical model.
  bool apply_spring_shift = false;
};

using CouplingMode = std::variant<PhysicalCoupling, DirectCoupling>;

struct SolverOptions {
  // Keep the radiation-pressure force in the static force balance.
  bool include_radiation = false;
};

struct ParameterSet {
  Optics optics;
  Mechanics mechanics;
  Circuit circuit;
  Drives drives;
  Baths baths;
  CouplingMode coupling_mode = PhysicalCoupling{};
  SolverOptions solver;

  bool is_direct() const { return std::holds_alternative<DirectCoupling>(coupling_mode); }
  const DirectCoupling* direct() const { return std::get_if<DirectCoupling>(&coupling_mode); }
  double v_dc() const { return drives.V_DC.value_or(0.0); }
};

struct DerivedConstants {
  double kappa = 0.0;     // rad/s, amplitude decay rate
  double kappa_in = 0.0;  // rad/s
  double kappa_ex = 0.0;  // rad/s
  double gamma_m = 0.0;   // rad/s
  double gamma_LC = 0.0;  // rad/s
  double C_total_at_rest = 0.0;  // F, C(0)
  double C0 = 0.0;               // F, tunable part
  double resistance_R = 0.0;     // Ohm
  double x_zpf = 0.0;    // m
  double p_zpf = 0.0;    // kg m / s
  double q_zpf = 0.0;    // C
  double phi_zpf = 0.0;  // Wb
  double nbar_m = 0.0;
  double nbar_LC = 0.0;
  double omega_laser = 0.0;  // rad/s
  double E_drive = 0.0;      // rad/s
};

/// Mean thermal occupation of a bosonic mode, 1 / (exp(hbar w / kB T) - 1).
inline double bose_occupancy(double omega, double T) {
  if (!(omega > 0.0)) throw DomainError("bose_occupancy: omega must be > 0");
  if (T < 0.0 || std::isnan(T)) throw DomainError("bose_occupancy: T must be >= 0");
  if (T == 0.0) return 0.0;
  const double x = constants::hbar * omega / (constants::k_B * T);
  // expm1 overflows to +inf for large x, which yields exactly 0.
  return 1.0 / std::expm1(x);
}

/// Amplitude decay rate of a Fabry-Perot cavity, pi c / (Lc F).
inline double cavity_kappa(double cavity_length, double finesse) {
  return constants::two_pi * constants::c / (2.0 * cavity_length * finesse);
}

/// omegaLC reached with tunable capacitance C0 in parallel with the membrane capacitor.
inline double omega_lc_from_c0(const Circuit& circ) {
  const double c_rest = *circ.tunable_capacitance_C0 +
                        constants::epsilon0 * circ.effective_area_Aeff / circ.gap_h0;
  return 1.0 / std::sqrt(circ.inductance_L * c_rest);
}

namespace detail {

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(std::string(name) + " must be a finite value > 0");
}

inline void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
}

}  // namespace detail

/// Throws ConfigError when an invariant of the parameter set is violated.
inline void validate(const ParameterSet& p) {
  using detail::require_finite;
  using detail::require_positive;
  const auto& o = p.optics;
  require_positive(o.wavelength_lambda, "optics.wavelength_lambda");
  require_positive(o.cavity_length_Lc, "optics.cavity_length_Lc");
  require_positive(o.finesse_F, "optics.finesse_F");
  if (!(o.kappa_in_fraction > 0.0 && o.kappa_in_fraction <= 1.0))
    throw ConfigError("optics.kappa_in_fraction must lie in (0, 1]");
  if (!(o.membrane_reflectivity_Rm >= 0.0 && o.membrane_reflectivity_Rm < 1.0))
    throw ConfigError("optics.membrane_reflectivity_Rm must lie in [0, 1)");
  if (!(o.overlap_Theta >= 0.0 && o.overlap_Theta <= 1.0))
    throw ConfigError("optics.overlap_Theta must lie in [0, 1]");
  require_finite(o.membrane_axial_position_z0, "optics.membrane_axial_position_z0");
  require_finite(o.detuning_Delta, "optics.detuning_Delta");
  if (o.input_power_P) require_positive(*o.input_power_P, "optics.input_power_P");

  require_positive(p.mechanics.mass_m, "mechanics.mass_m");
  require_positive(p.mechanics.omega0, "mechanics.omega0");
  require_positive(p.mechanics.quality_Qm, "mechanics.quality_Qm");

  const auto& c = p.circuit;
  require_positive(c.inductance_L, "circuit.inductance_L");
  require_positive(c.omegaLC, "circuit.omegaLC");
  require_positive(c.quality_QLC, "circuit.quality_QLC");
  if (c.tunable_capacitance_C0)
    require_positive(*c.tunable_capacitance_C0, "circuit.tunable_capacitance_C0");
  require_positive(c.effective_area_Aeff, "circuit.effective_area_Aeff");
  require_positive(c.gap_h0, "circuit.gap_h0");

  if (p.drives.V_DC && !(*p.drives.V_DC >= 0.0 && std::isfinite(*p.drives.V_DC)))
    throw ConfigError("drives.V_DC must be finite and >= 0");
  if (!(p.baths.T_mech >= 0.0) || !std::isfinite(p.baths.T_mech))
    throw ConfigError("baths.T_mech must be >= 0");
  if (!(p.baths.T_LC >= 0.0) || !std::isfinite(p.baths.T_LC))
    throw ConfigError("baths.T_LC must be >= 0");

  if (const auto* d = p.direct()) {
    require_finite(d->G, "coupling_mode.G");
    if (!(d->g >= 0.0) || !std::isfinite(d->g))
      throw ConfigError("coupling_mode.g must be finite and >= 0");
  } else {
    if (!o.input_power_P) throw ConfigError("Physical coupling mode requires optics.input_power_P");
    if (!p.drives.V_DC) throw ConfigError("Physical coupling mode requires drives.V_DC");
  }
}

inline DerivedConstants derive_constants(const ParameterSet& p) {
  using namespace constants;
  validate(p);
  DerivedConstants dc;
  dc.kappa = cavity_kappa(p.optics.cavity_length_Lc, p.optics.finesse_F);
  dc.kappa_in = p.optics.kappa_in_fraction * dc.kappa;
  dc.kappa_ex = dc.kappa - dc.kappa_in;
  dc.gamma_m = p.mechanics.omega0 / p.mechanics.quality_Qm;
  dc.gamma_LC = p.circuit.omegaLC / p.circuit.quality_QLC;

  const auto& circ = p.circuit;
  dc.C_total_at_rest = 1.0 / (circ.inductance_L * circ.omegaLC * circ.omegaLC);
  dc.C0 = dc.C_total_at_rest - epsilon0 * circ.effective_area_Aeff / circ.gap_h0;
  if (!(dc.C0 > 0.0))
    throw ConfigError(
        "C0 = 1/(L omegaLC^2) - eps0 Aeff/h0 is not positive: omegaLC is unreachable "
        "with the given inductance and membrane capacitor");
  dc.resistance_R = circ.inductance_L * dc.gamma_LC;

  const double m = p.mechanics.mass_m;
  const double w0 = p.mechanics.omega0;
  dc.x_zpf = std::sqrt(hbar / (m * w0));
  dc.p_zpf = std::sqrt(hbar * m * w0);
  dc.q_zpf = std::sqrt(hbar / (circ.inductance_L * circ.omegaLC));
  dc.phi_zpf = std::sqrt(hbar * circ.inductance_L * circ.omegaLC);

  dc.nbar_m = bose_occupancy(w0, p.baths.T_mech);
  dc.nbar_LC = bose_occupancy(circ.omegaLC, p.baths.T_LC);

  dc.omega_laser = two_pi * c / p.optics.wavelength_lambda;
  const double power = p.optics.input_power_P.value_or(0.0);
  dc.E_drive = std::sqrt(2.0 * dc.kappa_in * power / (hbar * dc.omega_laser));
  return dc;
}

}  // namespace lcc
