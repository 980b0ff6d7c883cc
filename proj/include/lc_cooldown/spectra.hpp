#pragma once

// Frequency-domain description of the fluctuations: natural and effective
// susceptibilities, charge / voltage noise spectra, their integrals, and the
// Lorentzian approximations used for detection.
//
// Spectra S(omega) are two-sided densities normalized so that the variance is
// the integral of S(omega) d(omega)/2pi.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lc_cooldown/dynamics.hpp"
#include "lc_cooldown/errors.hpp"
#include "lc_cooldown/sideband.hpp"

namespace lcc {

using cplx = std::complex<double>;

struct NaturalSusceptibilities {
  cplx chi_c;
  cplx chi_m;
  cplx chi_LC;
};

struct EffectiveSusceptibilities {
  cplx chi_mc;      // mechanics dressed by the cavity only
  cplx chi_m_eff;   // mechanics dressed by cavity and circuit
  cplx chi_LC_eff;  // circuit dressed by the optomechanical system
};

namespace spectra_detail {

inline cplx inv_chi_m(const LinearRates& r, double w) {
  return cplx(r.omega_m * r.omega_m - w * w, -r.gamma_m * w) / r.omega0;
}

inline cplx inv_chi_lc(const LinearRates& r, double w) {
  return cplx(r.omegaLC * r.omegaLC - w * w, -r.gamma_LC * w) / r.omegaLC;
}

inline cplx chi_c(const LinearRates& r, double w) {
  const cplx k(r.kappa, -w);
  return r.Delta / (r.Delta * r.Delta + k * k);
}

inline cplx invert(cplx inv, const char* what, double w) {
  if (inv == cplx(0.0)) {
    std::ostringstream msg;
    msg << what << " has a pole at omega = " << w << " rad/s";
    throw DomainError(msg.str());
  }
  return 1.0 / inv;
}

}  // namespace spectra_detail

inline NaturalSusceptibilities natural_susceptibilities(const LinearRates& r, double omega) {
  using namespace spectra_detail;
  return {chi_c(r, omega), invert(inv_chi_m(r, omega), "chi_m", omega),
          invert(inv_chi_lc(r, omega), "chi_LC", omega)};
}

inline EffectiveSusceptibilities effective_susceptibilities(const LinearRates& r, double omega) {
  using namespace spectra_detail;
  const auto nat = natural_susceptibilities(r, omega);
  EffectiveSusceptibilities e;
  const cplx inv_mc = inv_chi_m(r, omega) - r.G * r.G * nat.chi_c;
  e.chi_mc = r.G == 0.0 ? nat.chi_m : invert(inv_mc, "chi_mc", omega);
  e.chi_m_eff = r.g == 0.0 ? e.chi_mc : invert(inv_mc - r.g * r.g * nat.chi_LC, "chi_m_eff", omega);
  e.chi_LC_eff = r.g == 0.0 ? nat.chi_LC
                            : invert(inv_chi_lc(r, omega) - r.g * r.g * e.chi_mc, "chi_LC_eff", omega);
  return e;
}

/// Radiation-pressure force noise seen by the mechanics.
inline double radiation_pressure_spectrum(const LinearRates& r, double omega) {
  const double a = r.Delta * r.Delta + r.kappa * r.kappa;
  const double w2 = omega * omega;
  return r.G * r.G * r.kappa * (a + w2) / ((a - w2) * (a - w2) + 4.0 * r.kappa * r.kappa * w2);
}

/// White Brownian force noise.
inline double brownian_spectrum(const LinearRates& r) { return r.gamma_m * (2.0 * r.nbar_m + 1.0); }

/// White Johnson-Nyquist voltage noise.
inline double johnson_spectrum(const LinearRates& r) {
  return r.gamma_LC * (2.0 * r.nbar_LC + 1.0);
}

inline double charge_noise_spectrum(const LinearRates& r, const EffectiveSusceptibilities& e,
                                    double omega) {
  return std::norm(e.chi_LC_eff) *
         (r.g * r.g * std::norm(e.chi_mc) *
              (radiation_pressure_spectrum(r, omega) + brownian_spectrum(r)) +
          johnson_spectrum(r));
}

/// Dimensionless charge noise S_dq(omega), in units of 1/(rad/s).
inline double charge_noise_spectrum(const LinearRates& r, double omega) {
  return charge_noise_spectrum(r, effective_susceptibilities(r, omega), omega);
}

/// Calibration from dimensionless charge to volts across C(x_s).
struct VoltageCalibration {
  double q_zpf = 0.0;    // C
  double C_at_xs = 0.0;  // F
  double volts_squared() const { return q_zpf * q_zpf / (C_at_xs * C_at_xs); }
};

struct VoltageSpectra {
  double S_dVC = 0.0;  // V^2 s
  double S_dVL = 0.0;  // V^2 s
};

inline VoltageSpectra voltage_spectra(const LinearRates& r, const VoltageCalibration& cal,
                                      double omega, double S_dq, double S_imp_C, double S_imp_L) {
  if (S_imp_C < 0.0 || S_imp_L < 0.0) throw DomainError("voltage_spectra: S_imp must be >= 0");
  const double ratio = omega / r.omegaLC;
  const double ratio4 = (ratio * ratio) * (ratio * ratio);
  const double base = cal.volts_squared() * S_dq;
  return {base + S_imp_C, ratio4 * base + S_imp_L};
}

inline VoltageSpectra voltage_spectra(const LinearRates& r, const VoltageCalibration& cal,
                                      double omega, double S_imp_C, double S_imp_L) {
  return voltage_spectra(r, cal, omega, charge_noise_spectrum(r, omega), S_imp_C, S_imp_L);
}

struct SpectrumSample {
  double omega = 0.0;
  double S_dq = 0.0;
  double S_dVC = 0.0;
  double S_dVL = 0.0;
  NaturalSusceptibilities natural;
  EffectiveSusceptibilities effective;
};

inline SpectrumSample spectrum_sample(const LinearRates& r, const VoltageCalibration& cal,
                                      double omega, double S_imp_C = 0.0, double S_imp_L = 0.0) {
  SpectrumSample s;
  s.omega = omega;
  s.natural = natural_susceptibilities(r, omega);
  s.effective = effective_susceptibilities(r, omega);
  s.S_dq = charge_noise_spectrum(r, s.effective, omega);
  const auto v = voltage_spectra(r, cal, omega, s.S_dq, S_imp_C, S_imp_L);
  s.S_dVC = v.S_dVC;
  s.S_dVL = v.S_dVL;
  return s;
}

struct SpectralVariances {
  double var_q = 0.0;
  double var_phi = 0.0;
  double error_q = 0.0;    // estimated absolute quadrature error
  double error_phi = 0.0;
};

namespace spectra_detail {

// Panel boundaries that resolve every resonance of the drift matrix: for each
// eigenvalue -s + i v, points at +-v and +-(v +- s 4^j).
inline std::vector<double> breakpoints(const LinearRates& r, double window) {
  const auto rep = stability(drift_matrix(r), 0.0);
  std::vector<double> pts = {-window, 0.0, window};
  for (const auto& lam : rep.eigenvalues) {
    const double centre = std::abs(lam.imag());
    const double width = std::max(std::abs(lam.real()), 1e-12 * window);
    if (centre >= window) continue;
    for (double sign : {-1.0, 1.0}) {
      pts.push_back(sign * centre);
      for (double off = width; off < window; off *= 4.0) {
        for (double side : {-1.0, 1.0}) {
          const double x = sign * (centre + side * off);
          if (std::abs(x) < window) pts.push_back(x);
        }
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [window](double a, double b) { return b - a <= 1e-13 * window; }),
            pts.end());
  return pts;
}

}  // namespace spectra_detail

/// Integrated charge and flux variances,
///   <dq^2> = int S_dq dw/2pi,   <dphi^2> = int (w/omegaLC)^2 S_dq dw/2pi,
/// over the whole real line (no symmetry of S assumed).
inline SpectralVariances integrate_spectrum(const LinearRates& r, double rel_tol = 1e-6) {
  using boost::math::quadrature::gauss_kronrod;
  const double window =
      20.0 * std::max({r.omegaLC, r.omega_m, r.kappa, std::abs(r.Delta)});
  const auto pts = spectra_detail::breakpoints(r, window);

  auto s_q = [&r](double w) { return charge_noise_spectrum(r, w); };
  auto s_phi = [&r](double w) {
    const double ratio = w / r.omegaLC;
    return ratio * ratio * charge_noise_spectrum(r, w);
  };
  const double panel_tol = 1e-3 * rel_tol;
  // Each panel is mapped onto [0, 1]: the error estimate returned by
  // gauss_kronrod is not rescaled by the interval width.
  auto panel = [panel_tol](auto f, double a, double b, double& err) {
    const double width = b - a;
    auto unit = [&](double t) { return width * f(a + width * t); };
    return gauss_kronrod<double, 31>::integrate(unit, 0.0, 1.0, 12, panel_tol, &err);
  };
  auto integrate = [&](auto f, double& err_out) {
    double total = 0.0;
    double err = 0.0;
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      total += panel(f, pts[i], pts[i + 1], e);
      err += e;
    }
    // Tails in u = 1/|omega|, where the integrand tends to a constant.
    auto right = [&f](double u) { return u > 0.0 ? f(1.0 / u) / (u * u) : 0.0; };
    auto left = [&f](double u) { return u > 0.0 ? f(-1.0 / u) / (u * u) : 0.0; };
    total += panel(left, 0.0, -1.0 / pts.front(), e);
    err += e;
    total += panel(right, 0.0, 1.0 / pts.back(), e);
    err += e;
    err_out = err / constants::two_pi;
    return total / constants::two_pi;
  };

  SpectralVariances v;
  v.var_q = integrate(s_q, v.error_q);
  v.var_phi = integrate(s_phi, v.error_phi);
  if (!(v.error_q <= rel_tol * std::abs(v.var_q)) || !(v.error_phi <= rel_tol * std::abs(v.var_phi))) {
    std::ostringstream msg;
    msg << "spectral quadrature reached only relative error " << v.error_q / std::abs(v.var_q)
        << " (charge), " << v.error_phi / std::abs(v.var_phi) << " (flux); requested " << rel_tol;
    throw NumericalError(msg.str());
  }
  return v;
}

struct EffectiveLorentzian {
  double omega_LC_eff = 0.0;  // rad/s
  double gamma_LC_eff = 0.0;  // rad/s
};

/// Effective resonance of the dressed circuit in the sideband regime.
inline EffectiveLorentzian lorentzian_params(const LinearRates& r) {
  if (r.g == 0.0) return {r.omegaLC, r.gamma_LC};
  if (r.G == 0.0)
    throw DomainError("lorentzian_params: undefined for G = 0 with g != 0");
  const auto opt = optical_rates(r.G, r.kappa, r.Delta, r.omega_m, r.gamma_m);
  const auto lc = lc_rates(r.g, opt.gamma_m_eff, r.omega_m, r.omegaLC, r.gamma_LC);
  EffectiveLorentzian e;
  e.omega_LC_eff = std::sqrt(r.omegaLC * r.omegaLC + r.g * r.g * r.kappa * r.kappa / (r.G * r.G));
  e.gamma_LC_eff = lc.gamma_LC_eff;
  return e;
}

/// Closed-form estimate of the charge-noise peak height S_dq(omegaLC).
inline double spectrum_peak(const LinearRates& r) {
  const auto lor = lorentzian_params(r);
  const auto opt = optical_rates(r.G, r.kappa, r.Delta, r.omega_m, r.gamma_m);
  const double wl2 = r.omegaLC * r.omegaLC;
  const double detune = r.omega_m * r.omega_m - wl2;
  const double mech_lorentz =
      r.omega0 * r.omega0 / (detune * detune + wl2 * opt.gamma_m_eff * opt.gamma_m_eff);
  const double k2 = r.kappa * r.kappa;
  const double rp = r.G * r.G * (2.0 * wl2 + k2) / (r.kappa * (4.0 * wl2 + k2));
  const double bracket = johnson_spectrum(r) + r.g * r.g * mech_lorentz * (brownian_spectrum(r) + rp);
  return bracket / (lor.gamma_LC_eff * lor.gamma_LC_eff);
}

/// Ratio of the calibrated peak signal to the imprecision noise; +inf when S_imp = 0.
inline double detectability(const LinearRates& r, const VoltageCalibration& cal, double S_imp) {
  if (S_imp < 0.0) throw DomainError("detectability: S_imp must be >= 0");
  const double signal = cal.volts_squared() * spectrum_peak(r);
  if (S_imp == 0.0) return std::numeric_limits<double>::infinity();
  return signal / S_imp;
}

/// Margin above which the direct spectral measurement is considered faithful.
inline constexpr double kDetectableMargin = 10.0;

/// Linear response of the dimensionless charge to an AC voltage V_AC (volts)
/// at angular frequency omega; V_AC is expressed in flux zero-point units.
inline cplx ac_response(const LinearRates& r, double omega, cplx V_AC, double phi_zpf) {
  return effective_susceptibilities(r, omega).chi_LC_eff * (V_AC / phi_zpf);
}

/// Occupancy inferred from the measured linewidth when Johnson noise dominates.
inline double indirect_occupancy(double gamma_LC, double gamma_LC_eff, double nbar_LC) {
  if (!(gamma_LC > 0.0) || !(gamma_LC_eff >= gamma_LC))
    throw DomainError("indirect_occupancy: need gamma_LC_eff >= gamma_LC > 0");
  return gamma_LC / gamma_LC_eff * nbar_LC;
}

}  // namespace lcc
