#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace lcc;
using lcc::test::reference;
using lcc::test::rel_diff;

namespace {

struct Point {
  LinearRates r;
  VoltageCalibration cal;
  SteadyState s;
};

Point point(const ParameterSet& p) {
  Point pt;
  pt.s = steady_state(p);
  pt.r = pt.s.rates;
  pt.cal = {pt.s.derived.q_zpf, pt.s.working.C_at_xs};
  return pt;
}

LinearRates with_couplings(LinearRates r, double G, double g) {
  r.G = G;
  r.g = g;
  return r;
}

}  // namespace

TEST(Susceptibilities, NaturalLimits) {
  const auto r = point(reference()).r;
  const auto at0 = natural_susceptibilities(r, 0.0);
  EXPECT_NEAR(at0.chi_m.real(), r.omega0 / (r.omega_m * r.omega_m), 1e-15 / r.omega0);
  EXPECT_EQ(at0.chi_m.imag(), 0.0);
  EXPECT_NEAR(at0.chi_c.real(), r.Delta / (r.Delta * r.Delta + r.kappa * r.kappa), 1e-20);
  const auto res = natural_susceptibilities(r, r.omegaLC);
  EXPECT_NEAR(res.chi_LC.real(), 0.0, 1e-12 / r.gamma_LC);
  EXPECT_NEAR(res.chi_LC.imag(), 1.0 / r.gamma_LC, 1e-12 / r.gamma_LC);
}

TEST(Susceptibilities, UncoupledEffectiveEqualsNatural) {
  const auto r = with_couplings(point(reference()).r, 0.0, 0.0);
  for (double w : {0.0, 1e5, r.omegaLC, 3e7}) {
    const auto nat = natural_susceptibilities(r, w);
    const auto eff = effective_susceptibilities(r, w);
    EXPECT_EQ(eff.chi_mc, nat.chi_m);
    EXPECT_EQ(eff.chi_m_eff, nat.chi_m);
    EXPECT_EQ(eff.chi_LC_eff, nat.chi_LC);
  }
}

TEST(Susceptibilities, DressingIdentities) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto r = lcc::test::random_stable_rates(rng);
    const double w = r.omegaLC * (0.9 + 0.02 * i);
    const auto nat = natural_susceptibilities(r, w);
    const auto eff = effective_susceptibilities(r, w);
    const cplx lhs = 1.0 / eff.chi_LC_eff;
    const cplx rhs = 1.0 / nat.chi_LC - r.g * r.g * eff.chi_mc;
    EXPECT_LE(std::abs(lhs - rhs), 1e-9 * std::abs(rhs));
    const cplx lhs_m = 1.0 / eff.chi_mc;
    const cplx rhs_m = 1.0 / nat.chi_m - r.G * r.G * nat.chi_c;
    EXPECT_LE(std::abs(lhs_m - rhs_m), 1e-9 * std::abs(rhs_m));
  }
}

TEST(Susceptibilities, PoleIsADomainError) {
  auto r = with_couplings(point(reference()).r, 0.0, 0.0);
  r.gamma_LC = 0.0;
  EXPECT_THROW(natural_susceptibilities(r, r.omegaLC), DomainError);
  EXPECT_THROW(charge_noise_spectrum(r, r.omegaLC), DomainError);
}

TEST(ChargeNoise, UncoupledIsJohnsonThroughTheBareResponse) {
  const auto r = with_couplings(point(reference()).r, 0.8 * lcc::test::kappa_ref(), 0.0);
  for (double w : {0.5 * r.omegaLC, r.omegaLC, 1.1 * r.omegaLC}) {
    const double expected = std::norm(natural_susceptibilities(r, w).chi_LC) * johnson_spectrum(r);
    EXPECT_NEAR(charge_noise_spectrum(r, w), expected, 1e-12 * expected);
  }
  EXPECT_NEAR(charge_noise_spectrum(r, r.omegaLC), (2.0 * r.nbar_LC + 1.0) / r.gamma_LC,
              1e-9 * (2.0 * r.nbar_LC + 1.0) / r.gamma_LC);
}

TEST(ChargeNoise, NonNegativeOnRandomDraws) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 50; ++i) {
    const auto r = lcc::test::random_stable_rates(rng);
    for (int k = -40; k <= 40; ++k) EXPECT_GE(charge_noise_spectrum(r, r.omegaLC * (1.0 + 0.05 * k)), 0.0);
  }
}

TEST(SpectralIntegral, MatchesCovarianceOnCouplingScan) {
  for (bool shift : {false, true}) {
    for (int i = 0; i < 10; ++i) {
      const double g = 0.01 * std::pow(30.0, i / 9.0);
      const auto pt = point(reference(4e4, 10e-3, 0.8, g, shift));
      const auto v = integrate_spectrum(pt.r);
      EXPECT_LT(rel_diff(v.var_q, pt.s.covariance.V(kQ, kQ)), 1e-5) << "g/kappa=" << g;
      EXPECT_LT(rel_diff(v.var_phi, pt.s.covariance.V(kPhi, kPhi)), 1e-5) << "g/kappa=" << g;
    }
  }
}

TEST(SpectralIntegral, MatchesCovarianceOnRandomDraws) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 20; ++i) {
    const auto r = lcc::test::random_stable_rates(rng);
    const auto V = solve_lyapunov(drift_matrix(r), diffusion_matrix(r)).V;
    const auto v = integrate_spectrum(r);
    EXPECT_LT(rel_diff(v.var_q, V(kQ, kQ)), 1e-5);
    EXPECT_LT(rel_diff(v.var_phi, V(kPhi, kPhi)), 1e-5);
  }
}

TEST(SpectralIntegral, ChargeAndFluxVariancesAgreeAtReference) {
  const auto v = integrate_spectrum(point(reference()).r);
  EXPECT_LT(rel_diff(v.var_q, v.var_phi), 0.02);
}

TEST(Lorentzian, UncoupledIsBare) {
  const auto r = with_couplings(point(reference()).r, 0.8 * lcc::test::kappa_ref(), 0.0);
  const auto lor = lorentzian_params(r);
  EXPECT_EQ(lor.omega_LC_eff, r.omegaLC);
  EXPECT_EQ(lor.gamma_LC_eff, r.gamma_LC);
  EXPECT_THROW(lorentzian_params(with_couplings(r, 0.0, 1e5)), DomainError);
}

TEST(Lorentzian, LinewidthMatchesDressedResponse) {
  const auto r = point(reference()).r;
  const auto lor = lorentzian_params(r);
  EXPECT_LT(lor.omega_LC_eff / r.omegaLC - 1.0, 0.01);
  EXPECT_GT(lor.gamma_LC_eff, 100.0 * r.gamma_LC);
  auto response = [&r](double w) { return std::norm(effective_susceptibilities(r, w).chi_LC_eff); };
  const double fwhm = lcc::test::numerical_fwhm(response, r.omegaLC - 10.0 * lor.gamma_LC_eff,
                                                r.omegaLC + 10.0 * lor.gamma_LC_eff);
  EXPECT_NEAR(fwhm / lor.gamma_LC_eff, 1.0, 0.10);
}

TEST(Peak, ClosedFormTracksFullSpectrum) {
  const auto r = point(reference()).r;
  EXPECT_NEAR(spectrum_peak(r) / charge_noise_spectrum(r, r.omegaLC), 1.0, 0.15);
}

TEST(Peak, UncoupledPeak) {
  const auto r = with_couplings(point(reference()).r, 0.8 * lcc::test::kappa_ref(), 0.0);
  const double expected = (2.0 * r.nbar_LC + 1.0) / r.gamma_LC;
  EXPECT_NEAR(spectrum_peak(r), expected, 1e-12 * expected);
}

TEST(VoltageSpectra, CalibrationAndImprecision) {
  const auto pt = point(reference());
  const double w = pt.r.omegaLC;
  const double S = charge_noise_spectrum(pt.r, w);
  const auto v = voltage_spectra(pt.r, pt.cal, w, 0.0, 0.0);
  EXPECT_NEAR(v.S_dVC, pt.cal.volts_squared() * S, 1e-12 * v.S_dVC);
  EXPECT_EQ(v.S_dVL, v.S_dVC);
  const auto shifted = voltage_spectra(pt.r, pt.cal, 2.0 * w, 1e-20, 2e-20);
  const double base = pt.cal.volts_squared() * charge_noise_spectrum(pt.r, 2.0 * w);
  EXPECT_NEAR(shifted.S_dVC, base + 1e-20, 1e-12 * shifted.S_dVC);
  EXPECT_NEAR(shifted.S_dVL, 16.0 * base + 2e-20, 1e-12 * shifted.S_dVL);
  EXPECT_THROW(voltage_spectra(pt.r, pt.cal, w, -1.0, 0.0), DomainError);
  const auto sample = spectrum_sample(pt.r, pt.cal, w);
  EXPECT_EQ(sample.S_dVC, v.S_dVC);
  EXPECT_EQ(sample.S_dq, S);
}

TEST(Detectability, Limits) {
  const auto pt = point(reference());
  const double signal = pt.cal.volts_squared() * spectrum_peak(pt.r);
  EXPECT_TRUE(std::isinf(detectability(pt.r, pt.cal, 0.0)));
  EXPECT_NEAR(detectability(pt.r, pt.cal, signal), 1.0, 1e-12);
  EXPECT_LT(detectability(pt.r, pt.cal, 1e-18), 1.0);
  EXPECT_THROW(detectability(pt.r, pt.cal, -1.0), DomainError);
}

TEST(AcResponse, LinearInDrive) {
  const auto pt = point(reference());
  const double phi = pt.s.derived.phi_zpf;
  EXPECT_EQ(ac_response(pt.r, pt.r.omegaLC, 0.0, phi), cplx(0.0));
  const cplx a = ac_response(pt.r, pt.r.omegaLC, 1e-6, phi);
  const cplx b = ac_response(pt.r, pt.r.omegaLC, 2e-6, phi);
  EXPECT_LE(std::abs(b - 2.0 * a), 1e-12 * std::abs(b));
}

TEST(AcResponse, ResonantHeightAndWidth) {
  const auto pt = point(reference());
  const auto& r = pt.r;
  const double phi = pt.s.derived.phi_zpf;
  const auto lor = lorentzian_params(r);
  const double height = std::abs(ac_response(r, r.omegaLC, phi, phi));
  EXPECT_NEAR(height * lor.gamma_LC_eff, 1.0, 0.05);
  auto power = [&](double w) { return std::norm(ac_response(r, w, phi, phi)); };
  const double fwhm = lcc::test::numerical_fwhm(power, r.omegaLC - 10.0 * lor.gamma_LC_eff,
                                                r.omegaLC + 10.0 * lor.gamma_LC_eff);
  EXPECT_NEAR(fwhm / lor.gamma_LC_eff, 1.0, 0.10);
}

TEST(AcResponse, UncoupledWidthIsBare) {
  const auto pt = point(reference());
  const auto r = with_couplings(pt.r, 0.8 * lcc::test::kappa_ref(), 0.0);
  auto power = [&](double w) { return std::norm(ac_response(r, w, 1.0, 1.0)); };
  const double fwhm = lcc::test::numerical_fwhm(power, r.omegaLC - 10.0 * r.gamma_LC, r.omegaLC + 10.0 * r.gamma_LC);
  EXPECT_NEAR(fwhm / r.gamma_LC, 1.0, 0.01);
}

TEST(IndirectOccupancy, TrivialCases) {
  EXPECT_EQ(indirect_occupancy(10.0, 10.0, 42.0), 42.0);
  EXPECT_EQ(indirect_occupancy(10.0, 20.0, 42.0), 21.0);
  EXPECT_THROW(indirect_occupancy(10.0, 5.0, 42.0), DomainError);
  EXPECT_THROW(indirect_occupancy(0.0, 5.0, 42.0), DomainError);
}

TEST(IndirectOccupancy, ApproximatesExactOccupancyWhenJohnsonDominates) {
  const auto pt = point(reference(1e5, 0.3));
  const auto lor = lorentzian_params(pt.r);
  const double n = indirect_occupancy(pt.r.gamma_LC, lor.gamma_LC_eff, pt.r.nbar_LC);
  EXPECT_NEAR(n / pt.s.n_lc_eff, 1.0, 0.30);
}
