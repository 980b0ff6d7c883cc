#pragma once

// Linearized fluctuation dynamics u' = A u + n for u = (dx, dp, dq, dphi, dX, dY),
// all quadratures in zero-point units.

#include <algorithm>
#include <array>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "lc_cooldown/errors.hpp"
#include "lc_cooldown/params.hpp"
#include "lc_cooldown/working_point.hpp"

namespace lcc {

using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// State-vector indices.
enum StateIndex : int { kX = 0, kP = 1, kQ = 2, kPhi = 3, kCavX = 4, kCavY = 5 };

/// Rates that fully determine A and D.
struct LinearRates {
  double omega0 = 0.0;
  double omega_m = 0.0;
  double gamma_m = 0.0;
  double omegaLC = 0.0;
  double gamma_LC = 0.0;
  double kappa = 0.0;
  double Delta = 0.0;
  double G = 0.0;
  double g = 0.0;
  double nbar_m = 0.0;
  double nbar_LC = 0.0;
};

inline LinearRates linear_rates(const ParameterSet& p, const DerivedConstants& dc,
                                const WorkingPoint& wp) {
  LinearRates r;
  r.omega0 = p.mechanics.omega0;
  r.omega_m = wp.omega_m;
  r.gamma_m = dc.gamma_m;
  r.omegaLC = p.circuit.omegaLC;
  r.gamma_LC = dc.gamma_LC;
  r.kappa = dc.kappa;
  r.Delta = wp.Delta;
  r.G = wp.G;
  r.g = wp.g;
  r.nbar_m = dc.nbar_m;
  r.nbar_LC = dc.nbar_LC;
  return r;
}

inline Matrix6 drift_matrix(const LinearRates& r) {
  Matrix6 A = Matrix6::Zero();
  A(kX, kP) = r.omega0;
  A(kP, kX) = -r.omega_m * r.omega_m / r.omega0;
  A(kP, kP) = -r.gamma_m;
  A(kP, kQ) = -r.g;
  A(kP, kCavX) = r.G;
  A(kQ, kPhi) = r.omegaLC;
  A(kPhi, kX) = -r.g;
  A(kPhi, kQ) = -r.omegaLC;
  A(kPhi, kPhi) = -r.gamma_LC;
  A(kCavX, kCavX) = -r.kappa;
  A(kCavX, kCavY) = r.Delta;
  A(kCavY, kX) = r.G;
  A(kCavY, kCavX) = -r.Delta;
  A(kCavY, kCavY) = -r.kappa;
  return A;
}

inline Matrix6 drift_matrix(const WorkingPoint& wp, const ParameterSet& p,
                            const DerivedConstants& dc) {
  return drift_matrix(linear_rates(p, dc, wp));
}

inline Matrix6 diffusion_matrix(const LinearRates& r) {
  Matrix6 D = Matrix6::Zero();
  D(kP, kP) = r.gamma_m * (2.0 * r.nbar_m + 1.0);
  D(kPhi, kPhi) = r.gamma_LC * (2.0 * r.nbar_LC + 1.0);
  D(kCavX, kCavX) = r.kappa;
  D(kCavY, kCavY) = r.kappa;
  return D;
}

inline Matrix6 diffusion_matrix(const DerivedConstants& dc) {
  LinearRates r;
  r.gamma_m = dc.gamma_m;
  r.gamma_LC = dc.gamma_LC;
  r.kappa = dc.kappa;
  r.nbar_m = dc.nbar_m;
  r.nbar_LC = dc.nbar_LC;
  return diffusion_matrix(r);
}

struct DriftDiffusion {
  Matrix6 A;
  Matrix6 D;
};

struct StabilityReport {
  std::array<std::complex<double>, 6> eigenvalues{};
  std::array<double, 6> eigenvalue_real_parts{};
  bool stable = false;
  double margin = 0.0;     // -max Re(lambda), rad/s
  double tolerance = 0.0;  // rad/s
};

/// Default threshold on Re(lambda): 1e-9 of the largest rate in A.
inline double stability_tolerance(const Matrix6& A) {
  return 1e-9 * std::max(std::abs(A(kX, kP)), std::abs(A(kCavX, kCavX)));
}

/// Eigenvalues of A (Hessenberg reduction + shifted QR) and the stability verdict.
inline StabilityReport stability(const Matrix6& A, double tolerance) {
  if (!A.allFinite()) throw DomainError("stability: drift matrix has non-finite entries");
  Eigen::EigenSolver<Matrix6> solver(A, false);
  if (solver.info() != Eigen::Success) throw NumericalError("stability: eigensolver did not converge");
  StabilityReport rep;
  rep.tolerance = tolerance;
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    rep.eigenvalues[i] = solver.eigenvalues()(i);
    rep.eigenvalue_real_parts[i] = rep.eigenvalues[i].real();
    max_re = std::max(max_re, rep.eigenvalue_real_parts[i]);
  }
  // Deterministic order: by imaginary part, then real part.
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](auto a, auto b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  for (int i = 0; i < 6; ++i) rep.eigenvalue_real_parts[i] = rep.eigenvalues[i].real();
  rep.margin = -max_re;
  rep.stable = max_re < -tolerance;
  return rep;
}

inline StabilityReport stability(const Matrix6& A) { return stability(A, stability_tolerance(A)); }

}  // namespace lcc
