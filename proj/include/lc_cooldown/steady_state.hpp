#pragma once

// Stationary covariance matrix of the linearized system: Lyapunov solve,
// occupancies, cooling efficiency, and a time-domain integration of the
// covariance equation used as an independent cross-check.

#include <array>
#include <cmath>
#include <iostream>
#include <sstream>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "lc_cooldown/dynamics.hpp"
#include "lc_cooldown/errors.hpp"
#include "lc_cooldown/params.hpp"
#include "lc_cooldown/working_point.hpp"

namespace lcc {

struct CovarianceMatrix {
  Matrix6 V = Matrix6::Zero();
  // max|A V + V A^T + D| / max|D|
  double residual_norm = 0.0;
};

inline double max_abs(const Matrix6& M) { return M.cwiseAbs().maxCoeff(); }

inline double lyapunov_residual(const Matrix6& A, const Matrix6& D, const Matrix6& V) {
  return max_abs(A * V + V * A.transpose() + D);
}

/// Solves A V + V A^T = -D for stable A via the 36x36 Kronecker system.
inline CovarianceMatrix solve_lyapunov(const Matrix6& A, const Matrix6& D) {
  const auto rep = stability(A);
  if (!rep.stable) {
    std::ostringstream msg;
    msg << "drift matrix is not stable (max Re(lambda) = " << -rep.margin << " rad/s)";
    throw InstabilityError(msg.str());
  }
  // Rescaling time by the largest rate leaves V unchanged and balances the system.
  const double scale = max_abs(A);
  const Matrix6 As = A / scale;
  const Matrix6 Ds = D / scale;

  using Matrix36 = Eigen::Matrix<double, 36, 36>;
  using Vector36 = Eigen::Matrix<double, 36, 1>;
  Matrix36 M = Matrix36::Zero();
  // Column-major vec: vec(A V) = (I (x) A) vec V, vec(V A^T) = (A (x) I) vec V.
  for (int j = 0; j < 6; ++j)
    for (int i = 0; i < 6; ++i)
      for (int k = 0; k < 6; ++k) {
        M(i + 6 * j, k + 6 * j) += As(i, k);
        M(i + 6 * j, i + 6 * k) += As(j, k);
      }
  Vector36 rhs = -Eigen::Map<const Vector36>(Ds.data());
  Eigen::FullPivLU<Matrix36> lu(M);
  if (!lu.isInvertible()) throw NumericalError("Lyapunov system is singular");
  Vector36 v = lu.solve(rhs);
  // One step of iterative refinement.
  v += lu.solve(rhs - M * v);

  CovarianceMatrix cm;
  cm.V = Eigen::Map<const Matrix6>(v.data());
  cm.V = 0.5 * (cm.V + cm.V.transpose()).eval();
  const double dnorm = max_abs(D);
  cm.residual_norm = lyapunov_residual(A, D, cm.V) / (dnorm > 0.0 ? dnorm : 1.0);
  return cm;
}

namespace ss_detail {

inline double clipped_occupancy(double value, const char* what) {
  if (value >= 0.0) return value;
  if (value < -1e-9) std::clog << "warning: " << what << " = " << value << " clipped to 0\n";
  return 0.0;
}

}  // namespace ss_detail

/// Effective LC occupancy (V33 + V44 - 1)/2 (1-based indices).
inline double occupancy_lc(const Matrix6& V) {
  return ss_detail::clipped_occupancy(0.5 * (V(kQ, kQ) + V(kPhi, kPhi) - 1.0), "n_LC_eff");
}

/// Effective mechanical occupancy (V11 + V22 - 1)/2.
inline double occupancy_mech(const Matrix6& V) {
  return ss_detail::clipped_occupancy(0.5 * (V(kX, kX) + V(kP, kP) - 1.0), "n_m_eff");
}

/// Everything computed for one parameter set.
struct SteadyState {
  DerivedConstants derived;
  WorkingPoint working;
  LinearRates rates;
  DriftDiffusion system;
  StabilityReport stability;
  CovarianceMatrix covariance;
  double n_lc_eff = 0.0;
  double n_m_eff = 0.0;
};

/// Working point, linearization, stability check and Lyapunov solve.
inline SteadyState steady_state(const ParameterSet& p) {
  SteadyState s;
  s.derived = derive_constants(p);
  s.working = working_point(p);
  s.rates = linear_rates(p, s.derived, s.working);
  s.system.A = drift_matrix(s.rates);
  s.system.D = diffusion_matrix(s.rates);
  s.stability = stability(s.system.A);
  s.covariance = solve_lyapunov(s.system.A, s.system.D);
  s.n_lc_eff = occupancy_lc(s.covariance.V);
  s.n_m_eff = occupancy_mech(s.covariance.V);
  return s;
}

/// Same parameters with the electromechanical interaction switched off.
inline ParameterSet without_electromechanical_coupling(ParameterSet p) {
  if (auto* d = std::get_if<DirectCoupling>(&p.coupling_mode))
    d->g = 0.0;
  else
    p.drives.V_DC = 0.0;
  return p;
}

/// eta = n_LC_eff(g = 0) / n_LC_eff(g).
inline double cooling_efficiency(const ParameterSet& p, double n_lc_eff) {
  if (const auto* d = p.direct(); d ? d->g == 0.0 : p.v_dc() == 0.0) return 1.0;
  const auto base = steady_state(without_electromechanical_coupling(p));
  return base.n_lc_eff / n_lc_eff;
}

inline double cooling_efficiency(const ParameterSet& p) {
  return cooling_efficiency(p, steady_state(p).n_lc_eff);
}

struct EvolveOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;  // relative to the scale max(|V0|, max|D| / max|A|)
  double initial_dt = 0.0;  // 0: pick from the largest rate
};

/// Integrates dV/dt = A V + V A^T + D from V0 over [0, t_final] with an
/// adaptive Dormand-Prince 5(4) stepper, symmetrizing V after every step.
inline Matrix6 evolve_covariance(const Matrix6& A, const Matrix6& D, const Matrix6& V0,
                                 double t_final, const EvolveOptions& opt = {}) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 36>;
  if (!(t_final >= 0.0)) throw DomainError("evolve_covariance: t_final must be >= 0");

  const double rate = max_abs(A);
  const double scale = std::max({max_abs(V0), rate > 0.0 ? max_abs(D) / rate : 0.0, 1e-300});
  State state;
  Eigen::Map<Matrix6>(state.data()) = V0;
  auto rhs = [&A, &D](const State& x, State& dxdt, double) {
    Eigen::Map<const Matrix6> V(x.data());
    Eigen::Map<Matrix6>(dxdt.data()) = A * V + V * A.transpose() + D;
  };
  auto stepper = odeint::make_controlled(opt.abs_tol * scale, opt.rel_tol,
                                         odeint::runge_kutta_dopri5<State>());
  double t = 0.0;
  double dt = opt.initial_dt > 0.0 ? opt.initial_dt : (rate > 0.0 ? 1e-3 / rate : t_final);
  const double dt_floor = 1e-15 * std::max(t_final, rate > 0.0 ? 1.0 / rate : 1.0);
  while (t < t_final) {
    dt = std::min(dt, t_final - t);
    const auto result = stepper.try_step(rhs, state, t, dt);
    if (result == odeint::fail) {
      if (dt < dt_floor) {
        std::ostringstream msg;
        msg << "evolve_covariance: step size underflow at t = " << t << " s (dt = " << dt << ")";
        throw NumericalError(msg.str());
      }
      continue;
    }
    Eigen::Map<Matrix6> V(state.data());
    V = 0.5 * (V + V.transpose()).eval();
  }
  return Eigen::Map<const Matrix6>(state.data());
}

/// Integration time after which the transient has decayed by e^-40.
inline double convergence_time(const StabilityReport& rep) { return 20.0 / rep.margin; }

}  // namespace lcc
