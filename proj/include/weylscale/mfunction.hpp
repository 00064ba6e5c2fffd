#pragma once

#include "weylscale/weylsims.hpp"

namespace weylscale {

// Disk-center estimate of the limiting M function: centers and radii at a
// nested list of horizons, the last center taken as M(lambda), plus how far
// earlier centers sit from it and how comfortably M stays inside every disk.
struct MEstimate {
  Complex lambda;
  CMatrix M;
  std::vector<double> horizons;
  std::vector<CMatrix> centers;
  std::vector<CMatrix> radii;
  double cauchy_gap = 0.0;          // max over horizons of ||center - M||
  double containment_margin = 0.0;  // min over horizons of disk_contains margin
};

MEstimate m_estimate(const CoefficientSystem& sys, const RotationU& rot, const TimeScale& ts,
                     Complex lambda, const std::vector<double>& horizons,
                     double rtol = 1e-12, double atol = 1e-13);

// Weyl pair from an explicit combination against a fundamental pair:
// psi_hat = theta_hat + phi_hat M, zeta_hat = eta_hat + chi_hat M*.
// Numerically trustworthy while the fundamental pair itself has not grown by
// more than the working precision allows.
struct WeylSolutionPair {
  Complex lambda;
  CMatrix M;          // psi-side normalization at t0: psi_hat(t0) = (-M; I)
  CMatrix M_adjoint;  // zeta-side implied value; equals M in exact arithmetic
  std::vector<CMatrix> psi_hat, zeta_hat;  // 2n x n samples
  std::vector<CMatrix> psi, zeta;          // plain samples
};

WeylSolutionPair weyl_solutions(const CoefficientSystem& sys, const TimeScale& ts,
                                const FundamentalTrajectory& traj, const CMatrix& m);

// Recessive (Weyl) pair by orthonormalized backward shooting: integrate the
// n-dimensional solution frame backward from a buffered horizon, QR-refresh
// each node, and renormalize at t0 so the bottom block is the identity. The
// forward-growing directions die off backward, leaving the recessive subspace
// to working precision; M falls out of the t0 normalization. buffer is in time
// units past the evaluation horizon (rounded up to whole grid intervals). The
// sweep samples the coefficients on the buffered extension of the grid, so
// they must be evaluable there: closures composed with the jump of a
// truncated scale (as the problem builders produce on isolated grids) only
// support buffer zero.
WeylSolutionPair stable_weyl_pair(const CoefficientSystem& sys, const TimeScale& ts,
                                  Complex lambda, double buffer, double rtol = 1e-12,
                                  double atol = 1e-13);

// max over nodes of ||zeta_hat* J psi_hat|| (decays to zero for the limiting
// pair) and of ||zeta_hat* J phi_hat + I|| (an exact constant coupling).
struct CouplingReport {
  double max_psi_coupling = 0.0;
  double max_phi_coupling = 0.0;
};

CouplingReport coupling_residuals(const TimeScale& ts, const std::vector<CMatrix>& zeta_hat,
                                  const std::vector<CMatrix>& psi_hat,
                                  const std::vector<CMatrix>& phi_hat);

// Finite-horizon difference identity at node k:
//   M(lambda) - M(xi) - (lambda - xi) * Int_{t0}^{t_k} zeta_xi* A psi_lambda
//     = -zeta_hat_xi*(t_k) J psi_hat_lambda(t_k),
// exact for any constant-normalized solution pairs. `direct` is the left side,
// `boundary` the coupling form, `cross_gap` their disagreement (pure
// quadrature/rounding noise).
struct MDifferenceCheck {
  CMatrix direct;
  CMatrix boundary;
  double direct_norm = 0.0;
  double boundary_norm = 0.0;
  double cross_gap = 0.0;
};

MDifferenceCheck m_difference(const CoefficientSystem& sys, const TimeScale& ts,
                              const WeylSolutionPair& pair_lambda,
                              const WeylSolutionPair& pair_xi, int k);

}  // namespace weylscale
