#pragma once

#include <vector>

#include "weylscale/mfunction.hpp"

namespace weylscale {

// Integral-kernel solution of the inhomogeneous system on [t0, horizon):
//   rhat(k) = psi_hat(k) c1(k) + phi_hat(k) c2(k),
//   c1(k) = Int_{[t0, t_k)} chi* A f,   c2(k) = Int_{[t_k, horizon)} zeta* A f,
// with the plain samples recovered through r = H rhat + N A f. The adjoint
// variant swaps the roles: rhat(k) = zeta_hat(k) c1(k) + chi_hat(k) c2(k) with
// c1 the phi-prefix and c2 the psi-tail, plain z = Htilde rhat^sigma + N* A g.
struct ResolventSolution {
  Complex lambda;
  bool adjoint = false;
  std::vector<CVector> rhat;  // hatted samples, 2n per node
  std::vector<CVector> r;     // plain samples
  std::vector<CVector> c1;    // leading-solution coefficients per node
  std::vector<CVector> c2;    // trailing-solution coefficients per node
};

ResolventSolution resolve(const CoefficientSystem& sys, const TimeScale& ts,
                          const WeylSolutionPair& pair, const FundamentalTrajectory& traj,
                          const std::vector<CVector>& forcing);
ResolventSolution adjoint_resolve(const CoefficientSystem& sys, const TimeScale& ts,
                                  const WeylSolutionPair& pair,
                                  const FundamentalTrajectory& traj,
                                  const std::vector<CVector>& forcing);

// Defect measurements for a resolvent solution. bc_bottom is the second block
// of rhat at t0 (a structural zero for both variants); bc_boundary_form is the
// matching boundary form (chi_hat* J rhat for the forward variant, phi_hat* J
// rhat for the adjoint one). interior_residual is the worst defect of
// J rhat^Delta = (lambda A + B) r + A f over interior nodes, with the delta
// derivative taken as the exact one-step quotient on scattered scales and a
// five-point central difference on dense ones. max_tail_gap compares the
// horizon-side boundary form against the explicit tail coefficient; last_tail
// is that form at the final node, where the tail integral is empty.
struct ResolventChecks {
  double bc_bottom = 0.0;
  double bc_boundary_form = 0.0;
  double interior_residual = 0.0;
  double domain_row_residual = 0.0;
  double max_tail_gap = 0.0;
  double last_tail = 0.0;
};

ResolventChecks resolvent_checks(const CoefficientSystem& sys, const TimeScale& ts,
                                 const WeylSolutionPair& pair,
                                 const ResolventSolution& sol,
                                 const std::vector<CVector>& forcing);

// |(R f, g)_A - (f, Rtilde g)_A| with (u, v)_A the delta integral of v* A u.
double duality_gap(const CoefficientSystem& sys, const TimeScale& ts,
                   const ResolventSolution& rf, const ResolventSolution& rtg,
                   const std::vector<CVector>& f, const std::vector<CVector>& g);

// Plain Green kernel G(k, s): psi(k) chi(s)* below the diagonal,
// phi(k) zeta(s)* above it, and on the diagonal phi zeta* plus the jump term
// N / mu at scattered nodes. The adjoint kernel is the conjugate transpose
// with swapped arguments.
struct GreenKernel {
  Complex lambda;
  std::vector<CMatrix> psi, zeta, phi, chi;  // plain n-column solutions
  std::vector<CMatrix> jump;                 // N / mu at scattered nodes, else zero
};

GreenKernel green_kernel(const CoefficientSystem& sys, const TimeScale& ts,
                         const WeylSolutionPair& pair, const FundamentalTrajectory& traj);
CMatrix green_eval(const GreenKernel& kern, int k, int s);
CMatrix green_adjoint_eval(const GreenKernel& kern, int s, int k);

// Energy-type bound for Phi = plain R f with lambda in the cone of margin
// delta around lambda0: for any eps in (0, delta),
//   ||Phi||^2_{W(lambda0)} + (delta - eps) ||Phi||^2_{Atilde} <= ||f||^2_A / (4 eps),
// reported as the slack of that inequality together with the literal
// resolvent-norm comparison ||Phi||_{Atilde} vs ||f||_A / delta.
struct NormInequalityReport {
  double delta = 0.0;
  double eps = 0.0;
  double f_norm2 = 0.0;       // ||f||^2_A
  double w_norm2 = 0.0;       // ||Phi||^2_{W(lambda0)}
  double atilde_norm2 = 0.0;  // ||Phi||^2_{Atilde}
  double slack = 0.0;         // f_norm2 / (4 eps) - w_norm2 - (delta - eps) atilde_norm2
  double literal_lhs = 0.0;   // ||Phi||_{Atilde}
  double literal_rhs = 0.0;   // ||f||_A / delta
};

NormInequalityReport norm_inequality(const CoefficientSystem& sys, const RotationU& rot,
                                     const TimeScale& ts, Complex lambda0,
                                     const ResolventSolution& sol,
                                     const std::vector<CVector>& forcing, double delta,
                                     double eps);

}  // namespace weylscale
