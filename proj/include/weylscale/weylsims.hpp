#pragma once

#include "weylscale/hamiltonian.hpp"

namespace weylscale {

// Rotation block U_{2n} = blockdiag(U, -U*) for an invertible n x n U.
// U_{2n} J is Hermitian with signature (n, n); the weight
// W(t, lambda) = Re[U_{2n} (lambda A + B)] drives every disk estimate.
struct RotationU {
  CMatrix U;
  CMatrix u2n;
  CMatrix u2n_inv;

  static RotationU from_eta(int n, double eta);
  static RotationU from_matrix(const CMatrix& u);
};

CMatrix rot_W(const CoefficientSystem& sys, const RotationU& rot, double t, Complex lambda);
// Adjoint-side weight Re[U_{2n}^{-1} (conj(lambda) A + B*)]; congruent to W via
// W = U_{2n} Wtilde U_{2n}*.
CMatrix rot_Wtilde(const CoefficientSystem& sys, const RotationU& rot, double t,
                   Complex lambda);
CMatrix rot_Atilde(const CoefficientSystem& sys, const RotationU& rot, double t);

struct SignatureReport {
  int n_pos = 0;
  int n_neg = 0;
  int n_zero = 0;
  bool ok = false;  // exactly (n, n, 0)
};
SignatureReport rotation_signature(const RotationU& rot);

struct AdmissibleReport {
  bool ok = false;
  double min_eig = 0.0;  // worst eigenvalue of W(t, lambda0) over the grid
  double argmin_t = 0.0;
};
// (lambda0, U) is admissible when W(t, lambda0) is psd at every grid point.
AdmissibleReport check_admissible(const CoefficientSystem& sys, const RotationU& rot,
                                  const TimeScale& ts, Complex lambda0);

// Largest delta with Re[(lambda - lambda0) U_{2n} A(t)] >= delta * Atilde(t)
// for every grid t (compared on the range of Atilde); -inf when the form has
// mass off that range with the wrong sign, so no delta exists.
double cone_margin(const CoefficientSystem& sys, const RotationU& rot, const TimeScale& ts,
                   Complex lambda0, Complex lambda);
bool cone_contains(const CoefficientSystem& sys, const RotationU& rot, const TimeScale& ts,
                   Complex lambda0, Complex lambda);

// Disk data at one grid node, from the fundamental pair:
// Yhat* U_{2n} J Yhat = 2 [[S, T], [T*, P]]. Center = -P^{-1} T*; the squared
// radius matrix is T P^{-1} T* - S directly, or (1/4) Ptilde^{-1} through the
// adjoint block Zhat* U_{2n}^{-1} J Zhat = 2 [[~, ~], [~, Ptilde]]. The two
// agree in exact arithmetic; the adjoint route survives when the trajectory
// has grown past the cancellation floor of the direct formula.
struct WeylDisk {
  Complex lambda;
  double t = 0.0;
  int n = 0;
  CMatrix S, T, P, Ptilde;
  double p_min_eig = 0.0;
  bool p_positive = false;
  CMatrix center;
  CMatrix radius;  // squared-radius matrix
  bool stable_radius = false;
  double route_gap = 0.0;  // ||direct - adjoint-route radius|| when both exist
};

WeylDisk weyl_disk(const CoefficientSystem& sys, const RotationU& rot, const TimeScale& ts,
                   const FundamentalTrajectory& traj, int k);

// (theta_hat + phi_hat l)* U_{2n} J (theta_hat + phi_hat l) at node k; disk
// membership is this form being negative semidefinite.
CMatrix defining_form(const RotationU& rot, const FundamentalTrajectory& traj, int k,
                      const CMatrix& l);

// l = center + P^{-1/2} V radius^{1/2}; V must be a contraction.
CMatrix boundary_point(const WeylDisk& disk, const CMatrix& v);

struct ContainmentReport {
  bool inside = false;
  double margin = 0.0;  // min eigenvalue of radius - X*X, X = P^{1/2}(l - center)
};
ContainmentReport disk_contains(const WeylDisk& disk, const CMatrix& l, double tol = 1e-9);

// First node where both P and the squared-radius matrix are positive definite.
// Returns npoints when no such node exists on the grid.
int first_definite_index(const CoefficientSystem& sys, const RotationU& rot,
                         const TimeScale& ts, const FundamentalTrajectory& traj);

// Worst deviation, over all grid nodes, between the quadratic form
// Yhat* U_{2n} J Yhat grown from t0 and twice the accumulated energy integral
// of y* W y (forward) or z* Wtilde z (adjoint).
double energy_residual_forward(const CoefficientSystem& sys, const RotationU& rot,
                               const TimeScale& ts, const FundamentalTrajectory& traj);
double energy_residual_adjoint(const CoefficientSystem& sys, const RotationU& rot,
                               const TimeScale& ts, const FundamentalTrajectory& traj);

// Energy bound for the combination yhat_l = theta_hat + phi_hat l over
// [t0, point(k)): integral of y_l* W y_l against -(l* U + U* l)/2. Membership
// of l in the disk at k is equivalent to lhs <= rhs in the Loewner order.
struct WNormBound {
  CMatrix lhs;
  CMatrix rhs;
  double slack_min_eig = 0.0;  // min eigenvalue of rhs - lhs
};
WNormBound w_norm_bound(const CoefficientSystem& sys, const RotationU& rot,
                        const TimeScale& ts, const FundamentalTrajectory& traj,
                        const CMatrix& l, int k);

// Smallest eigenvalue of the accumulated form phi* W phi over [t0, point(k));
// positivity quantifies the definiteness condition for the spectral parameter.
double definiteness_margin(const CoefficientSystem& sys, const RotationU& rot,
                           const TimeScale& ts, const FundamentalTrajectory& traj, int k);

}  // namespace weylscale
