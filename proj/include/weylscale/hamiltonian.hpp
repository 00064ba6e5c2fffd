#pragma once

#include <functional>
#include <vector>

#include "weylscale/matrixkit.hpp"
#include "weylscale/timescale.hpp"

namespace weylscale {

// Coefficients of the linear Hamiltonian system J yhat^Delta = (lambda A + B) y
// with A = blockdiag(A1, A2) Hermitian psd and B = [[B1, B2], [B3, B4]].
// The hat map stores (y1, y2 composed with rho) so one-step recursions close
// over grid samples.
struct CoefficientSystem {
  int n = 1;
  std::function<CMatrix(double)> A1, A2, B1, B2, B3, B4;

  CMatrix A(double t) const;
  CMatrix B(double t) const;
  // (I + mu B2)^{-1}; throws SingularE2 when ill conditioned.
  CMatrix E2(double t, double mu) const;
};

// Pointwise slices relating hatted and plain solution samples:
//   y = H yhat (homogeneous),  z = Htilde zhat^sigma,  y = H yhat + N A f
// (inhomogeneous). All three collapse to H = Htilde = I, N = 0 when mu = 0.
struct TransformSlices {
  CMatrix H;
  CMatrix Htilde;
  CMatrix N;
};

TransformSlices transforms(const CoefficientSystem& sys, double t, double mu,
                           Complex lambda);

// Transfer slice K with yhat^Delta = K yhat; K = -J (lambda A + B) H.
CMatrix transfer_K(const CoefficientSystem& sys, double t, double mu, Complex lambda);

// One-step matrices at a scattered point: forward X = I + mu K and the adjoint
// step T_z with zhat^sigma = T_z zhat, T_z = -J X^{-*} J.
CMatrix forward_step(const CoefficientSystem& sys, double t, double mu, Complex lambda);
CMatrix adjoint_step(const CoefficientSystem& sys, double t, double mu, Complex lambda);

struct RegressivityReport {
  bool ok = true;
  double min_sv_b2 = 0.0;  // min over scattered points of sigma_min(I + mu B2)
  double min_sv_b3 = 0.0;
  double argmin_t = 0.0;
};

// I + mu B2 and I + mu B3 must stay invertible; det(I + mu K) factors through
// them independently of lambda, so this one scan certifies both forward and
// backward stepping for every lambda.
RegressivityReport check_regressive(const CoefficientSystem& sys, const TimeScale& ts);
void require_regressive(const CoefficientSystem& sys, const TimeScale& ts);

// Samples of a hatted solution block (2n x m) at every grid node.
// Forward system: scattered step yhat^sigma = (I + mu K) yhat, dense flow
// yhat' = K yhat. Adjoint system J zhat^Delta = (conj(lambda) A + B*) z:
// scattered step via adjoint_step, dense flow zhat' = -J (conj(lambda) A + B*) zhat.
std::vector<CMatrix> propagate_forward(const CoefficientSystem& sys, const TimeScale& ts,
                                       Complex lambda, const CMatrix& init,
                                       double rtol = 1e-12, double atol = 1e-13);
std::vector<CMatrix> propagate_adjoint(const CoefficientSystem& sys, const TimeScale& ts,
                                       Complex lambda, const CMatrix& init,
                                       double rtol = 1e-12, double atol = 1e-13);

// Fundamental pair Yhat = (theta | phi), Zhat = (eta | chi), both equal to J at
// t0. Zhat is taken from the closed inverse formula Zhat = -J Yhat^{-*} J while
// cond(Yhat) allows it and from direct adjoint propagation beyond that;
// adjoint_mismatch records the worst disagreement of the two routes over the
// formula-valid region.
struct FundamentalTrajectory {
  Complex lambda;
  std::vector<CMatrix> yhat;
  std::vector<CMatrix> zhat;
  double adjoint_mismatch = 0.0;
  double max_cond = 0.0;
};

FundamentalTrajectory fundamental_pair(const CoefficientSystem& sys, const TimeScale& ts,
                                       Complex lambda, double rtol = 1e-12,
                                       double atol = 1e-13);

// Plain samples from hatted ones. Forward solutions: y = H yhat pointwise.
// Adjoint solutions: z(t) = Htilde(t) zhat(sigma(t)); the strict accessor
// refuses the truncated last scattered node (its sigma sample lies past the
// horizon), while the bulk helper fills that node with zhat itself, consistent
// with the mu(last) = 0 truncation convention.
std::vector<CMatrix> unhat_forward(const CoefficientSystem& sys, const TimeScale& ts,
                                   Complex lambda, const std::vector<CMatrix>& yhat);
CMatrix unhat_adjoint_at(const CoefficientSystem& sys, const TimeScale& ts, Complex lambda,
                         const std::vector<CMatrix>& zhat, int k);
std::vector<CMatrix> unhat_adjoint(const CoefficientSystem& sys, const TimeScale& ts,
                                   Complex lambda, const std::vector<CMatrix>& zhat);

// Lagrange-identity check over [point(ka), point(kb)): integral of
// z* J yhat^Delta - (J zhat^Delta)* y against the boundary form
// zhat* J yhat evaluated at the ends. Solutions may sit at different spectral
// parameters; on scattered scales the identity telescopes exactly for
// arbitrary grid data.
struct GreensCheck {
  CMatrix lhs;
  CMatrix rhs;
  double residual = 0.0;
};

GreensCheck greens_formula(const CoefficientSystem& sys, const TimeScale& ts,
                           Complex lambda_y, Complex lambda_z,
                           const std::vector<CMatrix>& yhat,
                           const std::vector<CMatrix>& zhat, int ka, int kb);

}  // namespace weylscale
