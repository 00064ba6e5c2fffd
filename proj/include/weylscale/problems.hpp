#pragma once

#include <functional>
#include <string>
#include <vector>

#include "weylscale/hamiltonian.hpp"
#include "weylscale/weylsims.hpp"

namespace weylscale {

// A coefficient system bundled with the rotation that makes its numerical
// range sit in a half plane. Higher-order scalar problems enter through their
// first-order ladder form; compositions with the forward jump are taken
// against the supplied grid, so discrete builds evaluate coefficients at grid
// nodes only.
struct Problem {
  CoefficientSystem sys;
  RotationU rot;
  std::string name;
};

using RealFn = std::function<double(double)>;

// -(p y')' + q y = lambda w y, order two, n = 1. Requires w > 0 and
// |p(sigma(t))| bounded away from zero.
struct SturmLiouvilleSpec {
  RealFn p, q, w;
  double eta = 0.0;
};

Problem sturm_liouville(const SturmLiouvilleSpec& spec, const TimeScale& ts);

// (p2 y'')'' - (p1 y')' + p0 y = lambda w y, order four, n = 2.
struct FourthOrderSpec {
  RealFn p0, p1, p2, w;
  double eta = 0.0;
};

Problem fourth_order(const FourthOrderSpec& spec, const TimeScale& ts);

// sum_{j=0}^{n} (-1)^j (p_j y^(j))^(j) = lambda w y, order 2n. p has n + 1
// entries with p[n] the leading coefficient.
struct EvenOrderSpec {
  int n = 1;
  std::vector<RealFn> p;
  RealFn w;
  double eta = 0.0;
};

Problem even_order(const EvenOrderSpec& spec, const TimeScale& ts);

// Linearized stability system for a parallel shear profile V on a dense scale,
// n = 2: spectral weight on the first component only, profile and its second
// derivative entering the first block row.
struct OrrSommerfeldSpec {
  double a = 1.0;         // streamwise wavenumber
  double reynolds = 1.0;  // Reynolds number
  RealFn V, Vpp;          // base profile and its second derivative
  double eta = 0.0;
};

Problem orr_sommerfeld(const OrrSommerfeldSpec& spec, const TimeScale& ts);

OrrSommerfeldSpec couette_flow(double a, double reynolds, double eta = 0.0);
OrrSommerfeldSpec poiseuille_flow(double a, double reynolds, double eta = 0.0);

// Closed-form half-plane threshold at time t: W(t, lambda0) stays psd exactly
// when Re(e^{i eta} lambda0) <= this value. The check_admissible scan computes
// the same condition spectrally; the two routes are compared in tests.
double orr_sommerfeld_bound(const OrrSommerfeldSpec& spec, double t);

// Scalar fourth-order defect p2 u'''' - p1 u'' + p0 u - lambda w u at interior
// nodes of a uniform dense grid, via fourth-order-accurate central stencils.
// Valid for constant coefficients (evaluated pointwise); returns the worst
// absolute defect.
double fourth_order_ladder_residual(const FourthOrderSpec& spec, const TimeScale& ts,
                                    Complex lambda, const std::vector<Complex>& u);

}  // namespace weylscale
