#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "weylscale/hamiltonian.hpp"
#include "weylscale/rng.hpp"

namespace testsupport {

using weylscale::CMatrix;
using weylscale::CoefficientSystem;
using weylscale::Complex;
using weylscale::TimeScale;

inline CoefficientSystem constant_system(int n, CMatrix a1, CMatrix a2, CMatrix b1,
                                         CMatrix b2, CMatrix b3, CMatrix b4) {
  CoefficientSystem sys;
  sys.n = n;
  sys.A1 = [a1](double) { return a1; };
  sys.A2 = [a2](double) { return a2; };
  sys.B1 = [b1](double) { return b1; };
  sys.B2 = [b2](double) { return b2; };
  sys.B3 = [b3](double) { return b3; };
  sys.B4 = [b4](double) { return b4; };
  return sys;
}

// Free second-order system: y1' = y2, y2' = -lambda y1 (unit weight and
// leading coefficient, no potential).
inline CoefficientSystem free_sl_system() {
  CMatrix one = CMatrix::Identity(1, 1);
  CMatrix zero = CMatrix::Zero(1, 1);
  return constant_system(1, one, zero, zero, zero, zero, one);
}

inline Complex principal_sqrt(Complex lambda) { return std::sqrt(lambda); }

// Closed-form fundamental matrix of the free system with Yhat(0) = J:
// theta = (sin(rt)/r, cos(rt)), phi = (-cos(rt), r sin(rt)), r = sqrt(lambda).
inline CMatrix free_sl_yhat(Complex lambda, double t) {
  const Complex r = principal_sqrt(lambda);
  const Complex s = std::sin(r * t);
  const Complex c = std::cos(r * t);
  CMatrix y(2, 2);
  y(0, 0) = s / r;
  y(1, 0) = c;
  y(0, 1) = -c;
  y(1, 1) = r * s;
  return y;
}

// The coefficients are real, so the adjoint fundamental matrix is the
// entrywise conjugate of the forward one.
inline CMatrix free_sl_zhat(Complex lambda, double t) {
  return free_sl_yhat(lambda, t).conjugate();
}

// Half-plane limit of the disk centers for the free system, principal branch
// with positive imaginary part of sqrt(lambda).
inline Complex free_sl_m_oracle(Complex lambda) {
  return Complex(0.0, 1.0) / principal_sqrt(lambda);
}

// Scattered transfer slice of the free system at graininess h:
// K = [[-h lambda, 1], [-lambda, 0]].
inline CMatrix free_sl_transfer_oracle(Complex lambda, double h) {
  CMatrix k(2, 2);
  k(0, 0) = -h * lambda;
  k(0, 1) = 1.0;
  k(1, 0) = -lambda;
  k(1, 1) = 0.0;
  return k;
}

struct BatteryCase {
  CoefficientSystem sys;
  TimeScale ts;
  Complex lambda;
  Complex xi;
};

inline double trajectory_norm(const std::vector<CMatrix>& samples) {
  double worst = 0.0;
  for (const CMatrix& m : samples) worst = std::max(worst, m.cwiseAbs().maxCoeff());
  return worst;
}

// Deterministic scattered test case: 50 random steps with graininess in
// [0.25, 2], constant random coefficients. Draws are rejected (and the
// coefficient scale shrunk) until the fundamental pair stays below norm 100
// and condition 1e3, which keeps identity residuals near machine precision.
inline BatteryCase make_battery_case(int index) {
  using namespace weylscale;
  const int n = 1 + (index % 2);
  for (int attempt = 0; attempt < 80; ++attempt) {
    Rng rng(1000003ULL * static_cast<std::uint64_t>(index) + 7919ULL * attempt + 12345ULL);
    const double scale = 0.02 * std::pow(0.85, attempt);
    const CMatrix a1 = rng.psd(n, scale);
    const CMatrix a2 = rng.psd(n, scale);
    const CMatrix b1 = scale * rng.ginibre(n, n);
    const CMatrix b2 = scale * rng.ginibre(n, n);
    const CMatrix b3 = scale * rng.ginibre(n, n);
    const CMatrix b4 = scale * rng.ginibre(n, n);
    std::vector<double> points(51);
    points[0] = 0.0;
    for (int k = 1; k <= 50; ++k) points[k] = points[k - 1] + rng.uniform(0.25, 2.0);
    const double prepoint = -rng.uniform(0.25, 2.0);
    const double lam_re = rng.uniform(-0.5, 0.5);
    const double lam_im = rng.uniform(0.1, 0.9);
    const double xi_re = rng.uniform(-0.5, 0.5);
    const double xi_im = rng.uniform(0.1, 0.9);
    BatteryCase out{constant_system(n, a1, a2, b1, b2, b3, b4),
                    TimeScale::make_discrete(prepoint, points), Complex(lam_re, lam_im),
                    Complex(xi_re, xi_im)};
    if (!check_regressive(out.sys, out.ts).ok) continue;
    bool usable = true;
    for (const Complex param : {out.lambda, out.xi}) {
      try {
        const FundamentalTrajectory tr = fundamental_pair(out.sys, out.ts, param);
        if (trajectory_norm(tr.yhat) > 100.0 || tr.max_cond > 1e3) usable = false;
      } catch (const WeylError&) {
        usable = false;
      }
      if (!usable) break;
    }
    if (usable) return out;
  }
  throw std::runtime_error("battery draw could not satisfy the calibration bounds");
}

}  // namespace testsupport
