#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "weylscale/matrixkit.hpp"

namespace weylscale {

// Embedded Dormand-Prince 5(4) step controller for matrix-valued linear ODEs.
// Integrates Y' = F(t, Y) from t0 to t1 (either direction) with adaptive
// substeps; the caller drives it node to node so every grid point is hit
// exactly. FSAL: the seventh stage of an accepted step seeds the next one.
class Dopri5 {
 public:
  using Rhs = std::function<CMatrix(double, const CMatrix&)>;

  Dopri5(Rhs rhs, double rtol = 1e-12, double atol = 1e-13)
      : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol) {}

  // Advances y in place from t0 to t1. Keeps a persistent step-size guess so
  // consecutive node-to-node calls stay efficient.
  void advance(double t0, double t1, CMatrix& y) {
    const double span = t1 - t0;
    if (span == 0.0) return;
    const double dir = span > 0.0 ? 1.0 : -1.0;
    double h = suggested_ > 0.0 ? dir * std::min(suggested_, std::abs(span))
                                : 0.25 * span;
    double t = t0;
    CMatrix k1 = rhs_(t, y);
    int rejects_in_a_row = 0;
    const double hmin = 1e-14 * std::max(1.0, std::abs(t1));
    while (dir * (t1 - t) > 0.0) {
      if (dir * (t + h) > dir * t1) h = t1 - t;
      if (std::abs(h) < hmin) {
        throw WeylError(ErrorCode::IntegratorFailure,
                        "step size underflow near t = " + std::to_string(t));
      }
      CMatrix k2 = rhs_(t + c2 * h, y + h * (a21 * k1));
      CMatrix k3 = rhs_(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      CMatrix k4 = rhs_(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      CMatrix k5 = rhs_(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      CMatrix k6 =
          rhs_(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      CMatrix ynew =
          y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      CMatrix k7 = rhs_(t + h, ynew);
      CMatrix err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double scale =
          atol_ + rtol_ * std::max(y.cwiseAbs().maxCoeff(), ynew.cwiseAbs().maxCoeff());
      const double en = err.cwiseAbs().maxCoeff() / scale;
      if (en <= 1.0) {
        t += h;
        y.swap(ynew);
        k1.swap(k7);
        rejects_in_a_row = 0;
        const double grow = (en > 0.0) ? 0.9 * std::pow(en, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        suggested_ = std::abs(h);
      } else {
        ++rejects_in_a_row;
        if (rejects_in_a_row > 60) {
          throw WeylError(ErrorCode::IntegratorFailure,
                          "repeated step rejection near t = " + std::to_string(t));
        }
        h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
      }
    }
  }

 private:
  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double d1 = 5179.0 / 57600.0, d3 = 7571.0 / 16695.0, d4 = 393.0 / 640.0,
                          d5 = -92097.0 / 339200.0, d6 = 187.0 / 2100.0, d7 = 1.0 / 40.0;
  static constexpr double e1 = b1 - d1, e3 = b3 - d3, e4 = b4 - d4, e5 = b5 - d5,
                          e6 = b6 - d6, e7 = -d7;

  Rhs rhs_;
  double rtol_;
  double atol_;
  double suggested_ = 0.0;
};

}  // namespace weylscale
