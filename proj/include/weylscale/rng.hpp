#pragma once

#include <random>

#include "weylscale/matrixkit.hpp"

namespace weylscale {

// Seeded draws used by property tests and the CLI forcing generator.
// All draws go through one engine so a fixed seed reproduces a whole run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(engine_);
  }

  double normal() {
    std::normal_distribution<double> d(0.0, 1.0);
    return d(engine_);
  }

  Complex cnormal() { return Complex(normal(), normal()) / std::sqrt(2.0); }

  CMatrix ginibre(int rows, int cols) {
    CMatrix g(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) g(r, c) = cnormal();
    return g;
  }

  // Haar-ish unitary from the QR factor of a Ginibre draw.
  CMatrix unitary(int n) {
    Eigen::HouseholderQR<CMatrix> qr(ginibre(n, n));
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < n; ++k) {
      const Complex d = r(k, k);
      const double a = std::abs(d);
      q.col(k) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
    }
    return q;
  }

  CMatrix hermitian(int n, double scale = 1.0) {
    CMatrix g = ginibre(n, n);
    return scale * re_herm(g);
  }

  CMatrix psd(int n, double scale = 1.0) {
    CMatrix g = ginibre(n, n);
    return scale * (g * g.adjoint());
  }

  // Rank-deficient psd draw (rank r < n).
  CMatrix psd_rank(int n, int rank, double scale = 1.0) {
    CMatrix g = ginibre(n, rank);
    return scale * (g * g.adjoint());
  }

  // ||V|| <= 1; drawn as unitary * contraction factor.
  CMatrix contraction(int n) {
    CMatrix v = unitary(n);
    return uniform(0.0, 1.0) * v;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace weylscale
