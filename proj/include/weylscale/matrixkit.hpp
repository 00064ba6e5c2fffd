#pragma once

#include <Eigen/Dense>
#include <complex>

#include "weylscale/errors.hpp"

namespace weylscale {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kCondCap = 1e12;

// M = re_part + i*im_part with both parts Hermitian:
// re_part = (M + M*)/2, im_part = (M - M*)/(2i).
struct HermitianDecomposition {
  CMatrix re_part;
  CMatrix im_part;
};

HermitianDecomposition hermitian_split(const CMatrix& m);

// Hermitian real part (M + M*)/2.
CMatrix re_herm(const CMatrix& m);

struct PsdReport {
  bool psd = false;
  double min_eig = 0.0;
};

// Checks M (required Hermitian up to rounding) for positive semidefiniteness.
// Eigenvalues are allowed to dip below zero by tol*max(1, ||M||).
PsdReport psd_check(const CMatrix& m, double tol = 1e-9);

// Hermitian psd square root; eigenvalues in [-tol*max(1,||M||), 0) are clamped to 0.
CMatrix psd_sqrt(const CMatrix& m, double tol = 1e-9);

// Hermitian positive-definite inverse square root (same clamping rule on tiny
// negatives; throws IndefiniteInput if any eigenvalue is below the band or zero
// after clamping).
CMatrix psd_inv_sqrt(const CMatrix& m, double tol = 1e-9);

// big >= small in the Loewner order within the psd tolerance band.
bool loewner_geq(const CMatrix& big, const CMatrix& small, double tol = 1e-9);

// 2n x 2n canonical symplectic structure [[0, -I], [I, 0]].
CMatrix J_matrix(int n);

// Spectral norm (largest singular value).
double matrix_norm(const CMatrix& m);

// 2-norm condition number; returns +inf for singular input.
double cond_2(const CMatrix& m);

// Solve a*x = b, throwing `code` when cond_2(a) exceeds kCondCap.
CMatrix solve_capped(const CMatrix& a, const CMatrix& b, ErrorCode code,
                     const std::string& context);

CMatrix inverse_capped(const CMatrix& a, ErrorCode code, const std::string& context);

}  // namespace weylscale
