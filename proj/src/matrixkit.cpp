#include "weylscale/matrixkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weylscale {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::MissingPrepoint: return "MissingPrepoint";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::IndefiniteInput: return "IndefiniteInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularAt: return "SingularAt";
    case ErrorCode::SingularE2: return "SingularE2";
    case ErrorCode::SingularU: return "SingularU";
    case ErrorCode::IntegratorFailure: return "IntegratorFailure";
    case ErrorCode::AdjointMismatch: return "AdjointMismatch";
    case ErrorCode::MissingSigmaSample: return "MissingSigmaSample";
    case ErrorCode::NegativeRadius: return "NegativeRadius";
    case ErrorCode::DiskUndefined: return "DiskUndefined";
    case ErrorCode::NotContraction: return "NotContraction";
    case ErrorCode::ConeViolation: return "ConeViolation";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::ZeroP: return "ZeroP";
    case ErrorCode::NonPositiveW: return "NonPositiveW";
    case ErrorCode::ZeroP2: return "ZeroP2";
    case ErrorCode::ZeroPn: return "ZeroPn";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonPositiveParams: return "NonPositiveParams";
    case ErrorCode::VariantMismatch: return "VariantMismatch";
    case ErrorCode::RangeMismatch: return "RangeMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw WeylError(ErrorCode::NonSquare, std::string(what) + ": matrix is " +
                                              std::to_string(m.rows()) + "x" +
                                              std::to_string(m.cols()));
  }
}

// Hermitian eigenvalues after verifying M is Hermitian up to rounding noise.
Eigen::SelfAdjointEigenSolver<CMatrix> herm_eigs(const CMatrix& m, const char* what) {
  require_square(m, what);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double herm_gap = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm_gap > 1e-12 * scale) {
    throw WeylError(ErrorCode::NotHermitian,
                    std::string(what) + ": anti-Hermitian part " + std::to_string(herm_gap));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(re_herm(m));
  if (es.info() != Eigen::Success) {
    throw WeylError(ErrorCode::NumericFailure, std::string(what) + ": eigensolver failed");
  }
  return es;
}

}  // namespace

HermitianDecomposition hermitian_split(const CMatrix& m) {
  require_square(m, "hermitian_split");
  const Complex i01(0.0, 1.0);
  HermitianDecomposition d;
  d.re_part = 0.5 * (m + m.adjoint());
  d.im_part = (m - m.adjoint()) / (2.0 * i01);
  return d;
}

CMatrix re_herm(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

PsdReport psd_check(const CMatrix& m, double tol) {
  auto es = herm_eigs(m, "psd_check");
  PsdReport r;
  r.min_eig = es.eigenvalues().minCoeff();
  const double scale = std::max(1.0, matrix_norm(m));
  r.psd = r.min_eig >= -tol * scale;
  return r;
}

CMatrix psd_sqrt(const CMatrix& m, double tol) {
  auto es = herm_eigs(m, "psd_sqrt");
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  RVector vals = es.eigenvalues();
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    if (vals[k] < 0.0) {
      if (vals[k] < -tol * scale) {
        throw WeylError(ErrorCode::IndefiniteInput,
                        "psd_sqrt: eigenvalue " + std::to_string(vals[k]));
      }
      vals[k] = 0.0;
    }
  }
  return es.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
         es.eigenvectors().adjoint();
}

CMatrix psd_inv_sqrt(const CMatrix& m, double tol) {
  auto es = herm_eigs(m, "psd_inv_sqrt");
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  RVector vals = es.eigenvalues();
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    if (vals[k] <= 0.0) {
      if (vals[k] < -tol * scale) {
        throw WeylError(ErrorCode::IndefiniteInput,
                        "psd_inv_sqrt: eigenvalue " + std::to_string(vals[k]));
      }
      throw WeylError(ErrorCode::IndefiniteInput, "psd_inv_sqrt: zero eigenvalue");
    }
  }
  return es.eigenvectors() * vals.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().adjoint();
}

bool loewner_geq(const CMatrix& big, const CMatrix& small, double tol) {
  if (big.rows() != small.rows() || big.cols() != small.cols()) {
    throw WeylError(ErrorCode::DimensionMismatch,
                    "loewner_geq: " + std::to_string(big.rows()) + "x" +
                        std::to_string(big.cols()) + " vs " + std::to_string(small.rows()) +
                        "x" + std::to_string(small.cols()));
  }
  return psd_check(big - small, tol).psd;
}

CMatrix J_matrix(int n) {
  if (n <= 0) {
    throw WeylError(ErrorCode::NonPositiveParams, "J_matrix: n = " + std::to_string(n));
  }
  CMatrix j = CMatrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -CMatrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = CMatrix::Identity(n, n);
  return j;
}

double matrix_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

double cond_2(const CMatrix& m) {
  require_square(m, "cond_2");
  Eigen::JacobiSVD<CMatrix> svd(m);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double smax = svd.singularValues()(0);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

CMatrix solve_capped(const CMatrix& a, const CMatrix& b, ErrorCode code,
                     const std::string& context) {
  require_square(a, context.c_str());
  if (a.rows() != b.rows()) {
    throw WeylError(ErrorCode::DimensionMismatch, context + ": rhs rows mismatch");
  }
  const double cond = cond_2(a);
  if (!(cond <= kCondCap)) {
    throw WeylError(code, context + ": condition number " + std::to_string(cond));
  }
  return a.partialPivLu().solve(b);
}

CMatrix inverse_capped(const CMatrix& a, ErrorCode code, const std::string& context) {
  return solve_capped(a, CMatrix::Identity(a.rows(), a.cols()), code, context);
}

}  // namespace weylscale
