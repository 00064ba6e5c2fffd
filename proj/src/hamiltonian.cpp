#include "weylscale/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "weylscale/rk.hpp"

namespace weylscale {

namespace {

void require_traj(const TimeScale& ts, const std::vector<CMatrix>& traj, const char* what) {
  if (static_cast<int>(traj.size()) != ts.npoints()) {
    throw WeylError(ErrorCode::LengthMismatch,
                    std::string(what) + ": trajectory has " + std::to_string(traj.size()) +
                        " samples for " + std::to_string(ts.npoints()) + " grid points");
  }
}

}  // namespace

CMatrix CoefficientSystem::A(double t) const {
  CMatrix a = CMatrix::Zero(2 * n, 2 * n);
  a.topLeftCorner(n, n) = A1(t);
  a.bottomRightCorner(n, n) = A2(t);
  return a;
}

CMatrix CoefficientSystem::B(double t) const {
  CMatrix b(2 * n, 2 * n);
  b.topLeftCorner(n, n) = B1(t);
  b.topRightCorner(n, n) = B2(t);
  b.bottomLeftCorner(n, n) = B3(t);
  b.bottomRightCorner(n, n) = B4(t);
  return b;
}

CMatrix CoefficientSystem::E2(double t, double mu) const {
  const CMatrix m = CMatrix::Identity(n, n) + mu * B2(t);
  return inverse_capped(m, ErrorCode::SingularE2,
                        "E2 at t = " + std::to_string(t));
}

TransformSlices transforms(const CoefficientSystem& sys, double t, double mu,
                           Complex lambda) {
  const int n = sys.n;
  const CMatrix id = CMatrix::Identity(n, n);
  TransformSlices s;
  if (mu == 0.0) {
    s.H = CMatrix::Identity(2 * n, 2 * n);
    s.Htilde = CMatrix::Identity(2 * n, 2 * n);
    s.N = CMatrix::Zero(2 * n, 2 * n);
    return s;
  }
  const CMatrix e2 = sys.E2(t, mu);
  s.H = CMatrix::Zero(2 * n, 2 * n);
  s.H.topLeftCorner(n, n) = id;
  s.H.bottomLeftCorner(n, n) = -mu * e2 * (lambda * sys.A1(t) + sys.B1(t));
  s.H.bottomRightCorner(n, n) = e2;

  const CMatrix e2s = e2.adjoint();
  s.Htilde = CMatrix::Zero(2 * n, 2 * n);
  s.Htilde.topLeftCorner(n, n) = e2s;
  s.Htilde.topRightCorner(n, n) =
      -mu * e2s * (std::conj(lambda) * sys.A2(t) + sys.B4(t).adjoint());
  s.Htilde.bottomRightCorner(n, n) = id;

  s.N = CMatrix::Zero(2 * n, 2 * n);
  s.N.bottomLeftCorner(n, n) = -mu * e2;
  return s;
}

CMatrix transfer_K(const CoefficientSystem& sys, double t, double mu, Complex lambda) {
  const TransformSlices s = transforms(sys, t, mu, lambda);
  const CMatrix j = J_matrix(sys.n);
  return -j * (lambda * sys.A(t) + sys.B(t)) * s.H;
}

CMatrix forward_step(const CoefficientSystem& sys, double t, double mu, Complex lambda) {
  return CMatrix::Identity(2 * sys.n, 2 * sys.n) + mu * transfer_K(sys, t, mu, lambda);
}

CMatrix adjoint_step(const CoefficientSystem& sys, double t, double mu, Complex lambda) {
  const CMatrix x = forward_step(sys, t, mu, lambda);
  const CMatrix j = J_matrix(sys.n);
  const CMatrix w = solve_capped(x.adjoint(), j, ErrorCode::SingularAt,
                                 "adjoint step at t = " + std::to_string(t));
  return -j * w;
}

RegressivityReport check_regressive(const CoefficientSystem& sys, const TimeScale& ts) {
  RegressivityReport r;
  r.min_sv_b2 = std::numeric_limits<double>::infinity();
  r.min_sv_b3 = std::numeric_limits<double>::infinity();
  r.argmin_t = ts.t0();
  if (ts.kind() == ScaleKind::Continuous) {
    r.min_sv_b2 = 1.0;
    r.min_sv_b3 = 1.0;
    return r;
  }
  const CMatrix id = CMatrix::Identity(sys.n, sys.n);
  for (int k = 0; k + 1 < ts.npoints(); ++k) {
    const double t = ts.point(k);
    const double mu = ts.mu(k);
    auto min_sv = [](const CMatrix& m) {
      Eigen::JacobiSVD<CMatrix> svd(m);
      return svd.singularValues()(svd.singularValues().size() - 1);
    };
    const double s2 = min_sv(id + mu * sys.B2(t));
    const double s3 = min_sv(id + mu * sys.B3(t));
    if (std::min(s2, s3) < std::min(r.min_sv_b2, r.min_sv_b3)) r.argmin_t = t;
    r.min_sv_b2 = std::min(r.min_sv_b2, s2);
    r.min_sv_b3 = std::min(r.min_sv_b3, s3);
  }
  r.ok = std::min(r.min_sv_b2, r.min_sv_b3) > 1.0 / kCondCap;
  return r;
}

void require_regressive(const CoefficientSystem& sys, const TimeScale& ts) {
  const RegressivityReport r = check_regressive(sys, ts);
  if (!r.ok) {
    throw WeylError(ErrorCode::SingularAt,
                    "I + mu B2 or I + mu B3 nearly singular at t = " +
                        std::to_string(r.argmin_t));
  }
}

std::vector<CMatrix> propagate_forward(const CoefficientSystem& sys, const TimeScale& ts,
                                       Complex lambda, const CMatrix& init, double rtol,
                                       double atol) {
  if (init.rows() != 2 * sys.n) {
    throw WeylError(ErrorCode::DimensionMismatch, "propagate_forward: init rows");
  }
  std::vector<CMatrix> out(ts.npoints());
  out[0] = init;
  if (ts.kind() == ScaleKind::Discrete) {
    for (int k = 0; k + 1 < ts.npoints(); ++k) {
      out[k + 1] = forward_step(sys, ts.point(k), ts.mu(k), lambda) * out[k];
    }
    return out;
  }
  const CMatrix j = J_matrix(sys.n);
  Dopri5 stepper(
      [&](double t, const CMatrix& y) -> CMatrix {
        return -j * ((lambda * sys.A(t) + sys.B(t)) * y);
      },
      rtol, atol);
  CMatrix y = init;
  for (int k = 0; k + 1 < ts.npoints(); ++k) {
    stepper.advance(ts.point(k), ts.point(k + 1), y);
    out[k + 1] = y;
  }
  return out;
}

std::vector<CMatrix> propagate_adjoint(const CoefficientSystem& sys, const TimeScale& ts,
                                       Complex lambda, const CMatrix& init, double rtol,
                                       double atol) {
  if (init.rows() != 2 * sys.n) {
    throw WeylError(ErrorCode::DimensionMismatch, "propagate_adjoint: init rows");
  }
  std::vector<CMatrix> out(ts.npoints());
  out[0] = init;
  const CMatrix j = J_matrix(sys.n);
  if (ts.kind() == ScaleKind::Discrete) {
    for (int k = 0; k + 1 < ts.npoints(); ++k) {
      const CMatrix x = forward_step(sys, ts.point(k), ts.mu(k), lambda);
      const CMatrix w = solve_capped(x.adjoint(), j * out[k], ErrorCode::SingularAt,
                                     "adjoint propagation at t = " +
                                         std::to_string(ts.point(k)));
      out[k + 1] = -j * w;
    }
    return out;
  }
  const Complex lbar = std::conj(lambda);
  Dopri5 stepper(
      [&](double t, const CMatrix& z) -> CMatrix {
        return -j * ((lbar * sys.A(t) + sys.B(t).adjoint()) * z);
      },
      rtol, atol);
  CMatrix z = init;
  for (int k = 0; k + 1 < ts.npoints(); ++k) {
    stepper.advance(ts.point(k), ts.point(k + 1), z);
    out[k + 1] = z;
  }
  return out;
}

FundamentalTrajectory fundamental_pair(const CoefficientSystem& sys, const TimeScale& ts,
                                       Complex lambda, double rtol, double atol) {
  const CMatrix j = J_matrix(sys.n);
  FundamentalTrajectory tr;
  tr.lambda = lambda;
  tr.yhat = propagate_forward(sys, ts, lambda, j, rtol, atol);
  tr.zhat = propagate_adjoint(sys, ts, lambda, j, rtol, atol);
  for (int k = 0; k < ts.npoints(); ++k) {
    const double cond = cond_2(tr.yhat[k]);
    tr.max_cond = std::max(tr.max_cond, cond);
    if (cond <= kCondCap) {
      const CMatrix yinv = tr.yhat[k].partialPivLu().inverse();
      const CMatrix zf = -j * yinv.adjoint() * j;
      const double gap = (tr.zhat[k] - zf).cwiseAbs().maxCoeff();
      tr.adjoint_mismatch = std::max(tr.adjoint_mismatch, gap);
      // The two routes legitimately drift apart like eps * cond(Yhat), so the
      // anomaly threshold must scale with the conditioning; a fixed band would
      // reject correct trajectories long before the cond cap is reached.
      const double band = std::max(1e-8, 1e-13 * cond) * std::max(1.0, zf.cwiseAbs().maxCoeff());
      if (gap > band) {
        throw WeylError(ErrorCode::AdjointMismatch,
                        "direct and inverse-formula adjoint trajectories disagree by " +
                            std::to_string(gap) + " at t = " + std::to_string(ts.point(k)));
      }
      tr.zhat[k] = zf;
    }
  }
  return tr;
}

std::vector<CMatrix> unhat_forward(const CoefficientSystem& sys, const TimeScale& ts,
                                   Complex lambda, const std::vector<CMatrix>& yhat) {
  require_traj(ts, yhat, "unhat_forward");
  std::vector<CMatrix> out(yhat.size());
  for (int k = 0; k < ts.npoints(); ++k) {
    out[k] = transforms(sys, ts.point(k), ts.mu(k), lambda).H * yhat[k];
  }
  return out;
}

CMatrix unhat_adjoint_at(const CoefficientSystem& sys, const TimeScale& ts, Complex lambda,
                         const std::vector<CMatrix>& zhat, int k) {
  require_traj(ts, zhat, "unhat_adjoint_at");
  if (ts.kind() == ScaleKind::Continuous) return zhat[k];
  if (ts.is_last(k)) {
    throw WeylError(ErrorCode::MissingSigmaSample,
                    "unhat_adjoint_at: sigma sample past the horizon at t = " +
                        std::to_string(ts.point(k)));
  }
  return transforms(sys, ts.point(k), ts.mu(k), lambda).Htilde * zhat[k + 1];
}

std::vector<CMatrix> unhat_adjoint(const CoefficientSystem& sys, const TimeScale& ts,
                                   Complex lambda, const std::vector<CMatrix>& zhat) {
  require_traj(ts, zhat, "unhat_adjoint");
  std::vector<CMatrix> out(zhat.size());
  const int last = ts.npoints() - 1;
  for (int k = 0; k < last; ++k) out[k] = unhat_adjoint_at(sys, ts, lambda, zhat, k);
  // Truncation fill: mu(last) = 0 collapses Htilde to the identity.
  out[last] = zhat[last];
  return out;
}

GreensCheck greens_formula(const CoefficientSystem& sys, const TimeScale& ts,
                           Complex lambda_y, Complex lambda_z,
                           const std::vector<CMatrix>& yhat,
                           const std::vector<CMatrix>& zhat, int ka, int kb) {
  require_traj(ts, yhat, "greens_formula");
  require_traj(ts, zhat, "greens_formula");
  if (ka < 0 || kb >= ts.npoints() || kb < ka) {
    throw WeylError(ErrorCode::RangeMismatch, "greens_formula: bad index range");
  }
  const int n = sys.n;
  const CMatrix j = J_matrix(n);
  GreensCheck g;
  g.rhs = zhat[kb].adjoint() * j * yhat[kb] - zhat[ka].adjoint() * j * yhat[ka];

  if (ts.kind() == ScaleKind::Discrete) {
    const Eigen::Index my = yhat[0].cols(), mz = zhat[0].cols();
    CMatrix acc = CMatrix::Zero(mz, my);
    for (int k = ka; k < kb; ++k) {
      const double mu = ts.mu(k);
      // Plain samples by data shift: (y1(t), y2(t)) = (yhat1(t), yhat2(sigma(t))).
      CMatrix y(2 * n, my), z(2 * n, mz);
      y.topRows(n) = yhat[k].topRows(n);
      y.bottomRows(n) = yhat[k + 1].bottomRows(n);
      z.topRows(n) = zhat[k].topRows(n);
      z.bottomRows(n) = zhat[k + 1].bottomRows(n);
      const CMatrix dy = (yhat[k + 1] - yhat[k]) / mu;
      const CMatrix dz = (zhat[k + 1] - zhat[k]) / mu;
      acc += mu * (z.adjoint() * j * dy - (j * dz).adjoint() * y);
    }
    g.lhs = acc;
  } else {
    const Complex lzbar = std::conj(lambda_z);
    auto integrand = [&](int k) -> CMatrix {
      const double t = ts.point(k);
      const CMatrix lyab = lambda_y * sys.A(t) + sys.B(t);
      const CMatrix dy = -j * (lyab * yhat[k]);
      const CMatrix dz = -j * ((lzbar * sys.A(t) + sys.B(t).adjoint()) * zhat[k]);
      return zhat[k].adjoint() * j * dy - (j * dz).adjoint() * yhat[k];
    };
    g.lhs = ts.delta_integral(integrand, ka, kb);
  }
  g.residual = (g.lhs - g.rhs).cwiseAbs().maxCoeff();
  return g;
}

}  // namespace weylscale
