#include "weylscale/mfunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "weylscale/rk.hpp"
#include "weylscale/rng.hpp"

namespace weylscale {

namespace {

CMatrix stack_identity(const CMatrix& m) {
  const Eigen::Index n = m.cols();
  CMatrix s(m.rows() + n, n);
  s.topRows(n) = CMatrix::Identity(n, n);
  s.bottomRows(m.rows()) = m;
  return s;
}

struct ThinQR {
  CMatrix Q;  // 2n x n, orthonormal columns
  CMatrix R;  // n x n upper triangular, positive real diagonal
};

ThinQR thin_qr(const CMatrix& f) {
  const Eigen::Index rows = f.rows(), cols = f.cols();
  Eigen::HouseholderQR<CMatrix> qr(f);
  ThinQR out;
  out.Q = qr.householderQ() * CMatrix::Identity(rows, cols);
  out.R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < cols; ++j) {
    const Complex d = out.R(j, j);
    const double a = std::abs(d);
    if (a > 0.0) {
      const Complex ph = d / a;
      out.Q.col(j) *= ph;
      out.R.row(j) *= std::conj(ph);
    }
  }
  return out;
}

TimeScale extend_scale(const TimeScale& ts, double buffer, int* eval_npoints) {
  *eval_npoints = ts.npoints();
  if (buffer <= 0.0) return ts;
  if (ts.kind() == ScaleKind::Continuous) {
    const double h = ts.spacing(0);
    const int extra = static_cast<int>(std::ceil(buffer / h - 1e-12));
    return TimeScale::make_continuous(ts.t0(), ts.horizon() + extra * h, h);
  }
  const int n = ts.npoints();
  const double gap = ts.point(n - 1) - ts.point(n - 2);
  const int extra = static_cast<int>(std::ceil(buffer / gap - 1e-12));
  std::vector<double> pts(n + extra);
  for (int k = 0; k < n; ++k) pts[k] = ts.point(k);
  for (int j = 1; j <= extra; ++j) pts[n - 1 + j] = ts.horizon() + j * gap;
  return TimeScale::make_discrete(ts.prepoint(), std::move(pts));
}

// Backward orthonormalized sweep of an n-column frame of the forward or the
// adjoint system; returns normalized samples on all nodes of `ts` with the
// bottom block at t0 equal to the identity.
std::vector<CMatrix> backward_frame(const CoefficientSystem& sys, const TimeScale& ts,
                                    Complex lambda, bool adjoint_side, double rtol,
                                    double atol) {
  const int n = sys.n;
  const int npts = ts.npoints();
  const CMatrix j = J_matrix(n);
  Rng seed_rng(0x5eed5eedULL + (adjoint_side ? 1 : 0));
  CMatrix f = thin_qr(seed_rng.ginibre(2 * n, n)).Q;

  std::vector<CMatrix> q(npts);
  std::vector<CMatrix> r(npts);  // r[k] from the QR at node k, k < npts-1 used
  q[npts - 1] = f;
  const Complex lbar = std::conj(lambda);
  Dopri5 stepper(
      [&](double t, const CMatrix& y) -> CMatrix {
        if (adjoint_side) return -j * ((lbar * sys.A(t) + sys.B(t).adjoint()) * y);
        return -j * ((lambda * sys.A(t) + sys.B(t)) * y);
      },
      rtol, atol);
  for (int k = npts - 2; k >= 0; --k) {
    CMatrix raw;
    if (ts.kind() == ScaleKind::Discrete) {
      const CMatrix x = forward_step(sys, ts.point(k), ts.mu(k), lambda);
      if (adjoint_side) {
        raw = -j * (x.adjoint() * (j * f));
      } else {
        raw = solve_capped(x, f, ErrorCode::SingularAt,
                           "backward sweep at t = " + std::to_string(ts.point(k)));
      }
    } else {
      raw = f;
      stepper.advance(ts.point(k + 1), ts.point(k), raw);
    }
    ThinQR fac = thin_qr(raw);
    q[k] = fac.Q;
    r[k] = fac.R;
    f = fac.Q;
  }

  std::vector<CMatrix> out(npts);
  CMatrix c = inverse_capped(q[0].bottomRows(n), ErrorCode::NumericFailure,
                             "recessive frame normalization at t0");
  out[0] = q[0] * c;
  for (int k = 1; k < npts; ++k) {
    c = r[k - 1].triangularView<Eigen::Upper>().solve(c);
    out[k] = q[k] * c;
  }
  return out;
}

}  // namespace

MEstimate m_estimate(const CoefficientSystem& sys, const RotationU& rot, const TimeScale& ts,
                     Complex lambda, const std::vector<double>& horizons, double rtol,
                     double atol) {
  if (horizons.empty()) {
    throw WeylError(ErrorCode::RangeMismatch, "m_estimate: empty horizon list");
  }
  const FundamentalTrajectory traj = fundamental_pair(sys, ts, lambda, rtol, atol);
  MEstimate est;
  est.lambda = lambda;
  est.horizons = horizons;
  std::vector<WeylDisk> disks;
  for (double h : horizons) {
    const int k = ts.index_of(h);
    WeylDisk d = weyl_disk(sys, rot, ts, traj, k);
    if (!d.p_positive) {
      throw WeylError(ErrorCode::DiskUndefined,
                      "m_estimate: P not positive definite at horizon " + std::to_string(h));
    }
    est.centers.push_back(d.center);
    est.radii.push_back(d.radius);
    disks.push_back(std::move(d));
  }
  est.M = est.centers.back();
  est.cauchy_gap = 0.0;
  est.containment_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < disks.size(); ++i) {
    est.cauchy_gap =
        std::max(est.cauchy_gap, (est.centers[i] - est.M).cwiseAbs().maxCoeff());
    est.containment_margin =
        std::min(est.containment_margin, disk_contains(disks[i], est.M).margin);
  }
  return est;
}

WeylSolutionPair weyl_solutions(const CoefficientSystem& sys, const TimeScale& ts,
                                const FundamentalTrajectory& traj, const CMatrix& m) {
  const int n = sys.n;
  if (m.rows() != n || m.cols() != n) {
    throw WeylError(ErrorCode::DimensionMismatch, "weyl_solutions: M must be n x n");
  }
  WeylSolutionPair pair;
  pair.lambda = traj.lambda;
  pair.M = m;
  pair.M_adjoint = m;
  const CMatrix im = stack_identity(m);
  const CMatrix ims = stack_identity(m.adjoint());
  pair.psi_hat.resize(traj.yhat.size());
  pair.zeta_hat.resize(traj.zhat.size());
  for (std::size_t k = 0; k < traj.yhat.size(); ++k) {
    pair.psi_hat[k] = traj.yhat[k] * im;
    pair.zeta_hat[k] = traj.zhat[k] * ims;
  }
  pair.psi = unhat_forward(sys, ts, pair.lambda, pair.psi_hat);
  pair.zeta = unhat_adjoint(sys, ts, pair.lambda, pair.zeta_hat);
  return pair;
}

WeylSolutionPair stable_weyl_pair(const CoefficientSystem& sys, const TimeScale& ts,
                                  Complex lambda, double buffer, double rtol, double atol) {
  int eval_npoints = 0;
  const TimeScale ext = extend_scale(ts, buffer, &eval_npoints);
  WeylSolutionPair pair;
  pair.lambda = lambda;
  pair.psi_hat = backward_frame(sys, ext, lambda, false, rtol, atol);
  pair.zeta_hat = backward_frame(sys, ext, lambda, true, rtol, atol);
  pair.M = -pair.psi_hat[0].topRows(sys.n);
  pair.M_adjoint = (-pair.zeta_hat[0].topRows(sys.n)).adjoint();
  pair.psi = unhat_forward(sys, ext, lambda, pair.psi_hat);
  pair.zeta = unhat_adjoint(sys, ext, lambda, pair.zeta_hat);
  pair.psi_hat.resize(eval_npoints);
  pair.zeta_hat.resize(eval_npoints);
  pair.psi.resize(eval_npoints);
  pair.zeta.resize(eval_npoints);
  return pair;
}

CouplingReport coupling_residuals(const TimeScale& ts, const std::vector<CMatrix>& zeta_hat,
                                  const std::vector<CMatrix>& psi_hat,
                                  const std::vector<CMatrix>& phi_hat) {
  const std::size_t npts = static_cast<std::size_t>(ts.npoints());
  if (zeta_hat.size() < npts || psi_hat.size() < npts || phi_hat.size() < npts) {
    throw WeylError(ErrorCode::LengthMismatch, "coupling_residuals: short trajectories");
  }
  const Eigen::Index n = psi_hat[0].cols();
  const CMatrix j = J_matrix(static_cast<int>(n));
  const CMatrix id = CMatrix::Identity(n, n);
  CouplingReport rep;
  for (std::size_t k = 0; k < npts; ++k) {
    const CMatrix c1 = zeta_hat[k].adjoint() * j * psi_hat[k];
    const CMatrix c2 = zeta_hat[k].adjoint() * j * phi_hat[k] + id;
    rep.max_psi_coupling = std::max(rep.max_psi_coupling, c1.cwiseAbs().maxCoeff());
    rep.max_phi_coupling = std::max(rep.max_phi_coupling, c2.cwiseAbs().maxCoeff());
  }
  return rep;
}

MDifferenceCheck m_difference(const CoefficientSystem& sys, const TimeScale& ts,
                              const WeylSolutionPair& pair_lambda,
                              const WeylSolutionPair& pair_xi, int k) {
  const int n = sys.n;
  const CMatrix j = J_matrix(n);
  const Complex lam = pair_lambda.lambda;
  const Complex xi = pair_xi.lambda;
  auto integrand = [&](int s) -> CMatrix {
    return pair_xi.zeta[s].adjoint() * sys.A(ts.point(s)) * pair_lambda.psi[s];
  };
  const CMatrix integral = ts.delta_integral(integrand, 0, k);
  MDifferenceCheck chk;
  // The zeta-side constant of pair_xi is what the identity pairs against.
  chk.direct = pair_lambda.M - pair_xi.M_adjoint - (lam - xi) * integral;
  chk.boundary = pair_xi.zeta_hat[k].adjoint() * j * pair_lambda.psi_hat[k];
  chk.direct_norm = chk.direct.cwiseAbs().maxCoeff();
  chk.boundary_norm = chk.boundary.cwiseAbs().maxCoeff();
  chk.cross_gap = (chk.direct + chk.boundary).cwiseAbs().maxCoeff();
  return chk;
}

}  // namespace weylscale
