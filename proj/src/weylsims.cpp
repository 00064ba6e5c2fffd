#include "weylscale/weylsims.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weylscale {

namespace {

CMatrix block_diag(const CMatrix& a, const CMatrix& b) {
  CMatrix m = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

RVector herm_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(re_herm(m));
  if (es.info() != Eigen::Success) {
    throw WeylError(ErrorCode::NumericFailure, "eigensolver failed");
  }
  return es.eigenvalues();
}

}  // namespace

RotationU RotationU::from_eta(int n, double eta) {
  const Complex u = -std::exp(Complex(0.0, eta));
  return from_matrix(u * CMatrix::Identity(n, n));
}

RotationU RotationU::from_matrix(const CMatrix& u) {
  if (u.rows() != u.cols() || u.rows() == 0) {
    throw WeylError(ErrorCode::NonSquare, "rotation block must be square");
  }
  RotationU rot;
  rot.U = u;
  const CMatrix uinv = inverse_capped(u, ErrorCode::SingularU, "rotation block");
  rot.u2n = block_diag(u, -u.adjoint());
  rot.u2n_inv = block_diag(uinv, -uinv.adjoint());
  return rot;
}

CMatrix rot_W(const CoefficientSystem& sys, const RotationU& rot, double t, Complex lambda) {
  return re_herm(rot.u2n * (lambda * sys.A(t) + sys.B(t)));
}

CMatrix rot_Wtilde(const CoefficientSystem& sys, const RotationU& rot, double t,
                   Complex lambda) {
  return re_herm(rot.u2n_inv * (std::conj(lambda) * sys.A(t) + sys.B(t).adjoint()));
}

CMatrix rot_Atilde(const CoefficientSystem& sys, const RotationU& rot, double t) {
  return rot.u2n * sys.A(t) * rot.u2n.adjoint();
}

SignatureReport rotation_signature(const RotationU& rot) {
  const int n = static_cast<int>(rot.U.rows());
  const CMatrix m = rot.u2n * J_matrix(n);
  const RVector vals = herm_eigenvalues(m);
  const double band = 1e-10 * std::max(1.0, vals.cwiseAbs().maxCoeff());
  SignatureReport r;
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    if (vals[k] > band)
      ++r.n_pos;
    else if (vals[k] < -band)
      ++r.n_neg;
    else
      ++r.n_zero;
  }
  r.ok = (r.n_pos == n && r.n_neg == n && r.n_zero == 0);
  return r;
}

AdmissibleReport check_admissible(const CoefficientSystem& sys, const RotationU& rot,
                                  const TimeScale& ts, Complex lambda0) {
  AdmissibleReport rep;
  rep.min_eig = std::numeric_limits<double>::infinity();
  for (int k = 0; k < ts.npoints(); ++k) {
    const double t = ts.point(k);
    const double m = herm_eigenvalues(rot_W(sys, rot, t, lambda0)).minCoeff();
    if (m < rep.min_eig) {
      rep.min_eig = m;
      rep.argmin_t = t;
    }
  }
  rep.ok = rep.min_eig >= -1e-10;
  return rep;
}

double cone_margin(const CoefficientSystem& sys, const RotationU& rot, const TimeScale& ts,
                   Complex lambda0, Complex lambda) {
  double delta = std::numeric_limits<double>::infinity();
  const Complex c = lambda - lambda0;
  for (int k = 0; k < ts.npoints(); ++k) {
    const double t = ts.point(k);
    const CMatrix l = re_herm(c * rot.u2n * sys.A(t));
    const CMatrix atil = re_herm(rot_Atilde(sys, rot, t));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(atil);
    const double amax = es.eigenvalues().cwiseAbs().maxCoeff();
    if (amax <= 0.0) continue;  // A(t) = 0: nothing to bound here
    const double cut = 1e-10 * amax;
    std::vector<int> in_range, off_range;
    for (int j = 0; j < es.eigenvalues().size(); ++j) {
      (es.eigenvalues()[j] > cut ? in_range : off_range).push_back(j);
    }
    if (!off_range.empty()) {
      CMatrix vperp(l.rows(), static_cast<Eigen::Index>(off_range.size()));
      for (std::size_t j = 0; j < off_range.size(); ++j) {
        vperp.col(j) = es.eigenvectors().col(off_range[j]);
      }
      const double off_mass = (l * vperp).cwiseAbs().maxCoeff();
      if (off_mass > 1e-8 * std::max(1.0, l.cwiseAbs().maxCoeff())) {
        return -std::numeric_limits<double>::infinity();
      }
    }
    if (in_range.empty()) continue;
    CMatrix v(l.rows(), static_cast<Eigen::Index>(in_range.size()));
    RVector d(static_cast<Eigen::Index>(in_range.size()));
    for (std::size_t j = 0; j < in_range.size(); ++j) {
      v.col(j) = es.eigenvectors().col(in_range[j]);
      d[static_cast<Eigen::Index>(j)] = es.eigenvalues()[in_range[j]];
    }
    const CMatrix dis = d.cwiseSqrt().cwiseInverse().asDiagonal();
    const CMatrix whitened = dis * v.adjoint() * l * v * dis;
    delta = std::min(delta, herm_eigenvalues(whitened).minCoeff());
  }
  return delta;
}

bool cone_contains(const CoefficientSystem& sys, const RotationU& rot, const TimeScale& ts,
                   Complex lambda0, Complex lambda) {
  return cone_margin(sys, rot, ts, lambda0, lambda) > 0.0;
}

WeylDisk weyl_disk(const CoefficientSystem& sys, const RotationU& rot, const TimeScale& ts,
                   const FundamentalTrajectory& traj, int k) {
  if (k < 0 || k >= ts.npoints()) {
    throw WeylError(ErrorCode::IndexOutOfRange, "weyl_disk: node " + std::to_string(k));
  }
  const int n = sys.n;
  WeylDisk d;
  d.lambda = traj.lambda;
  d.t = ts.point(k);
  d.n = n;
  const CMatrix f = traj.yhat[k].adjoint() * (rot.u2n * J_matrix(n)) * traj.yhat[k];
  d.S = re_herm(0.5 * f.topLeftCorner(n, n));
  d.T = 0.5 * f.topRightCorner(n, n);
  d.P = re_herm(0.5 * f.bottomRightCorner(n, n));
  const CMatrix ft = traj.zhat[k].adjoint() * (rot.u2n_inv * J_matrix(n)) * traj.zhat[k];
  d.Ptilde = re_herm(0.5 * ft.bottomRightCorner(n, n));

  Eigen::SelfAdjointEigenSolver<CMatrix> pes(d.P);
  d.p_min_eig = pes.eigenvalues().minCoeff();
  d.p_positive = d.p_min_eig > 0.0;
  if (!d.p_positive) return d;

  d.center = -d.P.partialPivLu().solve(d.T.adjoint());
  const CMatrix direct = re_herm(-d.T * d.center - d.S);

  Eigen::SelfAdjointEigenSolver<CMatrix> ptes(d.Ptilde);
  const double pt_min = ptes.eigenvalues().minCoeff();
  const double pt_max = ptes.eigenvalues().cwiseAbs().maxCoeff();
  if (pt_min > 1e-12 * std::max(1.0, pt_max)) {
    d.radius = re_herm(0.25 * d.Ptilde.partialPivLu().inverse());
    d.stable_radius = true;
    d.route_gap = (d.radius - direct).cwiseAbs().maxCoeff();
  } else {
    d.radius = direct;
  }
  return d;
}

CMatrix defining_form(const RotationU& rot, const FundamentalTrajectory& traj, int k,
                      const CMatrix& l) {
  const int n = static_cast<int>(rot.U.rows());
  if (l.rows() != n || l.cols() != n) {
    throw WeylError(ErrorCode::DimensionMismatch, "defining_form: l must be n x n");
  }
  CMatrix il(2 * n, n);
  il.topRows(n) = CMatrix::Identity(n, n);
  il.bottomRows(n) = l;
  const CMatrix col = traj.yhat[k] * il;
  return col.adjoint() * (rot.u2n * J_matrix(n)) * col;
}

CMatrix boundary_point(const WeylDisk& disk, const CMatrix& v) {
  if (!disk.p_positive) {
    throw WeylError(ErrorCode::DiskUndefined,
                    "boundary_point: P not positive definite at t = " + std::to_string(disk.t));
  }
  if (matrix_norm(v) > 1.0 + 1e-12) {
    throw WeylError(ErrorCode::NotContraction,
                    "boundary_point: ||V|| = " + std::to_string(matrix_norm(v)));
  }
  return disk.center + psd_inv_sqrt(disk.P) * v * psd_sqrt(disk.radius);
}

ContainmentReport disk_contains(const WeylDisk& disk, const CMatrix& l, double tol) {
  if (!disk.p_positive) {
    throw WeylError(ErrorCode::DiskUndefined,
                    "disk_contains: P not positive definite at t = " + std::to_string(disk.t));
  }
  const CMatrix x = psd_sqrt(disk.P) * (l - disk.center);
  const CMatrix gap = re_herm(disk.radius - x.adjoint() * x);
  const PsdReport rep = psd_check(gap, tol);
  return ContainmentReport{rep.psd, rep.min_eig};
}

int first_definite_index(const CoefficientSystem& sys, const RotationU& rot,
                         const TimeScale& ts, const FundamentalTrajectory& traj) {
  for (int k = 0; k < ts.npoints(); ++k) {
    const WeylDisk d = weyl_disk(sys, rot, ts, traj, k);
    if (!d.p_positive) continue;
    if (herm_eigenvalues(d.radius).minCoeff() > 0.0) return k;
  }
  return ts.npoints();
}

namespace {

double energy_residual_impl(const RotationU& rot, const TimeScale& ts,
                            const std::vector<CMatrix>& hat_traj,
                            const std::vector<CMatrix>& plain_traj,
                            const std::function<CMatrix(double)>& weight, bool adjoint_side) {
  const int n = static_cast<int>(rot.U.rows());
  const CMatrix form = (adjoint_side ? rot.u2n_inv : rot.u2n) * J_matrix(n);
  auto integrand = [&](int k) -> CMatrix {
    const CMatrix w = weight(ts.point(k));
    return plain_traj[k].adjoint() * w * plain_traj[k];
  };
  const std::vector<CMatrix> prefix = ts.delta_prefix(integrand);
  const CMatrix base = hat_traj[0].adjoint() * form * hat_traj[0];
  double worst = 0.0;
  for (int k = 0; k < ts.npoints(); ++k) {
    const CMatrix lhs = hat_traj[k].adjoint() * form * hat_traj[k] - base;
    worst = std::max(worst, (lhs - 2.0 * prefix[k]).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

double energy_residual_forward(const CoefficientSystem& sys, const RotationU& rot,
                               const TimeScale& ts, const FundamentalTrajectory& traj) {
  const std::vector<CMatrix> plain = unhat_forward(sys, ts, traj.lambda, traj.yhat);
  return energy_residual_impl(
      rot, ts, traj.yhat, plain,
      [&](double t) { return rot_W(sys, rot, t, traj.lambda); }, false);
}

double energy_residual_adjoint(const CoefficientSystem& sys, const RotationU& rot,
                               const TimeScale& ts, const FundamentalTrajectory& traj) {
  const std::vector<CMatrix> plain = unhat_adjoint(sys, ts, traj.lambda, traj.zhat);
  return energy_residual_impl(
      rot, ts, traj.zhat, plain,
      [&](double t) { return rot_Wtilde(sys, rot, t, traj.lambda); }, true);
}

WNormBound w_norm_bound(const CoefficientSystem& sys, const RotationU& rot,
                        const TimeScale& ts, const FundamentalTrajectory& traj,
                        const CMatrix& l, int k) {
  const int n = sys.n;
  CMatrix il(2 * n, n);
  il.topRows(n) = CMatrix::Identity(n, n);
  il.bottomRows(n) = l;
  std::vector<CMatrix> yl(traj.yhat.size());
  for (std::size_t j = 0; j < traj.yhat.size(); ++j) yl[j] = traj.yhat[j] * il;
  const std::vector<CMatrix> plain = unhat_forward(sys, ts, traj.lambda, yl);
  auto integrand = [&](int j) -> CMatrix {
    return plain[j].adjoint() * rot_W(sys, rot, ts.point(j), traj.lambda) * plain[j];
  };
  WNormBound b;
  b.lhs = re_herm(ts.delta_integral(integrand, 0, k));
  b.rhs = re_herm(-0.5 * (l.adjoint() * rot.U + rot.U.adjoint() * l));
  b.slack_min_eig = herm_eigenvalues(b.rhs - b.lhs).minCoeff();
  return b;
}

double definiteness_margin(const CoefficientSystem& sys, const RotationU& rot,
                           const TimeScale& ts, const FundamentalTrajectory& traj, int k) {
  const int n = sys.n;
  const std::vector<CMatrix> plain = unhat_forward(sys, ts, traj.lambda, traj.yhat);
  auto integrand = [&](int j) -> CMatrix {
    const CMatrix phi = plain[j].rightCols(n);
    return phi.adjoint() * rot_W(sys, rot, ts.point(j), traj.lambda) * phi;
  };
  return herm_eigenvalues(ts.delta_integral(integrand, 0, k)).minCoeff();
}

}  // namespace weylscale
