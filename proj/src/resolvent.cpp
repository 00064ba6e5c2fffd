#include "weylscale/resolvent.hpp"

#include <algorithm>
#include <cmath>

namespace weylscale {

namespace {

void require_forcing(const CoefficientSystem& sys, const TimeScale& ts,
                     const std::vector<CVector>& forcing) {
  if (static_cast<int>(forcing.size()) != ts.npoints()) {
    throw WeylError(ErrorCode::LengthMismatch, "forcing must provide one sample per node");
  }
  for (const CVector& f : forcing) {
    if (f.size() != 2 * sys.n) {
      throw WeylError(ErrorCode::DimensionMismatch, "forcing samples must have size 2n");
    }
  }
}

std::vector<CMatrix> right_columns(const std::vector<CMatrix>& traj, int n) {
  std::vector<CMatrix> out(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) out[k] = traj[k].rightCols(n);
  return out;
}

double maxabs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

ResolventSolution resolve(const CoefficientSystem& sys, const TimeScale& ts,
                          const WeylSolutionPair& pair, const FundamentalTrajectory& traj,
                          const std::vector<CVector>& forcing) {
  require_forcing(sys, ts, forcing);
  const int n = sys.n;
  const int npts = ts.npoints();
  const Complex lambda = pair.lambda;

  const std::vector<CMatrix> phi_hat = right_columns(traj.yhat, n);
  const std::vector<CMatrix> chi_hat = right_columns(traj.zhat, n);
  const std::vector<CMatrix> chi = unhat_adjoint(sys, ts, lambda, chi_hat);

  auto chi_weight = [&](int s) -> CMatrix {
    return chi[s].adjoint() * (sys.A(ts.point(s)) * forcing[s]);
  };
  auto zeta_weight = [&](int s) -> CMatrix {
    return pair.zeta[s].adjoint() * (sys.A(ts.point(s)) * forcing[s]);
  };
  const std::vector<CMatrix> prefix_chi = ts.delta_prefix(chi_weight);
  const std::vector<CMatrix> prefix_zeta = ts.delta_prefix(zeta_weight);
  const CMatrix total_zeta = prefix_zeta.back();

  ResolventSolution sol;
  sol.lambda = lambda;
  sol.adjoint = false;
  sol.rhat.resize(npts);
  sol.r.resize(npts);
  sol.c1.resize(npts);
  sol.c2.resize(npts);
  for (int k = 0; k < npts; ++k) {
    sol.c1[k] = prefix_chi[k];
    sol.c2[k] = total_zeta - prefix_zeta[k];
    sol.rhat[k] = pair.psi_hat[k] * sol.c1[k] + phi_hat[k] * sol.c2[k];
    const TransformSlices tr = transforms(sys, ts.point(k), ts.mu(k), lambda);
    sol.r[k] = tr.H * sol.rhat[k] + tr.N * (sys.A(ts.point(k)) * forcing[k]);
  }
  return sol;
}

ResolventSolution adjoint_resolve(const CoefficientSystem& sys, const TimeScale& ts,
                                  const WeylSolutionPair& pair,
                                  const FundamentalTrajectory& traj,
                                  const std::vector<CVector>& forcing) {
  require_forcing(sys, ts, forcing);
  const int n = sys.n;
  const int npts = ts.npoints();
  const Complex lambda = pair.lambda;

  const std::vector<CMatrix> phi_hat = right_columns(traj.yhat, n);
  const std::vector<CMatrix> chi_hat = right_columns(traj.zhat, n);
  const std::vector<CMatrix> phi = unhat_forward(sys, ts, lambda, phi_hat);

  auto phi_weight = [&](int s) -> CMatrix {
    return phi[s].adjoint() * (sys.A(ts.point(s)) * forcing[s]);
  };
  auto psi_weight = [&](int s) -> CMatrix {
    return pair.psi[s].adjoint() * (sys.A(ts.point(s)) * forcing[s]);
  };
  const std::vector<CMatrix> prefix_phi = ts.delta_prefix(phi_weight);
  const std::vector<CMatrix> prefix_psi = ts.delta_prefix(psi_weight);
  const CMatrix total_psi = prefix_psi.back();

  ResolventSolution sol;
  sol.lambda = lambda;
  sol.adjoint = true;
  sol.rhat.resize(npts);
  sol.r.resize(npts);
  sol.c1.resize(npts);
  sol.c2.resize(npts);
  for (int k = 0; k < npts; ++k) {
    sol.c1[k] = prefix_phi[k];
    sol.c2[k] = total_psi - prefix_psi[k];
    sol.rhat[k] = pair.zeta_hat[k] * sol.c1[k] + chi_hat[k] * sol.c2[k];
  }
  for (int k = 0; k < npts; ++k) {
    const double mu = ts.mu(k);
    if (mu > 0.0) {
      const TransformSlices tr = transforms(sys, ts.point(k), mu, lambda);
      sol.r[k] = tr.Htilde * sol.rhat[k + 1] +
                 tr.N.adjoint() * (sys.A(ts.point(k)) * forcing[k]);
    } else {
      sol.r[k] = sol.rhat[k];
    }
  }
  return sol;
}

ResolventChecks resolvent_checks(const CoefficientSystem& sys, const TimeScale& ts,
                                 const WeylSolutionPair& pair,
                                 const ResolventSolution& sol,
                                 const std::vector<CVector>& forcing) {
  require_forcing(sys, ts, forcing);
  const int n = sys.n;
  const int npts = ts.npoints();
  const CMatrix j = J_matrix(n);
  const Complex lambda = sol.lambda;
  const Complex lam_eff = sol.adjoint ? std::conj(lambda) : lambda;

  ResolventChecks chk;
  chk.bc_bottom = sol.rhat[0].tail(n).cwiseAbs().maxCoeff();
  // At t0 both relevant fundamental columns equal (-I; 0), whose J-form reads
  // off exactly the second block.
  CMatrix left_col(2 * n, n);
  left_col.topRows(n) = -CMatrix::Identity(n, n);
  left_col.bottomRows(n).setZero();
  chk.bc_boundary_form = maxabs(left_col.adjoint() * j * sol.rhat[0]);

  const std::vector<CMatrix>& tail_frame = sol.adjoint ? pair.psi_hat : pair.zeta_hat;
  for (int k = 0; k < npts; ++k) {
    const CMatrix form = tail_frame[k].adjoint() * j * sol.rhat[k];
    chk.max_tail_gap = std::max(chk.max_tail_gap, maxabs(form + sol.c2[k]));
    if (k == npts - 1) chk.last_tail = maxabs(form);
  }

  auto coeff = [&](int k) -> CMatrix {
    const double t = ts.point(k);
    return sol.adjoint ? CMatrix(lam_eff * sys.A(t) + sys.B(t).adjoint())
                       : CMatrix(lam_eff * sys.A(t) + sys.B(t));
  };
  if (ts.kind() == ScaleKind::Discrete) {
    for (int k = 0; k + 1 < npts; ++k) {
      const double mu = ts.mu(k);
      const CVector res = j * ((sol.rhat[k + 1] - sol.rhat[k]) / mu) -
                          coeff(k) * sol.r[k] - sys.A(ts.point(k)) * forcing[k];
      const double rn = res.cwiseAbs().maxCoeff();
      chk.interior_residual = std::max(chk.interior_residual, rn);
      if (k == 0) chk.domain_row_residual = rn;
    }
  } else {
    const double h = npts > 1 ? ts.spacing(0) : 1.0;
    for (int k = 2; k + 3 < npts; ++k) {
      const CVector d = (-sol.rhat[k + 2] + 8.0 * sol.rhat[k + 1] - 8.0 * sol.rhat[k - 1] +
                         sol.rhat[k - 2]) /
                        (12.0 * h);
      const CVector res = j * d - coeff(k) * sol.r[k] - sys.A(ts.point(k)) * forcing[k];
      chk.interior_residual = std::max(chk.interior_residual, res.cwiseAbs().maxCoeff());
    }
    chk.domain_row_residual = chk.bc_bottom;
  }
  return chk;
}

double duality_gap(const CoefficientSystem& sys, const TimeScale& ts,
                   const ResolventSolution& rf, const ResolventSolution& rtg,
                   const std::vector<CVector>& f, const std::vector<CVector>& g) {
  require_forcing(sys, ts, f);
  require_forcing(sys, ts, g);
  const int last = ts.npoints() - 1;
  const Complex lhs = ts.delta_integral_scalar(
      [&](int s) -> Complex {
        return (g[s].adjoint() * (sys.A(ts.point(s)) * rf.r[s]))(0, 0);
      },
      0, last);
  const Complex rhs = ts.delta_integral_scalar(
      [&](int s) -> Complex {
        return (rtg.r[s].adjoint() * (sys.A(ts.point(s)) * f[s]))(0, 0);
      },
      0, last);
  return std::abs(lhs - rhs);
}

GreenKernel green_kernel(const CoefficientSystem& sys, const TimeScale& ts,
                         const WeylSolutionPair& pair, const FundamentalTrajectory& traj) {
  const int n = sys.n;
  const int npts = ts.npoints();
  GreenKernel kern;
  kern.lambda = pair.lambda;
  kern.psi = pair.psi;
  kern.zeta = pair.zeta;
  kern.phi = unhat_forward(sys, ts, pair.lambda, right_columns(traj.yhat, n));
  kern.chi = unhat_adjoint(sys, ts, pair.lambda, right_columns(traj.zhat, n));
  kern.jump.resize(npts);
  for (int k = 0; k < npts; ++k) {
    const double mu = ts.mu(k);
    if (mu > 0.0) {
      kern.jump[k] = transforms(sys, ts.point(k), mu, pair.lambda).N / mu;
    } else {
      kern.jump[k] = CMatrix::Zero(2 * n, 2 * n);
    }
  }
  return kern;
}

CMatrix green_eval(const GreenKernel& kern, int k, int s) {
  const int npts = static_cast<int>(kern.psi.size());
  if (k < 0 || s < 0 || k >= npts || s >= npts) {
    throw WeylError(ErrorCode::IndexOutOfRange, "green_eval: node index out of range");
  }
  if (k > s) return kern.psi[k] * kern.chi[s].adjoint();
  if (k < s) return kern.phi[k] * kern.zeta[s].adjoint();
  return kern.phi[k] * kern.zeta[k].adjoint() + kern.jump[k];
}

CMatrix green_adjoint_eval(const GreenKernel& kern, int s, int k) {
  return green_eval(kern, k, s).adjoint();
}

NormInequalityReport norm_inequality(const CoefficientSystem& sys, const RotationU& rot,
                                     const TimeScale& ts, Complex lambda0,
                                     const ResolventSolution& sol,
                                     const std::vector<CVector>& forcing, double delta,
                                     double eps) {
  require_forcing(sys, ts, forcing);
  if (!(eps > 0.0) || !(eps < delta)) {
    throw WeylError(ErrorCode::EpsilonOutOfRange,
                    "norm_inequality: eps must lie strictly between 0 and delta");
  }
  const int last = ts.npoints() - 1;
  auto real_form = [&](const std::function<Complex(int)>& sample) -> double {
    return std::real(ts.delta_integral_scalar(sample, 0, last));
  };
  NormInequalityReport rep;
  rep.delta = delta;
  rep.eps = eps;
  rep.f_norm2 = real_form([&](int s) -> Complex {
    return (forcing[s].adjoint() * (sys.A(ts.point(s)) * forcing[s]))(0, 0);
  });
  rep.w_norm2 = real_form([&](int s) -> Complex {
    const CMatrix w = rot_W(sys, rot, ts.point(s), lambda0);
    return (sol.r[s].adjoint() * (w * sol.r[s]))(0, 0);
  });
  rep.atilde_norm2 = real_form([&](int s) -> Complex {
    const CMatrix at = rot_Atilde(sys, rot, ts.point(s));
    return (sol.r[s].adjoint() * (at * sol.r[s]))(0, 0);
  });
  rep.slack = rep.f_norm2 / (4.0 * eps) - rep.w_norm2 - (delta - eps) * rep.atilde_norm2;
  rep.literal_lhs = std::sqrt(std::max(rep.atilde_norm2, 0.0));
  rep.literal_rhs = std::sqrt(std::max(rep.f_norm2, 0.0)) / delta;
  return rep;
}

}  // namespace weylscale
