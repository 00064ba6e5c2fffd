#include "weylscale/problems.hpp"

#include <cmath>

namespace weylscale {

namespace {

constexpr double kLeadingFloor = 1e-12;

// Forward-jump composition against the grid. Dense scales keep sigma(t) = t so
// coefficients stay evaluable between nodes for the adaptive integrator;
// scattered scales are only ever sampled at nodes.
RealFn sigma_lookup(const TimeScale& ts) {
  if (ts.kind() == ScaleKind::Continuous) {
    return [](double t) { return t; };
  }
  return [ts](double t) { return ts.jumps(ts.index_of(t)).sigma; };
}

double positive_weight(const RealFn& w, double t) {
  const double v = w(t);
  if (!(v > 0.0)) {
    throw WeylError(ErrorCode::NonPositiveW,
                    "weight must be positive, got " + std::to_string(v) + " at t = " +
                        std::to_string(t));
  }
  return v;
}

double leading_inverse(const RealFn& p, double t, ErrorCode code) {
  const double v = p(t);
  if (std::abs(v) < kLeadingFloor) {
    throw WeylError(code, "leading coefficient vanishes at t = " + std::to_string(t));
  }
  return 1.0 / v;
}

CMatrix real_diag(std::initializer_list<double> entries) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(entries.size()),
                            static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) m(i, i) = Complex(e, 0.0), ++i;
  return m;
}

}  // namespace

Problem sturm_liouville(const SturmLiouvilleSpec& spec, const TimeScale& ts) {
  if (!spec.p || !spec.q || !spec.w) {
    throw WeylError(ErrorCode::ConfigError, "sturm_liouville: p, q, w must all be set");
  }
  const RealFn sigma = sigma_lookup(ts);
  Problem prob;
  prob.name = "sturm_liouville";
  prob.sys.n = 1;
  prob.sys.A1 = [w = spec.w](double t) { return real_diag({positive_weight(w, t)}); };
  prob.sys.A2 = [](double) { return CMatrix::Zero(1, 1); };
  prob.sys.B1 = [q = spec.q](double t) { return real_diag({-q(t)}); };
  prob.sys.B2 = [](double) { return CMatrix::Zero(1, 1); };
  prob.sys.B3 = [](double) { return CMatrix::Zero(1, 1); };
  prob.sys.B4 = [p = spec.p, sigma](double t) {
    return real_diag({leading_inverse(p, sigma(t), ErrorCode::ZeroP)});
  };
  prob.rot = RotationU::from_eta(1, spec.eta);
  return prob;
}

Problem fourth_order(const FourthOrderSpec& spec, const TimeScale& ts) {
  EvenOrderSpec even;
  even.n = 2;
  even.p = {spec.p0, spec.p1, spec.p2};
  even.w = spec.w;
  even.eta = spec.eta;
  Problem prob = even_order(even, ts);
  prob.name = "fourth_order";
  return prob;
}

Problem even_order(const EvenOrderSpec& spec, const TimeScale& ts) {
  if (spec.n < 1) {
    throw WeylError(ErrorCode::NonPositiveParams, "even_order: n must be at least 1");
  }
  if (static_cast<int>(spec.p.size()) != spec.n + 1) {
    throw WeylError(ErrorCode::LengthMismatch,
                    "even_order: need n + 1 coefficient functions");
  }
  for (const RealFn& f : spec.p) {
    if (!f) throw WeylError(ErrorCode::ConfigError, "even_order: unset coefficient");
  }
  if (!spec.w) throw WeylError(ErrorCode::ConfigError, "even_order: unset weight");
  const int n = spec.n;
  const RealFn sigma = sigma_lookup(ts);
  const ErrorCode lead_code = n == 2 ? ErrorCode::ZeroP2 : ErrorCode::ZeroPn;

  Problem prob;
  prob.name = "even_order";
  prob.sys.n = n;
  prob.sys.A1 = [n, w = spec.w](double t) {
    CMatrix m = CMatrix::Zero(n, n);
    m(0, 0) = positive_weight(w, t);
    return m;
  };
  prob.sys.A2 = [n](double) { return CMatrix::Zero(n, n); };
  // Quasi-derivative ladder: -p_j enters the j-th diagonal slot, composed with
  // the forward jump for every order above zero.
  prob.sys.B1 = [n, p = spec.p, sigma](double t) {
    CMatrix m = CMatrix::Zero(n, n);
    m(0, 0) = -p[0](t);
    for (int j = 1; j < n; ++j) m(j, j) = -p[static_cast<std::size_t>(j)](sigma(t));
    return m;
  };
  prob.sys.B2 = [n](double) {
    CMatrix m = CMatrix::Zero(n, n);
    for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
    return m;
  };
  prob.sys.B3 = [n](double) {
    CMatrix m = CMatrix::Zero(n, n);
    for (int i = 1; i < n; ++i) m(i - 1, i) = 1.0;
    return m;
  };
  prob.sys.B4 = [n, pn = spec.p.back(), sigma, lead_code](double t) {
    CMatrix m = CMatrix::Zero(n, n);
    m(n - 1, n - 1) = leading_inverse(pn, sigma(t), lead_code);
    return m;
  };
  prob.rot = RotationU::from_eta(n, spec.eta);
  return prob;
}

Problem orr_sommerfeld(const OrrSommerfeldSpec& spec, const TimeScale& ts) {
  if (ts.kind() != ScaleKind::Continuous) {
    throw WeylError(ErrorCode::VariantMismatch,
                    "orr_sommerfeld: defined on dense scales only");
  }
  if (!(spec.a > 0.0) || !(spec.reynolds >= 0.0)) {
    throw WeylError(ErrorCode::NonPositiveParams,
                    "orr_sommerfeld: need a > 0 and reynolds >= 0");
  }
  if (!spec.V || !spec.Vpp) {
    throw WeylError(ErrorCode::ConfigError, "orr_sommerfeld: profile must be set");
  }
  const double a = spec.a;
  const double ar = spec.a * spec.reynolds;
  Problem prob;
  prob.name = "orr_sommerfeld";
  prob.sys.n = 2;
  prob.sys.A1 = [](double) { return real_diag({1.0, 0.0}); };
  prob.sys.A2 = [](double) { return CMatrix::Zero(2, 2); };
  prob.sys.B1 = [a, ar, V = spec.V, Vpp = spec.Vpp](double t) {
    CMatrix m(2, 2);
    m(0, 0) = Complex(-a * a, -ar * V(t));
    m(0, 1) = Complex(0.0, -ar * Vpp(t));
    m(1, 0) = 1.0;
    m(1, 1) = Complex(-a * a, 0.0);
    return m;
  };
  prob.sys.B2 = [](double) { return CMatrix::Zero(2, 2); };
  prob.sys.B3 = [](double) { return CMatrix::Zero(2, 2); };
  prob.sys.B4 = [](double) { return CMatrix::Identity(2, 2); };
  prob.rot = RotationU::from_eta(2, spec.eta);
  return prob;
}

OrrSommerfeldSpec couette_flow(double a, double reynolds, double eta) {
  OrrSommerfeldSpec spec;
  spec.a = a;
  spec.reynolds = reynolds;
  spec.V = [](double t) { return t; };
  spec.Vpp = [](double) { return 0.0; };
  spec.eta = eta;
  return spec;
}

OrrSommerfeldSpec poiseuille_flow(double a, double reynolds, double eta) {
  OrrSommerfeldSpec spec;
  spec.a = a;
  spec.reynolds = reynolds;
  spec.V = [](double t) { return 1.0 - t * t; };
  spec.Vpp = [](double) { return -2.0; };
  spec.eta = eta;
  return spec;
}

double orr_sommerfeld_bound(const OrrSommerfeldSpec& spec, double t) {
  const double a = spec.a;
  const double ar = spec.a * spec.reynolds;
  const double c = std::cos(spec.eta);
  const double s = std::sin(spec.eta);
  const double g = ar * spec.Vpp(t);
  return a * a * c - ar * spec.V(t) * s -
         (1.0 + g * g + 2.0 * g * std::sin(2.0 * spec.eta)) / (4.0 * a * a * c);
}

double fourth_order_ladder_residual(const FourthOrderSpec& spec, const TimeScale& ts,
                                    Complex lambda, const std::vector<Complex>& u) {
  if (ts.kind() != ScaleKind::Continuous) {
    throw WeylError(ErrorCode::VariantMismatch,
                    "fourth_order_ladder_residual: dense scales only");
  }
  const int npts = ts.npoints();
  if (static_cast<int>(u.size()) != npts) {
    throw WeylError(ErrorCode::LengthMismatch,
                    "fourth_order_ladder_residual: one sample per node");
  }
  if (npts < 7) return 0.0;
  const double h = ts.spacing(0);
  const double h2 = 12.0 * h * h;
  const double h4 = h * h * h * h;
  double worst = 0.0;
  for (int k = 3; k + 3 < npts; ++k) {
    const Complex d4 = (-u[k - 3] / 6.0 + 2.0 * u[k - 2] - 6.5 * u[k - 1] +
                        (28.0 / 3.0) * u[k] - 6.5 * u[k + 1] + 2.0 * u[k + 2] -
                        u[k + 3] / 6.0) /
                       h4;
    const Complex d2 =
        (-u[k - 2] + 16.0 * u[k - 1] - 30.0 * u[k] + 16.0 * u[k + 1] - u[k + 2]) / h2;
    const double t = ts.point(k);
    const Complex res =
        spec.p2(t) * d4 - spec.p1(t) * d2 + spec.p0(t) * u[k] - lambda * spec.w(t) * u[k];
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

}  // namespace weylscale
