// Acceptance gate: eleven end-to-end criteria, one PASS/FAIL line each.
// Exit status is zero exactly when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "support.hpp"
#include "weylscale/scenario.hpp"

using namespace weylscale;
using namespace testsupport;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Shared problem builders.

Problem free_sl_problem(const TimeScale& ts) {
  SturmLiouvilleSpec spec;
  spec.p = [](double) { return 1.0; };
  spec.q = [](double) { return 0.0; };
  spec.w = [](double) { return 1.0; };
  spec.eta = 1.5707963267948966;
  return sturm_liouville(spec, ts);
}

Problem fourth_problem(const TimeScale& ts) {
  FourthOrderSpec spec;
  spec.p0 = [](double) { return 0.0; };
  spec.p1 = [](double) { return 0.0; };
  spec.p2 = [](double) { return 1.0; };
  spec.w = [](double) { return 1.0; };
  spec.eta = 0.0;
  return fourth_order(spec, ts);
}

Problem even3_problem(const TimeScale& ts) {
  EvenOrderSpec spec;
  spec.n = 3;
  auto zero = [](double) { return 0.0; };
  auto one = [](double) { return 1.0; };
  spec.p = {zero, zero, zero, one};
  spec.w = one;
  spec.eta = 1.5707963267948966;
  return even_order(spec, ts);
}

Problem os_problem(const TimeScale& ts) {
  return orr_sommerfeld(couette_flow(1.0, 10.0, 0.0), ts);
}

TimeScale uniform_discrete(double prepoint, double t0, double horizon, double step) {
  std::vector<double> pts;
  const int count = static_cast<int>(std::floor((horizon - t0) / step + 1e-9)) + 1;
  pts.reserve(count);
  for (int k = 0; k < count; ++k) pts.push_back(t0 + k * step);
  return TimeScale::make_discrete(prepoint, pts);
}

double smooth_bump(double t, double lo, double hi) {
  const double x = (2.0 * t - lo - hi) / (hi - lo);
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

// Weyl pair by route: positive buffer selects the orthonormalized backward
// sweep, zero the forward disk center at the final node.
WeylSolutionPair route_pair(const CoefficientSystem& sys, const RotationU& rot,
                            const TimeScale& ts, const FundamentalTrajectory& traj,
                            Complex lambda, double buffer) {
  if (buffer > 0.0) return stable_weyl_pair(sys, ts, lambda, buffer);
  const WeylDisk disk = weyl_disk(sys, rot, ts, traj, ts.npoints() - 1);
  if (!disk.p_positive) {
    throw WeylError(ErrorCode::DiskUndefined, "forward disk not definite at horizon");
  }
  return weyl_solutions(sys, ts, traj, disk.center);
}

// ---------------------------------------------------------------------------
// Criterion 1: closed-form M on the free second-order system.

Outcome criterion_free_sl_oracle() {
  constexpr double kTol = 1e-6;
  constexpr double kBudgetSeconds = 10.0;
  const auto start = Clock::now();

  const TimeScale ts = TimeScale::make_continuous(0.0, 40.0, 0.01);
  const Problem prob = free_sl_problem(ts);
  double worst = 0.0;
  for (Complex lambda : {Complex(0.0, 1.0), Complex(1.0, 1.0), Complex(0.0, 4.0)}) {
    const WeylSolutionPair pair = stable_weyl_pair(prob.sys, ts, lambda, 22.0);
    worst = std::max(worst, std::abs(pair.M(0, 0) - free_sl_m_oracle(lambda)));
  }
  const double elapsed = seconds_since(start);
  return {worst <= kTol && elapsed <= kBudgetSeconds,
          "max |M - i/sqrt(lambda)| = " + fmt(worst) + " tol " + fmt(kTol) + ", " +
              fmt(elapsed) + " s of " + fmt(kBudgetSeconds)};
}

// ---------------------------------------------------------------------------
// Criteria 2 and 3 share one sweep over the scattered battery.

struct BatterySweep {
  double lemma_gap = 0.0;   // max ||Zhat + J Yhat^{-*} J|| over 100 systems
  double greens_res = 0.0;  // max normalized two-parameter identity residual
};

const BatterySweep& battery_sweep() {
  static const BatterySweep sweep = [] {
    BatterySweep s;
    for (int i = 0; i < 100; ++i) {
      const BatteryCase bc = make_battery_case(i);
      const CMatrix init = J_matrix(bc.sys.n);
      const auto yf = propagate_forward(bc.sys, bc.ts, bc.lambda, init);
      const auto za = propagate_adjoint(bc.sys, bc.ts, bc.lambda, init);
      for (int k = 0; k < bc.ts.npoints(); ++k) {
        const CMatrix closed = -J_matrix(bc.sys.n) *
                               CMatrix(yf[k].inverse()).adjoint() * J_matrix(bc.sys.n);
        s.lemma_gap = std::max(s.lemma_gap, matrix_norm(CMatrix(za[k] - closed)));
      }
      const auto zx = propagate_adjoint(bc.sys, bc.ts, bc.xi, init);
      for (int kb : {bc.ts.npoints() - 1, bc.ts.npoints() / 2}) {
        const GreensCheck g =
            greens_formula(bc.sys, bc.ts, bc.lambda, bc.xi, yf, zx, 0, kb);
        const double denom =
            std::max({1.0, matrix_norm(g.lhs), matrix_norm(g.rhs)});
        s.greens_res = std::max(s.greens_res, g.residual / denom);
      }
    }
    return s;
  }();
  return sweep;
}

Outcome criterion_lemma_identity() {
  constexpr double kDiscreteTol = 1e-10;
  constexpr double kContinuousTol = 1e-6;
  const double discrete_gap = battery_sweep().lemma_gap;

  const TimeScale ts = TimeScale::make_continuous(0.0, 8.0, 0.01);
  const Problem prob = free_sl_problem(ts);
  const CMatrix init = J_matrix(1);
  double dense_gap = 0.0;
  const Complex lambda(0.0, 1.0);
  const auto yf = propagate_forward(prob.sys, ts, lambda, init);
  const auto za = propagate_adjoint(prob.sys, ts, lambda, init);
  for (int k = 0; k < ts.npoints(); ++k) {
    const CMatrix closed =
        -J_matrix(1) * CMatrix(yf[k].inverse()).adjoint() * J_matrix(1);
    dense_gap = std::max(dense_gap, matrix_norm(CMatrix(za[k] - closed)));
  }
  return {discrete_gap <= kDiscreteTol && dense_gap <= kContinuousTol,
          "battery max " + fmt(discrete_gap) + " tol " + fmt(kDiscreteTol) +
              ", dense max " + fmt(dense_gap) + " tol " + fmt(kContinuousTol)};
}

Outcome criterion_greens_formula() {
  constexpr double kDiscreteTol = 1e-10;
  constexpr double kContinuousTol = 1e-7;
  const double discrete_res = battery_sweep().greens_res;

  const TimeScale ts = TimeScale::make_continuous(0.0, 8.0, 0.01);
  const Problem prob = free_sl_problem(ts);
  const Complex lambda(0.0, 1.0), xi(1.0, 1.0);
  const auto yf = propagate_forward(prob.sys, ts, lambda, J_matrix(1));
  const auto zx = propagate_adjoint(prob.sys, ts, xi, J_matrix(1));
  double dense_res = 0.0;
  const std::pair<int, int> ranges[] = {{0, ts.npoints() - 1},
                                        {ts.index_of(2.0), ts.index_of(7.0)}};
  for (const auto& [ka, kb] : ranges) {
    const GreensCheck g = greens_formula(prob.sys, ts, lambda, xi, yf, zx, ka, kb);
    const double denom = std::max({1.0, matrix_norm(g.lhs), matrix_norm(g.rhs)});
    dense_res = std::max(dense_res, g.residual / denom);
  }
  return {discrete_res <= kDiscreteTol && dense_res <= kContinuousTol,
          "battery max " + fmt(discrete_res) + " tol " + fmt(kDiscreteTol) +
              ", dense max " + fmt(dense_res) + " tol " + fmt(kContinuousTol)};
}

// ---------------------------------------------------------------------------
// Criterion 4: monotone disk data and nesting across the example problems.

struct NestCase {
  std::string name;
  Problem prob;
  TimeScale ts;
  std::vector<Complex> lambdas;
  double t_half = 0.0;
  double t_full = 0.0;
};

std::vector<Complex> cone_sample(Complex lambda0, double eta, double scale) {
  const Complex dir = -std::exp(Complex(0.0, -eta));
  std::vector<Complex> out;
  for (Complex w : {Complex(1.0, 0.0), Complex(1.0, 0.5), Complex(1.0, -0.5),
                    Complex(2.0, 0.0), Complex(0.5, 0.0)}) {
    out.push_back(lambda0 + dir * (scale * w));
  }
  return out;
}

std::vector<NestCase> nesting_cases() {
  const double half_pi = 1.5707963267948966;
  std::vector<NestCase> cases;
  {
    TimeScale ts = TimeScale::make_continuous(0.0, 16.0, 0.005);
    cases.push_back({"sturm_liouville", free_sl_problem(ts), ts,
                     cone_sample(Complex(0.0, 0.0), half_pi, 1.0), 8.0, 16.0});
  }
  {
    // For the two-block problems the quadratic forms grow like the square of
    // the fundamental frame; the doubled horizon is kept where the squared
    // radius still clears its own rounding floor.
    TimeScale ts = TimeScale::make_continuous(0.0, 5.0, 0.004);
    cases.push_back({"fourth_order", fourth_problem(ts), ts,
                     cone_sample(Complex(0.0, 0.0), 0.0, 1.0), 2.5, 5.0});
  }
  {
    TimeScale ts = TimeScale::make_continuous(0.0, 3.0, 0.0025);
    cases.push_back({"orr_sommerfeld", os_problem(ts), ts,
                     cone_sample(Complex(-2.0, 0.0), 0.0, 1.0), 1.5, 3.0});
  }
  {
    TimeScale ts = uniform_discrete(-0.5, 0.0, 6.0, 0.5);
    cases.push_back({"even_order", even3_problem(ts), ts,
                     cone_sample(Complex(0.0, 0.0), half_pi, 0.1), 3.0, 6.0});
  }
  return cases;
}

Outcome criterion_nesting() {
  constexpr double kTol = 1e-8;
  int violations = 0;
  double worst_margin = 1.0;
  std::string note;
  const auto cases = nesting_cases();
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const NestCase& nc = cases[ci];
    const CoefficientSystem& sys = nc.prob.sys;
    const RotationU& rot = nc.prob.rot;
    const int n = sys.n;
    Rng rng(0xACCE57ULL + ci);
    for (Complex lambda : nc.lambdas) {
      const FundamentalTrajectory traj = fundamental_pair(sys, nc.ts, lambda);
      const int k1 = first_definite_index(sys, rot, nc.ts, traj);
      const int last = nc.ts.npoints() - 1;
      if (k1 >= last) {
        ++violations;
        note = nc.name + ": no definite node";
        continue;
      }
      // Monotone quadratic-form data along eight sample nodes past t1.
      std::vector<int> ks;
      for (int j = 0; j < 8; ++j) {
        const int k = k1 + static_cast<int>(std::llround(j * (last - k1) / 7.0));
        if (ks.empty() || k > ks.back()) ks.push_back(k);
      }
      std::vector<WeylDisk> disks;
      for (int k : ks) disks.push_back(weyl_disk(sys, rot, nc.ts, traj, k));
      for (std::size_t j = 0; j + 1 < disks.size(); ++j) {
        if (!loewner_geq(disks[j + 1].P, disks[j].P, kTol)) {
          ++violations;
          note = nc.name + ": P not increasing";
        }
        if (!loewner_geq(disks[j].radius, disks[j + 1].radius, kTol)) {
          ++violations;
          note = nc.name + ": radius not decreasing";
        }
      }
      // Boundary of the later disk sits inside the earlier one.
      const WeylDisk inner = weyl_disk(sys, rot, nc.ts, traj, nc.ts.index_of(nc.t_full));
      const WeylDisk outer = weyl_disk(sys, rot, nc.ts, traj, nc.ts.index_of(nc.t_half));
      for (int s = 0; s < 2 * n * n; ++s) {
        const CMatrix l = boundary_point(inner, rng.unitary(n));
        const ContainmentReport rep = disk_contains(outer, l, kTol);
        worst_margin = std::min(worst_margin, rep.margin);
        if (!rep.inside) {
          ++violations;
          note = nc.name + ": boundary point escaped";
        }
      }
    }
  }
  return {violations == 0, violations == 0
                               ? "0 violations, worst containment margin " + fmt(worst_margin)
                               : std::to_string(violations) + " violations, last: " + note};
}

// ---------------------------------------------------------------------------
// Criterion 5: direct vs adjoint-route squared radius.

Outcome criterion_radius_routes() {
  constexpr double kDiscreteTol = 1e-9;
  constexpr double kContinuousTol = 1e-6;
  double discrete_gap = 0.0, dense_gap = 0.0;

  {
    const TimeScale ts = uniform_discrete(-1.0, 0.0, 20.0, 1.0);
    const Problem prob = free_sl_problem(ts);
    const FundamentalTrajectory traj = fundamental_pair(prob.sys, ts, Complex(0.0, 0.1));
    const int k1 = first_definite_index(prob.sys, prob.rot, ts, traj);
    for (int k = k1; k < ts.npoints(); ++k) {
      discrete_gap = std::max(
          discrete_gap, weyl_disk(prob.sys, prob.rot, ts, traj, k).route_gap);
    }
  }
  {
    const TimeScale ts = uniform_discrete(-0.5, 0.0, 6.0, 0.5);
    const Problem prob = even3_problem(ts);
    const FundamentalTrajectory traj = fundamental_pair(prob.sys, ts, Complex(0.0, 0.1));
    const int k1 = first_definite_index(prob.sys, prob.rot, ts, traj);
    for (int k = k1; k < ts.npoints(); ++k) {
      discrete_gap = std::max(
          discrete_gap, weyl_disk(prob.sys, prob.rot, ts, traj, k).route_gap);
    }
  }
  {
    const TimeScale ts = TimeScale::make_continuous(0.0, 6.0, 0.004);
    const Problem prob = free_sl_problem(ts);
    const FundamentalTrajectory traj = fundamental_pair(prob.sys, ts, Complex(0.0, 1.0));
    for (double t : {1.5, 3.0, 4.5, 6.0}) {
      dense_gap = std::max(
          dense_gap, weyl_disk(prob.sys, prob.rot, ts, traj, ts.index_of(t)).route_gap);
    }
  }
  {
    const TimeScale ts = TimeScale::make_continuous(0.0, 6.0, 0.004);
    const Problem prob = fourth_problem(ts);
    const FundamentalTrajectory traj =
        fundamental_pair(prob.sys, ts, Complex(-1.0, 0.5));
    for (double t : {1.5, 3.0, 4.5, 6.0}) {
      dense_gap = std::max(
          dense_gap, weyl_disk(prob.sys, prob.rot, ts, traj, ts.index_of(t)).route_gap);
    }
  }
  return {discrete_gap <= kDiscreteTol && dense_gap <= kContinuousTol,
          "discrete max " + fmt(discrete_gap) + " tol " + fmt(kDiscreteTol) +
              ", dense max " + fmt(dense_gap) + " tol " + fmt(kContinuousTol)};
}

// ---------------------------------------------------------------------------
// Criterion 6: two-parameter difference identity and horizon decay.

Outcome criterion_m_difference() {
  constexpr double kAbsTol = 1e-4;
  constexpr double kRatio = 0.6;
  const TimeScale ts = TimeScale::make_continuous(0.0, 40.0, 0.01);
  const Problem prob = free_sl_problem(ts);
  const WeylSolutionPair pl = stable_weyl_pair(prob.sys, ts, Complex(0.0, 1.0), 22.0);
  const WeylSolutionPair px = stable_weyl_pair(prob.sys, ts, Complex(0.0, 2.0), 15.0);

  double bn[3] = {0, 0, 0};
  double gap40 = 0.0, dn40 = 0.0;
  const double horizons[3] = {10.0, 20.0, 40.0};
  for (int i = 0; i < 3; ++i) {
    const MDifferenceCheck md =
        m_difference(prob.sys, ts, pl, px, ts.index_of(horizons[i]));
    bn[i] = md.boundary_norm;
    if (i == 2) {
      gap40 = md.cross_gap;
      dn40 = md.direct_norm;
    }
  }
  const bool pass = gap40 <= kAbsTol && dn40 <= kAbsTol && bn[2] <= kAbsTol &&
                    bn[1] <= kRatio * bn[0] && bn[2] <= kRatio * bn[1];
  return {pass, "gap(40) " + fmt(gap40) + ", direct(40) " + fmt(dn40) + ", boundary " +
                    fmt(bn[0]) + " -> " + fmt(bn[1]) + " -> " + fmt(bn[2]) +
                    " (ratio cap " + fmt(kRatio) + ")"};
}

// ---------------------------------------------------------------------------
// Criterion 7: coupling identities for the limiting pairs.

Outcome criterion_couplings() {
  constexpr double kDiscreteTol = 1e-10;
  constexpr double kContinuousTol = 1e-6;
  double discrete_worst = 0.0, dense_worst = 0.0;

  auto phi_of = [](const FundamentalTrajectory& traj, int n) {
    std::vector<CMatrix> phi;
    phi.reserve(traj.yhat.size());
    for (const CMatrix& y : traj.yhat) phi.push_back(y.rightCols(n));
    return phi;
  };

  {
    // Constant-coefficient form of the free problem: the backward sweep
    // samples the coefficients past the horizon, where a jump-composed
    // closure from the base grid would not be evaluable.
    const TimeScale ts = uniform_discrete(-1.0, 0.0, 30.0, 1.0);
    const CoefficientSystem sys = free_sl_system();
    const Complex lambda(0.0, 0.1);
    const FundamentalTrajectory traj = fundamental_pair(sys, ts, lambda);
    const WeylSolutionPair pair = stable_weyl_pair(sys, ts, lambda, 66.0);
    const CouplingReport rep =
        coupling_residuals(ts, pair.zeta_hat, pair.psi_hat, phi_of(traj, 1));
    discrete_worst = std::max({discrete_worst, rep.max_psi_coupling, rep.max_phi_coupling});
  }
  {
    const TimeScale ts = uniform_discrete(-0.5, 0.0, 6.0, 0.5);
    const Problem prob = even3_problem(ts);
    const Complex lambda(0.0, 0.1);
    const FundamentalTrajectory traj = fundamental_pair(prob.sys, ts, lambda);
    const WeylSolutionPair pair = route_pair(prob.sys, prob.rot, ts, traj, lambda, 0.0);
    const CouplingReport rep =
        coupling_residuals(ts, pair.zeta_hat, pair.psi_hat, phi_of(traj, 3));
    discrete_worst = std::max({discrete_worst, rep.max_psi_coupling, rep.max_phi_coupling});
  }
  {
    const TimeScale ts = TimeScale::make_continuous(0.0, 40.0, 0.01);
    const Problem prob = free_sl_problem(ts);
    const Complex lambda(0.0, 1.0);
    const FundamentalTrajectory traj = fundamental_pair(prob.sys, ts, lambda);
    const WeylSolutionPair pair = stable_weyl_pair(prob.sys, ts, lambda, 22.0);
    const CouplingReport rep =
        coupling_residuals(ts, pair.zeta_hat, pair.psi_hat, phi_of(traj, 1));
    dense_worst = std::max({dense_worst, rep.max_psi_coupling, rep.max_phi_coupling});
  }
  return {discrete_worst <= kDiscreteTol && dense_worst <= kContinuousTol,
          "discrete max " + fmt(discrete_worst) + " tol " + fmt(kDiscreteTol) +
              ", dense max " + fmt(dense_worst) + " tol " + fmt(kContinuousTol)};
}

// ---------------------------------------------------------------------------
// Criterion 8: resolvent defects and tail decay under horizon doubling.

struct ResolventCase {
  std::string name;
  std::function<Problem(const TimeScale&)> build;
  TimeScale base, doubled;
  Complex lambda;
  double support_end = 0.0;
  double buffer_base = 0.0, buffer_doubled = 0.0;
  double interior_tol = 0.0;
};

std::vector<CVector> draw_forcing(const TimeScale& ts, int dim, double support_end,
                                  Rng& rng) {
  std::vector<CVector> f(ts.npoints(), CVector::Zero(dim));
  if (ts.kind() == ScaleKind::Discrete) {
    for (int k = 0; k < ts.npoints(); ++k) {
      if (ts.point(k) >= support_end) continue;
      for (int i = 0; i < dim; ++i) f[k](i) = rng.cnormal();
    }
    return f;
  }
  struct Mode {
    Complex c;
    double om, ph;
  };
  std::vector<std::vector<Mode>> modes(dim);
  for (int i = 0; i < dim; ++i) {
    for (int m = 0; m < 2; ++m) {
      const Complex c = rng.cnormal();
      const double om = rng.uniform(0.5, 2.5);
      const double ph = rng.uniform(0.0, 6.283185307179586);
      modes[i].push_back({c, om, ph});
    }
  }
  for (int k = 0; k < ts.npoints(); ++k) {
    const double t = ts.point(k);
    const double b = smooth_bump(t, 0.2, support_end);
    if (b == 0.0) continue;
    for (int i = 0; i < dim; ++i) {
      Complex v(0.0, 0.0);
      for (const Mode& m : modes[i]) v += m.c * std::sin(m.om * t + m.ph);
      f[k](i) = v * b;
    }
  }
  return f;
}

std::vector<CVector> zero_pad(const std::vector<CVector>& f, const TimeScale& longer,
                              int dim) {
  std::vector<CVector> out(longer.npoints(), CVector::Zero(dim));
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k];
  return out;
}

std::vector<ResolventCase> resolvent_cases() {
  std::vector<ResolventCase> cases;
  cases.push_back({"sturm_liouville dense",
                   [](const TimeScale& ts) { return free_sl_problem(ts); },
                   TimeScale::make_continuous(0.0, 8.0, 0.01),
                   TimeScale::make_continuous(0.0, 16.0, 0.01), Complex(0.0, 1.0), 3.6,
                   14.0, 14.0, 1e-5});
  cases.push_back({"fourth_order dense",
                   [](const TimeScale& ts) { return fourth_problem(ts); },
                   TimeScale::make_continuous(0.0, 8.0, 0.004),
                   TimeScale::make_continuous(0.0, 16.0, 0.004), Complex(-1.0, 0.5), 3.6,
                   0.0, 0.0, 1e-5});
  // The backward route keeps the decaying pair element accurate in absolute
  // terms deep into the horizon, where the forward recessive combination has
  // cancelled away the digits the interior stencil then amplifies by 1/h.
  cases.push_back({"orr_sommerfeld dense",
                   [](const TimeScale& ts) { return os_problem(ts); },
                   TimeScale::make_continuous(0.0, 5.0, 0.001),
                   TimeScale::make_continuous(0.0, 10.0, 0.001), Complex(-3.0, 0.0),
                   2.25, 2.0, 2.0, 1e-5});
  cases.push_back({"sturm_liouville scattered",
                   [](const TimeScale& ts) { return free_sl_problem(ts); },
                   uniform_discrete(-1.0, 0.0, 20.0, 1.0),
                   uniform_discrete(-1.0, 0.0, 40.0, 1.0), Complex(0.0, 0.1), 9.0, 0.0,
                   0.0, 1e-9});
  cases.push_back({"even_order scattered",
                   [](const TimeScale& ts) { return even3_problem(ts); },
                   uniform_discrete(-0.5, 0.0, 6.0, 0.5),
                   uniform_discrete(-0.5, 0.0, 12.0, 0.5), Complex(0.0, 0.1), 2.7, 0.0,
                   0.0, 1e-9});
  return cases;
}

Outcome criterion_resolvent() {
  constexpr double kBoundaryTol = 1e-10;
  constexpr int kForcings = 20;
  double worst_interior = 0.0, worst_boundary = 0.0;
  int tail_failures = 0;
  std::string note;

  const auto cases = resolvent_cases();
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const ResolventCase& rc = cases[ci];
    const Problem pb = rc.build(rc.base);
    const Problem pd = rc.build(rc.doubled);
    const int dim = 2 * pb.sys.n;
    const FundamentalTrajectory tb = fundamental_pair(pb.sys, rc.base, rc.lambda);
    const FundamentalTrajectory td = fundamental_pair(pd.sys, rc.doubled, rc.lambda);
    const WeylSolutionPair qb =
        route_pair(pb.sys, pb.rot, rc.base, tb, rc.lambda, rc.buffer_base);
    const WeylSolutionPair qd =
        route_pair(pd.sys, pd.rot, rc.doubled, td, rc.lambda, rc.buffer_doubled);
    Rng rng(0xF00DULL + 101 * ci);
    bool interior_ok = true;
    for (int trial = 0; trial < kForcings; ++trial) {
      const auto f = draw_forcing(rc.base, dim, rc.support_end, rng);
      const ResolventSolution sb = resolve(pb.sys, rc.base, qb, tb, f);
      const ResolventChecks cb = resolvent_checks(pb.sys, rc.base, qb, sb, f);
      worst_interior = std::max(worst_interior, cb.interior_residual / rc.interior_tol);
      worst_boundary = std::max({worst_boundary, cb.bc_bottom, cb.bc_boundary_form});
      if (cb.interior_residual > rc.interior_tol) interior_ok = false;

      const auto fd = zero_pad(f, rc.doubled, dim);
      const ResolventSolution sd = resolve(pd.sys, rc.doubled, qd, td, fd);
      const double tail_b = sb.rhat.back().norm();
      const double tail_d = sd.rhat.back().norm();
      if (!(tail_d < tail_b)) {
        ++tail_failures;
        note = rc.name + ": tail " + fmt(tail_b) + " -> " + fmt(tail_d);
      }
    }
    if (!interior_ok) note = rc.name + ": interior residual over budget";
  }
  const bool pass =
      worst_interior <= 1.0 && worst_boundary <= kBoundaryTol && tail_failures == 0;
  return {pass, "interior worst " + fmt(worst_interior) +
                    "x of budget, boundary worst " + fmt(worst_boundary) + " tol " +
                    fmt(kBoundaryTol) + ", tail failures " +
                    std::to_string(tail_failures) + (note.empty() ? "" : ", " + note)};
}

// ---------------------------------------------------------------------------
// Criterion 9: weighted-norm inequality over seeded forcings.

Outcome criterion_norm_inequality() {
  constexpr double kSlackFloor = -1e-8;
  constexpr int kForcings = 50;
  double min_slack = 1e300, min_literal_gap = 1e300;

  struct IneqCase {
    std::string name;
    Problem prob;
    TimeScale ts;
    Complex lambda0, lambda;
    double support_end, buffer;
  };
  std::vector<IneqCase> cases;
  {
    TimeScale ts = TimeScale::make_continuous(0.0, 12.0, 0.01);
    cases.push_back({"sturm_liouville", free_sl_problem(ts), ts, Complex(0.0, 0.0),
                     Complex(0.0, 1.0), 5.4, 14.0});
  }
  {
    TimeScale ts = TimeScale::make_continuous(0.0, 8.0, 0.004);
    cases.push_back({"fourth_order", fourth_problem(ts), ts, Complex(0.0, 0.0),
                     Complex(-1.0, 0.0), 3.6, 0.0});
  }
  {
    TimeScale ts = TimeScale::make_continuous(0.0, 5.0, 0.0025);
    cases.push_back({"orr_sommerfeld", os_problem(ts), ts, Complex(-2.0, 0.0),
                     Complex(-3.0, 0.0), 2.25, 0.0});
  }
  {
    TimeScale ts = uniform_discrete(-0.5, 0.0, 6.0, 0.5);
    cases.push_back({"even_order", even3_problem(ts), ts, Complex(0.0, 0.0),
                     Complex(0.0, 0.1), 2.7, 0.0});
  }

  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const IneqCase& ic = cases[ci];
    const double delta =
        cone_margin(ic.prob.sys, ic.prob.rot, ic.ts, ic.lambda0, ic.lambda);
    const FundamentalTrajectory traj = fundamental_pair(ic.prob.sys, ic.ts, ic.lambda);
    const WeylSolutionPair pair =
        route_pair(ic.prob.sys, ic.prob.rot, ic.ts, traj, ic.lambda, ic.buffer);
    Rng rng(0x1234ULL + 7 * ci);
    for (int trial = 0; trial < kForcings; ++trial) {
      const auto f = draw_forcing(ic.ts, 2 * ic.prob.sys.n, ic.support_end, rng);
      const ResolventSolution sol = resolve(ic.prob.sys, ic.ts, pair, traj, f);
      const NormInequalityReport rep = norm_inequality(
          ic.prob.sys, ic.prob.rot, ic.ts, ic.lambda0, sol, f, delta, delta / 2.0);
      min_slack = std::min(min_slack, rep.slack);
      min_literal_gap = std::min(min_literal_gap, rep.literal_rhs - rep.literal_lhs);
    }
  }
  // The literal second inequality is reported, not asserted.
  return {min_slack >= kSlackFloor,
          "min slack " + fmt(min_slack) + " floor " + fmt(kSlackFloor) +
              "; reported literal-form min gap " + fmt(min_literal_gap)};
}

// ---------------------------------------------------------------------------
// Criterion 10: scattered-to-dense consistency of M.

Outcome criterion_grid_consistency() {
  constexpr double kRatioCap = 0.75;
  const Complex lambda(0.0, 1.0);
  const Complex oracle = free_sl_m_oracle(lambda);
  double errs[3];
  const double steps[3] = {0.2, 0.1, 0.05};
  const CoefficientSystem sys = free_sl_system();
  for (int i = 0; i < 3; ++i) {
    const TimeScale ts = uniform_discrete(-steps[i], 0.0, 40.0, steps[i]);
    const WeylSolutionPair pair = stable_weyl_pair(sys, ts, lambda, 22.0);
    errs[i] = std::abs(pair.M(0, 0) - oracle);
  }
  const bool decreasing = errs[1] < errs[0] && errs[2] < errs[1];
  const double r1 = errs[1] / errs[0], r2 = errs[2] / errs[1];
  return {decreasing && r1 <= kRatioCap && r2 <= kRatioCap,
          "errors " + fmt(errs[0]) + " -> " + fmt(errs[1]) + " -> " + fmt(errs[2]) +
              ", ratios " + fmt(r1) + ", " + fmt(r2) + " cap " + fmt(kRatioCap)};
}

// ---------------------------------------------------------------------------
// Criterion 11: the bundled scenarios run clean inside the time budget.

Outcome criterion_bundled_scenarios() {
  constexpr double kBudgetSeconds = 300.0;
  const auto start = Clock::now();
  const std::filesystem::path config_dir(WEYLSCALE_CONFIG_DIR);
  const auto out_root =
      std::filesystem::temp_directory_path() / "weylscale_acceptance";
  std::filesystem::remove_all(out_root);

  std::vector<std::filesystem::path> configs;
  for (const auto& entry : std::filesystem::directory_iterator(config_dir)) {
    if (entry.path().extension() == ".json") configs.push_back(entry.path());
  }
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) return {false, "no bundled configs found"};

  std::string ran;
  for (const auto& path : configs) {
    const ScenarioConfig cfg = parse_config(path.string());
    const RunReport rep =
        run_command("check", cfg, (out_root / path.stem()).string(), 4);
    if (!ran.empty()) ran += ", ";
    ran += path.stem().string() + (rep.exit_code == 0 ? ":ok" : ":FAILED");
    if (rep.exit_code != 0) {
      return {false, ran + " [" + rep.summary + "]"};
    }
  }
  const double elapsed = seconds_since(start);
  return {elapsed <= kBudgetSeconds,
          std::to_string(configs.size()) + " scenarios (" + ran + "), " + fmt(elapsed) +
              " s of " + fmt(kBudgetSeconds)};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    std::function<Outcome()> run;
  };
  const Entry entries[] = {
      {1, "free Sturm-Liouville M oracle", criterion_free_sl_oracle},
      {2, "fundamental-inverse identity", criterion_lemma_identity},
      {3, "two-parameter boundary formula", criterion_greens_formula},
      {4, "disk nesting and monotonicity", criterion_nesting},
      {5, "radius route cross-check", criterion_radius_routes},
      {6, "M-difference identity decay", criterion_m_difference},
      {7, "Weyl pair coupling identities", criterion_couplings},
      {8, "resolvent defects and tails", criterion_resolvent},
      {9, "weighted-norm inequality", criterion_norm_inequality},
      {10, "grid refinement of M", criterion_grid_consistency},
      {11, "bundled scenario suite", criterion_bundled_scenarios},
  };
  int failures = 0;
  for (const Entry& entry : entries) {
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  criterion %2d: %s (%s)\n", outcome.pass ? "PASS" : "FAIL", entry.id,
                entry.label, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures > 0) {
    std::printf("%d of 11 criteria failing\n", failures);
    return 1;
  }
  std::printf("all 11 criteria passing\n");
  return 0;
}
