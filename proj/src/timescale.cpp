#include "weylscale/timescale.hpp"

#include <algorithm>
#include <cmath>

namespace weylscale {

TimeScale TimeScale::make_discrete(double prepoint, std::vector<double> points) {
  if (points.size() < 2) {
    throw WeylError(ErrorCode::EmptyInterval,
                    "make_discrete: need at least two points, got " +
                        std::to_string(points.size()));
  }
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    if (!(points[k] < points[k + 1])) {
      throw WeylError(ErrorCode::NonMonotone,
                      "make_discrete: points not strictly increasing at index " +
                          std::to_string(k));
    }
  }
  if (!(prepoint < points.front())) {
    throw WeylError(ErrorCode::MissingPrepoint,
                    "make_discrete: prepoint " + std::to_string(prepoint) +
                        " must lie strictly before t0 = " + std::to_string(points.front()));
  }
  TimeScale ts;
  ts.kind_ = ScaleKind::Discrete;
  ts.points_ = std::move(points);
  ts.prepoint_ = prepoint;
  return ts;
}

TimeScale TimeScale::make_continuous(double t0, double horizon, double base_step) {
  if (!(horizon > t0)) {
    throw WeylError(ErrorCode::EmptyInterval, "make_continuous: horizon <= t0");
  }
  if (!(base_step > 0.0)) {
    throw WeylError(ErrorCode::NonPositiveParams, "make_continuous: base_step <= 0");
  }
  const int nsteps = std::max(1, static_cast<int>(std::ceil((horizon - t0) / base_step - 1e-12)));
  const double h = (horizon - t0) / nsteps;
  TimeScale ts;
  ts.kind_ = ScaleKind::Continuous;
  ts.points_.resize(nsteps + 1);
  for (int k = 0; k <= nsteps; ++k) ts.points_[k] = t0 + k * h;
  ts.prepoint_ = t0;
  ts.step_ = h;
  return ts;
}

SturmianReport TimeScale::validate_sturmian(const std::vector<ScaleComponent>& components) {
  SturmianReport report;
  if (components.empty()) {
    report.ok = false;
    return report;
  }
  auto comps = components;
  std::sort(comps.begin(), comps.end(),
            [](const ScaleComponent& a, const ScaleComponent& b) { return a.left < b.left; });
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const auto& c = comps[k];
    if (c.is_interval && !(c.left < c.right)) {
      report.ok = false;
      report.violations.push_back(c.left);
    }
    if (k + 1 < comps.size() && !(c.right < comps[k + 1].left)) {
      report.ok = false;
      report.violations.push_back(comps[k + 1].left);
    }
  }
  // sigma(rho(t)) = rho(sigma(t)) = t fails exactly where an interval endpoint
  // has a neighbouring component: the dense side fixes rho (or sigma) while the
  // scattered side jumps past it.
  for (std::size_t k = 0; k < comps.size(); ++k) {
    if (!comps[k].is_interval) continue;
    if (k > 0) report.violations.push_back(comps[k].left);
    if (k + 1 < comps.size()) report.violations.push_back(comps[k].right);
  }
  std::sort(report.violations.begin(), report.violations.end());
  report.violations.erase(std::unique(report.violations.begin(), report.violations.end()),
                          report.violations.end());
  report.ok = report.ok && report.violations.empty();
  return report;
}

void TimeScale::check_index(int k) const {
  if (k < 0 || k >= npoints()) {
    throw WeylError(ErrorCode::IndexOutOfRange,
                    "index " + std::to_string(k) + " outside [0, " +
                        std::to_string(npoints() - 1) + "]");
  }
}

double TimeScale::point(int k) const {
  check_index(k);
  return points_[k];
}

Jumps TimeScale::jumps(int k) const {
  check_index(k);
  Jumps j;
  const double t = points_[k];
  if (kind_ == ScaleKind::Continuous) {
    j.sigma = t;
    j.rho = t;
    j.mu = 0.0;
    j.nu = 0.0;
    return j;
  }
  j.sigma = is_last(k) ? t : points_[k + 1];
  j.rho = (k == 0) ? prepoint_ : points_[k - 1];
  j.mu = j.sigma - t;
  j.nu = t - j.rho;
  return j;
}

double TimeScale::spacing(int k) const {
  check_index(k);
  if (is_last(k)) {
    throw WeylError(ErrorCode::IndexOutOfRange, "spacing: no interval after the last point");
  }
  return points_[k + 1] - points_[k];
}

int TimeScale::index_of(double t) const {
  const double band = 1e-9 * std::max(1.0, std::abs(t));
  auto it = std::lower_bound(points_.begin(), points_.end(), t - band);
  if (it != points_.end() && std::abs(*it - t) <= band) {
    return static_cast<int>(it - points_.begin());
  }
  throw WeylError(ErrorCode::RangeMismatch,
                  "index_of: " + std::to_string(t) + " is not a grid point");
}

CMatrix TimeScale::delta_integral(const std::function<CMatrix(int)>& sample, int ka,
                                  int kb) const {
  check_index(ka);
  check_index(kb);
  if (kb < ka) {
    throw WeylError(ErrorCode::RangeMismatch, "delta_integral: kb < ka");
  }
  if (kb == ka) {
    CMatrix probe = sample(ka);
    return CMatrix::Zero(probe.rows(), probe.cols());
  }
  if (kind_ == ScaleKind::Discrete) {
    CMatrix acc = mu(ka) * sample(ka);
    for (int k = ka + 1; k < kb; ++k) acc += mu(k) * sample(k);
    return acc;
  }
  // Same per-interval cubic cells as delta_prefix, so that integrals over
  // adjacent ranges add up to the integral over the union exactly.
  const double h = step_;
  const int n = npoints();
  CMatrix probe = sample(ka);
  CMatrix acc = CMatrix::Zero(probe.rows(), probe.cols());
  if (n == 2) {
    return 0.5 * h * (sample(0) + sample(1));
  }
  if (n == 3) {
    for (int c = ka; c < kb; ++c) {
      if (c == 0) {
        acc += (h / 12.0) * (5.0 * sample(0) + 8.0 * sample(1) - sample(2));
      } else {
        acc += (h / 12.0) * (-sample(0) + 8.0 * sample(1) + 5.0 * sample(2));
      }
    }
    return acc;
  }
  for (int c = ka; c < kb; ++c) {
    if (c == 0) {
      acc += (h / 24.0) *
             (9.0 * sample(0) + 19.0 * sample(1) - 5.0 * sample(2) + sample(3));
    } else if (c == n - 2) {
      acc += (h / 24.0) * (sample(n - 4) - 5.0 * sample(n - 3) +
                           19.0 * sample(n - 2) + 9.0 * sample(n - 1));
    } else {
      acc += (h / 24.0) * (-sample(c - 1) + 13.0 * sample(c) + 13.0 * sample(c + 1) -
                           sample(c + 2));
    }
  }
  return acc;
}

Complex TimeScale::delta_integral_scalar(const std::function<Complex(int)>& sample, int ka,
                                         int kb) const {
  auto wrap = [&](int k) {
    CMatrix m(1, 1);
    m(0, 0) = sample(k);
    return m;
  };
  return delta_integral(wrap, ka, kb)(0, 0);
}

std::vector<CMatrix> TimeScale::delta_prefix(const std::function<CMatrix(int)>& sample) const {
  const int n = npoints();
  std::vector<CMatrix> f(n);
  for (int k = 0; k < n; ++k) f[k] = sample(k);
  std::vector<CMatrix> prefix(n);
  prefix[0] = CMatrix::Zero(f[0].rows(), f[0].cols());
  if (kind_ == ScaleKind::Discrete) {
    for (int k = 1; k < n; ++k) prefix[k] = prefix[k - 1] + mu(k - 1) * f[k - 1];
    return prefix;
  }
  const double h = step_;
  if (n == 2) {
    prefix[1] = prefix[0] + 0.5 * h * (f[0] + f[1]);
    return prefix;
  }
  if (n == 3) {
    prefix[1] = prefix[0] + (h / 12.0) * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    prefix[2] = prefix[1] + (h / 12.0) * (-f[0] + 8.0 * f[1] + 5.0 * f[2]);
    return prefix;
  }
  // Cubic interpolation through four neighbouring nodes, integrated over one
  // interval at a time; boundary intervals use one-sided stencils.
  prefix[1] = prefix[0] + (h / 24.0) * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  for (int k = 1; k + 2 < n; ++k) {
    prefix[k + 1] =
        prefix[k] + (h / 24.0) * (-f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2]);
  }
  prefix[n - 1] = prefix[n - 2] + (h / 24.0) * (f[n - 4] - 5.0 * f[n - 3] +
                                                19.0 * f[n - 2] + 9.0 * f[n - 1]);
  return prefix;
}

}  // namespace weylscale
