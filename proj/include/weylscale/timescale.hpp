#pragma once

#include <functional>
#include <vector>

#include "weylscale/matrixkit.hpp"

namespace weylscale {

enum class ScaleKind { Continuous, Discrete };

struct Jumps {
  double sigma = 0.0;
  double rho = 0.0;
  double mu = 0.0;
  double nu = 0.0;
};

struct ScaleComponent {
  bool is_interval = false;
  double left = 0.0;
  double right = 0.0;  // for points, right == left
};

struct SturmianReport {
  bool ok = true;
  std::vector<double> violations;  // points where sigma(rho(t)) or rho(sigma(t)) != t
};

// Truncated working grid over a Sturmian time scale: either one closed interval
// sampled uniformly, or a finite strictly increasing point set with an explicit
// prepoint rho(t0). The grid's last point stands in for an unbounded scale, so
// sigma(last) = last and mu(last) = 0 by convention; quantities that would read
// past the horizon must not consume that sample.
class TimeScale {
 public:
  static TimeScale make_discrete(double prepoint, std::vector<double> points);
  static TimeScale make_continuous(double t0, double horizon, double base_step);

  // Checks the Sturmian identities sigma(rho(t)) = rho(sigma(t)) = t on a
  // component description of a candidate scale (intervals and isolated points).
  static SturmianReport validate_sturmian(const std::vector<ScaleComponent>& components);

  ScaleKind kind() const { return kind_; }
  double t0() const { return points_.front(); }
  double horizon() const { return points_.back(); }
  double prepoint() const { return prepoint_; }
  int npoints() const { return static_cast<int>(points_.size()); }
  double point(int k) const;
  Jumps jumps(int k) const;
  double mu(int k) const { return jumps(k).mu; }
  // Node spacing point(k+1) - point(k); on a continuous scale this is the grid
  // step, not the (zero) graininess.
  double spacing(int k) const;
  bool is_last(int k) const { return k == npoints() - 1; }
  int index_of(double t) const;

  // Delta integral of node samples over [point(ka), point(kb)). Scattered
  // points contribute mu(k) * f(k) exactly; on a continuous scale each grid
  // interval is integrated by cubic interpolation through four neighbouring
  // nodes (the same cells delta_prefix accumulates), so integrals over
  // adjacent ranges add exactly. The sample may be probed one node outside
  // [ka, kb] where the grid allows it.
  CMatrix delta_integral(const std::function<CMatrix(int)>& sample, int ka, int kb) const;
  Complex delta_integral_scalar(const std::function<Complex(int)>& sample, int ka,
                                int kb) const;

  // F[k] = delta integral over [t0, point(k)); F[0] = 0, F has npoints entries.
  // Continuous increments use cubic interpolation through four neighbouring
  // nodes, so prefixes stay fourth-order accurate and adjacent splits add up
  // exactly.
  std::vector<CMatrix> delta_prefix(const std::function<CMatrix(int)>& sample) const;

 private:
  TimeScale() = default;
  void check_index(int k) const;

  ScaleKind kind_ = ScaleKind::Discrete;
  std::vector<double> points_;
  double prepoint_ = 0.0;
  double step_ = 0.0;  // continuous only
};

}  // namespace weylscale
