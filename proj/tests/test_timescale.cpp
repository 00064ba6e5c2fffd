#include <cmath>
#include <vector>

#include "doctest.h"
#include "weylscale/rng.hpp"
#include "weylscale/timescale.hpp"

using namespace weylscale;

namespace {

CMatrix scalar(Complex v) {
  CMatrix m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace

TEST_CASE("scattered jump operators on a nonuniform grid") {
  const TimeScale ts = TimeScale::make_discrete(-0.5, {0.0, 0.5, 1.5, 3.0});
  CHECK(ts.kind() == ScaleKind::Discrete);
  CHECK(ts.t0() == 0.0);
  CHECK(ts.horizon() == 3.0);
  CHECK(ts.npoints() == 4);

  CHECK(ts.jumps(0).rho == -0.5);
  CHECK(ts.jumps(0).nu == 0.5);
  CHECK(ts.jumps(0).sigma == 0.5);
  CHECK(ts.mu(0) == 0.5);
  CHECK(ts.mu(1) == 1.0);
  CHECK(ts.jumps(2).rho == 0.5);

  // Truncation convention at the horizon.
  CHECK(ts.jumps(3).sigma == 3.0);
  CHECK(ts.mu(3) == 0.0);
  CHECK(ts.is_last(3));
}

TEST_CASE("continuous scale has zero graininess but a positive grid step") {
  const TimeScale ts = TimeScale::make_continuous(1.0, 3.0, 0.25);
  CHECK(ts.kind() == ScaleKind::Continuous);
  CHECK(ts.npoints() == 9);
  for (int k = 0; k < ts.npoints(); ++k) {
    CHECK(ts.mu(k) == 0.0);
    CHECK(ts.jumps(k).sigma == ts.point(k));
    CHECK(ts.jumps(k).rho == ts.point(k));
  }
  CHECK(ts.spacing(0) == doctest::Approx(0.25));
}

TEST_CASE("sturmian validation accepts pure kinds and rejects mixtures") {
  const SturmianReport interval = TimeScale::validate_sturmian({{true, 0.0, 5.0}});
  CHECK(interval.ok);

  const SturmianReport points = TimeScale::validate_sturmian(
      {{false, -1.0, -1.0}, {false, 0.0, 0.0}, {false, 1.0, 1.0}});
  CHECK(points.ok);

  // An isolated point next to an interval breaks sigma(rho(t)) = t at the seam.
  const SturmianReport mixed =
      TimeScale::validate_sturmian({{false, -1.0, -1.0}, {true, 0.0, 2.0}});
  CHECK_FALSE(mixed.ok);
  CHECK_FALSE(mixed.violations.empty());
}

TEST_CASE("constructor guards") {
  CHECK_THROWS_AS(TimeScale::make_discrete(-1.0, {0.0, 1.0, 0.5}), WeylError);
  CHECK_THROWS_AS(TimeScale::make_discrete(0.0, {0.0, 1.0}), WeylError);
  CHECK_THROWS_AS(TimeScale::make_discrete(-1.0, {}), WeylError);

  try {
    TimeScale::make_discrete(0.5, {0.0, 1.0});
    CHECK(false);
  } catch (const WeylError& e) {
    CHECK(e.code() == ErrorCode::MissingPrepoint);
  }
}

TEST_CASE("index lookup uses a tolerance band and rejects off-grid points") {
  const TimeScale ts = TimeScale::make_continuous(0.0, 2.0, 0.1);
  CHECK(ts.index_of(1.0) == 10);
  CHECK(ts.index_of(1.0 + 1e-12) == 10);
  try {
    ts.index_of(1.05);
    CHECK(false);
  } catch (const WeylError& e) {
    CHECK(e.code() == ErrorCode::RangeMismatch);
  }
}

TEST_CASE("scattered delta integral is the exact mu-weighted sum") {
  const TimeScale ts = TimeScale::make_discrete(-1.0, {0.0, 1.0, 2.5, 3.0, 4.75});
  Rng rng(201);
  std::vector<Complex> samples(ts.npoints());
  for (auto& v : samples) v = rng.cnormal();

  // Oracle: the delta integral over [a, b) on isolated points is
  // sum_k mu(k) f(k), excluding the right endpoint.
  Complex expected = 0.0;
  for (int k = 1; k < 4; ++k) expected += ts.mu(k) * samples[k];

  const CMatrix got = ts.delta_integral([&](int k) { return scalar(samples[k]); }, 1, 4);
  CHECK(std::abs(got(0, 0) - expected) == 0.0);
}

TEST_CASE("continuous delta integral matches a closed-form antiderivative") {
  const TimeScale ts = TimeScale::make_continuous(0.0, 2.5, 0.01);
  const Complex expected = 1.0 - std::cos(2.5);
  const CMatrix got = ts.delta_integral(
      [&](int k) { return scalar(std::sin(ts.point(k))); }, 0, ts.npoints() - 1);
  CHECK(std::abs(got(0, 0) - expected) <= 1e-9);
}

TEST_CASE("prefix integrals split additively and match the full integral") {
  const TimeScale cts = TimeScale::make_continuous(0.0, 1.5, 0.01);
  auto f = [&](int k) {
    const double t = cts.point(k);
    return scalar(Complex(std::exp(-t), std::sin(2.0 * t)));
  };
  const std::vector<CMatrix> prefix = cts.delta_prefix(f);
  REQUIRE(static_cast<int>(prefix.size()) == cts.npoints());
  CHECK(prefix[0].cwiseAbs().maxCoeff() == 0.0);

  for (int k : {1, 37, 80, cts.npoints() - 1}) {
    const CMatrix direct = cts.delta_integral(f, 0, k);
    CHECK(std::abs(prefix[k](0, 0) - direct(0, 0)) <= 1e-9);
  }

  // Consecutive prefixes differ by the one-interval integral.
  const CMatrix inc = cts.delta_integral(f, 40, 41);
  CHECK(std::abs((prefix[41](0, 0) - prefix[40](0, 0)) - inc(0, 0)) <= 1e-11);

  // On scattered points the prefix is the exact partial sum.
  const TimeScale dts = TimeScale::make_discrete(-1.0, {0.0, 1.0, 1.5, 2.0, 3.5});
  Rng rng(202);
  std::vector<Complex> samples(dts.npoints());
  for (auto& v : samples) v = rng.cnormal();
  const std::vector<CMatrix> dprefix =
      dts.delta_prefix([&](int k) { return scalar(samples[k]); });
  Complex run = 0.0;
  for (int k = 0; k < dts.npoints(); ++k) {
    CHECK(std::abs(dprefix[k](0, 0) - run) == 0.0);
    run += dts.mu(k) * samples[k];
  }
}

TEST_CASE("quadrature order supports tight downstream tolerances") {
  // Fourth-order convergence: halving the step shrinks the error ~16x.
  auto err_at = [](double h) {
    const TimeScale ts = TimeScale::make_continuous(0.0, 2.0, h);
    const Complex expected = (std::exp(Complex(0.0, 2.0) * 2.0) - 1.0) / Complex(0.0, 2.0);
    const CMatrix got = ts.delta_integral(
        [&](int k) { return scalar(std::exp(Complex(0.0, 2.0) * ts.point(k))); }, 0,
        ts.npoints() - 1);
    return std::abs(got(0, 0) - expected);
  };
  const double e1 = err_at(0.02);
  const double e2 = err_at(0.01);
  CHECK(e2 <= e1 / 8.0);
}
