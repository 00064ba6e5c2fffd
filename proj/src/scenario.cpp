#include "weylscale/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "weylscale/rng.hpp"

namespace weylscale {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw WeylError(ErrorCode::ConfigError, path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      fail(path + "." + item.key(), "unknown key");
    }
  }
}

const json& require_key(const json& obj, const std::string& path, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required key");
  return *it;
}

std::string parse_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

double parse_real(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      fail(path, "not a decimal number: \"" + s + "\"");
    }
    if (used != s.size()) fail(path, "trailing characters in number: \"" + s + "\"");
    return v;
  }
  fail(path, "expected a number (or a decimal string)");
}

Complex parse_complex(const json& j, const std::string& path) {
  if (j.is_number() || j.is_string()) return Complex(parse_real(j, path), 0.0);
  if (j.is_array()) {
    if (j.size() != 2) fail(path, "complex values are [re, im] pairs");
    return Complex(parse_real(j[0], path + "[0]"), parse_real(j[1], path + "[1]"));
  }
  fail(path, "expected a complex value as [re, im]");
}

RealFn parse_real_fn(const json& j, const std::string& path) {
  if (j.is_number() || j.is_string()) {
    const double c = parse_real(j, path);
    return [c](double) { return c; };
  }
  if (j.is_object()) {
    check_keys(j, path, {"poly"});
    const json& poly = require_key(j, path, "poly");
    if (!poly.is_array() || poly.empty()) fail(path + ".poly", "expected coefficient array");
    std::vector<double> coeff;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      coeff.push_back(parse_real(poly[i], path + ".poly[" + std::to_string(i) + "]"));
    }
    return [coeff](double t) {
      double v = 0.0;
      for (std::size_t i = coeff.size(); i-- > 0;) v = v * t + coeff[i];
      return v;
    };
  }
  fail(path, "expected a number, decimal string, or {\"poly\": [...]}");
}

TimeScale parse_timescale(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string kind = parse_string(require_key(j, path, "kind"), path + ".kind");
  try {
    if (kind == "continuous") {
      check_keys(j, path, {"kind", "t0", "T", "step"});
      const double t0 = parse_real(require_key(j, path, "t0"), path + ".t0");
      const double horizon = parse_real(require_key(j, path, "T"), path + ".T");
      const double step = parse_real(require_key(j, path, "step"), path + ".step");
      if (!(step > 0.0)) fail(path + ".step", "step must be positive");
      if (!(horizon > t0)) fail(path + ".T", "horizon must exceed t0");
      return TimeScale::make_continuous(t0, horizon, step);
    }
    if (kind == "discrete") {
      check_keys(j, path, {"kind", "prepoint", "points", "t0", "T", "step"});
      const double prepoint = parse_real(require_key(j, path, "prepoint"), path + ".prepoint");
      if (j.contains("points")) {
        const json& pts = j["points"];
        if (!pts.is_array()) fail(path + ".points", "expected an array");
        std::vector<double> points;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          points.push_back(parse_real(pts[i], path + ".points[" + std::to_string(i) + "]"));
        }
        return TimeScale::make_discrete(prepoint, std::move(points));
      }
      const double t0 = parse_real(require_key(j, path, "t0"), path + ".t0");
      const double horizon = parse_real(require_key(j, path, "T"), path + ".T");
      const double step = parse_real(require_key(j, path, "step"), path + ".step");
      if (!(step > 0.0)) fail(path + ".step", "step must be positive");
      if (!(horizon > t0)) fail(path + ".T", "horizon must exceed t0");
      const int count = static_cast<int>(std::floor((horizon - t0) / step + 1e-9)) + 1;
      std::vector<double> points(count);
      for (int k = 0; k < count; ++k) points[k] = t0 + k * step;
      return TimeScale::make_discrete(prepoint, std::move(points));
    }
  } catch (const WeylError& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(path, e.what());
  }
  fail(path + ".kind", "expected \"continuous\" or \"discrete\"");
}

Problem parse_problem(const json& j, const std::string& path, const TimeScale& ts,
                      std::string* variant_out) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string variant = parse_string(require_key(j, path, "variant"), path + ".variant");
  *variant_out = variant;
  const double eta =
      j.contains("eta") ? parse_real(j["eta"], path + ".eta") : 0.0;
  if (variant == "sturm_liouville") {
    check_keys(j, path, {"variant", "eta", "p", "q", "w"});
    SturmLiouvilleSpec spec;
    spec.p = parse_real_fn(require_key(j, path, "p"), path + ".p");
    spec.q = parse_real_fn(require_key(j, path, "q"), path + ".q");
    spec.w = parse_real_fn(require_key(j, path, "w"), path + ".w");
    spec.eta = eta;
    return sturm_liouville(spec, ts);
  }
  if (variant == "fourth_order" || variant == "even_order") {
    check_keys(j, path, {"variant", "eta", "n", "p", "w"});
    EvenOrderSpec spec;
    if (variant == "fourth_order") {
      spec.n = 2;
    } else {
      const double nd = parse_real(require_key(j, path, "n"), path + ".n");
      spec.n = static_cast<int>(nd);
      if (nd != spec.n || spec.n < 1) fail(path + ".n", "n must be a positive integer");
    }
    const json& pj = require_key(j, path, "p");
    if (!pj.is_array() || static_cast<int>(pj.size()) != spec.n + 1) {
      fail(path + ".p", "expected " + std::to_string(spec.n + 1) + " coefficient entries");
    }
    for (std::size_t i = 0; i < pj.size(); ++i) {
      spec.p.push_back(parse_real_fn(pj[i], path + ".p[" + std::to_string(i) + "]"));
    }
    spec.w = parse_real_fn(require_key(j, path, "w"), path + ".w");
    spec.eta = eta;
    Problem prob = even_order(spec, ts);
    prob.name = variant;
    return prob;
  }
  if (variant == "orr_sommerfeld") {
    check_keys(j, path, {"variant", "eta", "a", "reynolds", "profile", "V", "Vpp"});
    OrrSommerfeldSpec spec;
    spec.a = parse_real(require_key(j, path, "a"), path + ".a");
    spec.reynolds = parse_real(require_key(j, path, "reynolds"), path + ".reynolds");
    if (!(spec.a > 0.0)) fail(path + ".a", "wavenumber must be positive");
    if (spec.reynolds < 0.0) fail(path + ".reynolds", "Reynolds number must be nonnegative");
    spec.eta = eta;
    if (j.contains("profile")) {
      if (j.contains("V") || j.contains("Vpp")) {
        fail(path + ".profile", "give either a named profile or explicit V and Vpp");
      }
      const std::string prof = parse_string(j["profile"], path + ".profile");
      if (prof == "couette") {
        const OrrSommerfeldSpec base = couette_flow(spec.a, spec.reynolds, eta);
        spec.V = base.V;
        spec.Vpp = base.Vpp;
      } else if (prof == "poiseuille") {
        const OrrSommerfeldSpec base = poiseuille_flow(spec.a, spec.reynolds, eta);
        spec.V = base.V;
        spec.Vpp = base.Vpp;
      } else {
        fail(path + ".profile", "unknown profile \"" + prof + "\"");
      }
    } else {
      spec.V = parse_real_fn(require_key(j, path, "V"), path + ".V");
      spec.Vpp = parse_real_fn(require_key(j, path, "Vpp"), path + ".Vpp");
    }
    return orr_sommerfeld(spec, ts);
  }
  fail(path + ".variant", "unknown variant \"" + variant + "\"");
}

std::map<std::string, double> default_tolerances(ScaleKind kind) {
  if (kind == ScaleKind::Discrete) {
    return {{"admissible", 1e-10}, {"lemma", 1e-10}, {"greens", 1e-10},
            {"energy", 1e-9},      {"coupling", 1e-10}, {"nesting", 1e-8},
            {"bc", 1e-10},         {"interior", 1e-9},  {"tail", 1e-9},
            {"duality", 1e-9}};
  }
  return {{"admissible", 1e-10}, {"lemma", 1e-6}, {"greens", 1e-7},
          {"energy", 1e-6},      {"coupling", 1e-6}, {"nesting", 1e-8},
          {"bc", 1e-10},         {"interior", 1e-5}, {"tail", 1e-7},
          {"duality", 1e-7}};
}

// Smooth compactly supported forcings keep dense-scale quadrature and finite
// differences honest; scattered scales take plain seeded node noise. Support
// stays inside the first 60% of the span so the truncated tail integral is the
// exact infinite-horizon one.
std::vector<CVector> seeded_forcing(const TimeScale& ts, int dim, Rng& rng) {
  const double t0 = ts.t0();
  const double cut = 0.6 * (ts.horizon() - t0);
  std::vector<CVector> f(ts.npoints(), CVector::Zero(dim));
  if (ts.kind() == ScaleKind::Discrete) {
    for (int k = 0; k < ts.npoints(); ++k) {
      if (ts.point(k) - t0 < cut) {
        for (int i = 0; i < dim; ++i) f[k](i) = rng.cnormal();
      }
    }
    return f;
  }
  struct Mode {
    Complex c;
    double om, ph;
  };
  std::vector<std::vector<Mode>> modes(dim);
  for (int i = 0; i < dim; ++i) {
    for (int m = 0; m < 3; ++m) {
      Mode md;
      md.c = rng.cnormal();
      md.om = rng.uniform(0.5, 2.5);
      md.ph = rng.uniform(0.0, 6.283185307179586);
      modes[i].push_back(md);
    }
  }
  for (int k = 0; k < ts.npoints(); ++k) {
    const double t = ts.point(k) - t0;
    const double x = t / cut;
    if (x >= 1.0) continue;
    const double bump = std::exp(1.0 - 1.0 / (1.0 - x * x));
    for (int i = 0; i < dim; ++i) {
      Complex v = 0.0;
      for (const Mode& md : modes[i]) v += md.c * std::sin(md.om * t + md.ph);
      f[k](i) = v * bump;
    }
  }
  return f;
}

template <typename Fn>
void parallel_for(int njobs, int threads, const Fn& fn) {
  threads = std::max(1, std::min(threads, njobs));
  if (threads <= 1) {
    for (int i = 0; i < njobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      try {
        for (int i; (i = next.fetch_add(1)) < njobs;) fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

std::string join_row(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  return row;
}

void push_matrix_cells(std::vector<std::string>& cells, const CMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      cells.push_back(format_double(m(r, c).real()));
      cells.push_back(format_double(m(r, c).imag()));
    }
  }
}

void push_matrix_header(std::vector<std::string>& cells, const std::string& base, int rows,
                        int cols) {
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::string tag = base + "_" + std::to_string(r) + "_" + std::to_string(c);
      cells.push_back(tag + "_re");
      cells.push_back(tag + "_im");
    }
  }
}

RVector herm_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(re_herm(m));
  return es.eigenvalues();
}

// Dense scales run the local identity checks on a leading window so that the
// tolerances track quadrature error instead of exponential solution growth;
// scattered scales are exact and use the whole grid.
TimeScale window_scale(const TimeScale& ts, double win) {
  if (ts.kind() == ScaleKind::Discrete || win >= ts.horizon() - 1e-12) return ts;
  return TimeScale::make_continuous(ts.t0(), win, ts.spacing(0));
}

struct LambdaGuard {
  std::vector<double> margins;
  double min_margin = 0.0;
};

LambdaGuard cone_margins(const ScenarioConfig& cfg) {
  LambdaGuard g;
  g.min_margin = std::numeric_limits<double>::infinity();
  for (const Complex& lambda : cfg.lambdas) {
    const double d = cone_margin(cfg.problem.sys, cfg.problem.rot, cfg.scale(), cfg.lambda0,
                                 lambda);
    g.margins.push_back(d);
    g.min_margin = std::min(g.min_margin, d);
  }
  return g;
}

void require_cone(const ScenarioConfig& cfg, const LambdaGuard& guard) {
  for (std::size_t i = 0; i < guard.margins.size(); ++i) {
    if (!(guard.margins[i] > 0.0)) {
      throw WeylError(ErrorCode::ConeViolation,
                      "delta_star = " + format_double(guard.margins[i]) +
                          " <= 0 for lambda = (" + format_double(cfg.lambdas[i].real()) +
                          ", " + format_double(cfg.lambdas[i].imag()) + ")");
    }
  }
}

void require_admissible(const ScenarioConfig& cfg) {
  const AdmissibleReport rep =
      check_admissible(cfg.problem.sys, cfg.problem.rot, cfg.scale(), cfg.lambda0);
  if (!rep.ok) {
    throw WeylError(ErrorCode::ConeViolation,
                    "lambda0 inadmissible: min rotated-coefficient eigenvalue " +
                        format_double(rep.min_eig) + " at t = " + format_double(rep.argmin_t));
  }
}

WeylSolutionPair make_pair(const ScenarioConfig& cfg, const FundamentalTrajectory& traj,
                           Complex lambda) {
  const CoefficientSystem& sys = cfg.problem.sys;
  const TimeScale& ts = cfg.scale();
  if (cfg.buffer > 0.0) return stable_weyl_pair(sys, ts, lambda, cfg.buffer);
  const int k = ts.index_of(cfg.horizons.back());
  const WeylDisk disk = weyl_disk(sys, cfg.problem.rot, ts, traj, k);
  if (!disk.p_positive) {
    throw WeylError(ErrorCode::DiskUndefined,
                    "matrix disk undefined at the final horizon; no forward-route pair");
  }
  return weyl_solutions(sys, ts, traj, disk.center);
}

json manifest_json(const ScenarioConfig& cfg, const RunReport& report,
                   const json& summary) {
  json j;
  j["config_hash"] = cfg.config_hash;
  j["command"] = report.command;
  j["version"] = "0.1.0";
  j["seed"] = cfg.seed;
  j["tolerances"] = cfg.tolerances;
  j["results_summary"] = summary;
  return j;
}

void write_report_files(const std::string& out_dir, RunReport& report, const json& manifest) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  report.csv_path = (fs::path(out_dir) / (report.command + ".csv")).string();
  report.manifest_path = (fs::path(out_dir) / "manifest.json").string();
  std::ofstream csv(report.csv_path);
  if (!csv) throw WeylError(ErrorCode::ConfigError, "cannot write " + report.csv_path);
  for (const std::string& line : report.csv_lines) csv << line << '\n';
  std::ofstream mf(report.manifest_path);
  if (!mf) throw WeylError(ErrorCode::ConfigError, "cannot write " + report.manifest_path);
  mf << manifest.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// check: the full invariant suite on one scenario.

void run_check(const ScenarioConfig& cfg, RunReport& report) {
  const CoefficientSystem& sys = cfg.problem.sys;
  const RotationU& rot = cfg.problem.rot;
  const TimeScale& ts = cfg.scale();
  const auto& tol = cfg.tolerances;
  const Complex lambda = cfg.lambdas.front();
  std::vector<CheckItem>& items = report.items;

  auto add_item = [&](const std::string& name, double value, double tolerance, bool pass) {
    items.push_back({name, value, tolerance, pass});
  };
  auto add_defect = [&](const std::string& name, double value, double tolerance) {
    add_item(name, value, tolerance, value <= tolerance);
  };

  {
    std::vector<ScaleComponent> parts;
    if (ts.kind() == ScaleKind::Continuous) {
      parts.push_back({true, ts.t0(), ts.horizon()});
    } else {
      parts.push_back({false, ts.prepoint(), ts.prepoint()});
      for (int k = 0; k < ts.npoints(); ++k) {
        parts.push_back({false, ts.point(k), ts.point(k)});
      }
    }
    const SturmianReport rep = TimeScale::validate_sturmian(parts);
    add_defect("sturmian_structure", static_cast<double>(rep.violations.size()), 0.0);
  }
  {
    const RegressivityReport rep = check_regressive(sys, ts);
    add_defect("regressivity", rep.ok ? 0.0 : 1.0, 0.0);
  }
  {
    const SignatureReport rep = rotation_signature(rot);
    add_defect("rotation_signature", rep.ok ? 0.0 : 1.0, 0.0);
  }
  {
    const AdmissibleReport rep = check_admissible(sys, rot, ts, cfg.lambda0);
    add_defect("admissibility", std::max(0.0, -rep.min_eig), tol.at("admissible"));
  }
  double min_delta = std::numeric_limits<double>::infinity();
  {
    const LambdaGuard guard = cone_margins(cfg);
    min_delta = std::min(guard.min_margin,
                         cone_margin(sys, rot, ts, cfg.lambda0, cfg.xi));
    add_item("cone_margin", min_delta, 0.0, min_delta > 0.0);
  }

  const double span = ts.horizon() - ts.t0();
  const double gwin = cfg.green_horizon > 0.0 ? cfg.green_horizon
                                              : ts.t0() + std::min(4.0, span);
  const double ewin = cfg.energy_horizon > 0.0 ? cfg.energy_horizon
                                               : ts.t0() + std::min(8.0, span);
  const TimeScale gts = window_scale(ts, gwin);
  const TimeScale ets = window_scale(ts, ewin);

  auto guarded = [&](const std::string& name, double tolerance,
                     const std::function<double()>& eval) {
    double value = std::numeric_limits<double>::infinity();
    try {
      value = eval();
    } catch (const WeylError& e) {
      report.summary += std::string(" [") + name + ": " + error_code_name(e.code()) + "]";
    }
    add_defect(name, value, tolerance);
  };

  guarded("fundamental_inverse_gap", tol.at("lemma"), [&] {
    return fundamental_pair(sys, ets, lambda).adjoint_mismatch;
  });

  guarded("greens_identity", tol.at("greens"), [&] {
    const FundamentalTrajectory ty = fundamental_pair(sys, gts, lambda);
    const FundamentalTrajectory tz = fundamental_pair(sys, gts, cfg.xi);
    const GreensCheck gc =
        greens_formula(sys, gts, lambda, cfg.xi, ty.yhat, tz.zhat, 0, gts.npoints() - 1);
    const double scale = std::max({1.0, gc.lhs.cwiseAbs().maxCoeff(),
                                   gc.rhs.cwiseAbs().maxCoeff()});
    return gc.residual / scale;
  });

  // Shared trajectory for the energy, coupling, and resolvent items.
  std::optional<FundamentalTrajectory> etraj;
  auto energy_scale = [&](const FundamentalTrajectory& traj, const CMatrix& form) {
    const CMatrix f = traj.yhat.back().adjoint() * form * traj.yhat.back();
    return std::max(1.0, f.cwiseAbs().maxCoeff());
  };

  guarded("energy_forward", tol.at("energy"), [&] {
    etraj = fundamental_pair(sys, ets, lambda);
    const CMatrix form = rot.u2n * J_matrix(sys.n);
    return energy_residual_forward(sys, rot, ets, *etraj) / energy_scale(*etraj, form);
  });

  guarded("energy_adjoint", tol.at("energy"), [&] {
    if (!etraj) etraj = fundamental_pair(sys, ets, lambda);
    const CMatrix form = rot.u2n_inv * J_matrix(sys.n);
    const CMatrix f = etraj->zhat.back().adjoint() * form * etraj->zhat.back();
    const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
    return energy_residual_adjoint(sys, rot, ets, *etraj) / scale;
  });

  std::optional<WeylSolutionPair> epair;
  guarded("coupling_identities", tol.at("coupling"), [&] {
    if (!etraj) etraj = fundamental_pair(sys, ets, lambda);
    const WeylDisk disk = weyl_disk(sys, rot, ets, *etraj, ets.npoints() - 1);
    if (!disk.p_positive) {
      throw WeylError(ErrorCode::DiskUndefined, "disk undefined at the check window end");
    }
    epair = weyl_solutions(sys, ets, *etraj, disk.center);
    std::vector<CMatrix> phi_hat(etraj->yhat.size());
    for (std::size_t k = 0; k < phi_hat.size(); ++k) {
      phi_hat[k] = etraj->yhat[k].rightCols(sys.n);
    }
    const CouplingReport rep =
        coupling_residuals(ets, epair->zeta_hat, epair->psi_hat, phi_hat);
    return std::max(rep.max_psi_coupling, rep.max_phi_coupling);
  });

  guarded("disk_nesting", tol.at("nesting"), [&] {
    const FundamentalTrajectory traj = fundamental_pair(sys, ts, lambda);
    std::vector<WeylDisk> disks;
    for (double h : cfg.horizons) {
      disks.push_back(weyl_disk(sys, rot, ts, traj, ts.index_of(h)));
      if (!disks.back().p_positive) {
        throw WeylError(ErrorCode::DiskUndefined,
                        "disk undefined at horizon " + format_double(h));
      }
    }
    double defect = 0.0;
    for (std::size_t i = 0; i + 1 < disks.size(); ++i) {
      const CMatrix dp = disks[i + 1].P - disks[i].P;
      const CMatrix dr = disks[i].radius - disks[i + 1].radius;
      defect = std::max(defect, -herm_eigenvalues(dp).minCoeff() /
                                    std::max(1.0, dp.cwiseAbs().maxCoeff()));
      defect = std::max(defect, -herm_eigenvalues(dr).minCoeff() /
                                    std::max(1.0, dr.cwiseAbs().maxCoeff()));
    }
    // The limiting value must sit inside every disk whose radius still
    // exceeds the numerical noise floor of its center.
    const CMatrix m_last = disks.back().center;
    for (const WeylDisk& d : disks) {
      if (herm_eigenvalues(d.radius).minCoeff() < 1e-10) continue;
      defect = std::max(defect, -disk_contains(d, m_last).margin);
    }
    return defect;
  });

  guarded("resolvent_defects", 1.0, [&] {
    if (!etraj) etraj = fundamental_pair(sys, ets, lambda);
    if (!epair) {
      const WeylDisk disk = weyl_disk(sys, rot, ets, *etraj, ets.npoints() - 1);
      if (!disk.p_positive) {
        throw WeylError(ErrorCode::DiskUndefined, "disk undefined at the check window end");
      }
      epair = weyl_solutions(sys, ets, *etraj, disk.center);
    }
    Rng rng(cfg.seed);
    const std::vector<CVector> f = seeded_forcing(ets, 2 * sys.n, rng);
    const std::vector<CVector> g = seeded_forcing(ets, 2 * sys.n, rng);
    const ResolventSolution rf = resolve(sys, ets, *epair, *etraj, f);
    const ResolventSolution rg = adjoint_resolve(sys, ets, *epair, *etraj, g);
    const ResolventChecks cf = resolvent_checks(sys, ets, *epair, rf, f);
    const ResolventChecks cg = resolvent_checks(sys, ets, *epair, rg, g);
    const double dual = duality_gap(sys, ets, rf, rg, f, g);
    double ratio = 0.0;
    ratio = std::max(ratio, cf.bc_bottom / tol.at("bc"));
    ratio = std::max(ratio, cf.bc_boundary_form / tol.at("bc"));
    ratio = std::max(ratio, cf.interior_residual / tol.at("interior"));
    ratio = std::max(ratio, cf.max_tail_gap / tol.at("tail"));
    ratio = std::max(ratio, cf.last_tail / tol.at("tail"));
    ratio = std::max(ratio, cg.bc_bottom / tol.at("bc"));
    ratio = std::max(ratio, cg.interior_residual / tol.at("interior"));
    ratio = std::max(ratio, cg.max_tail_gap / tol.at("tail"));
    ratio = std::max(ratio, dual / tol.at("duality"));
    return ratio;
  });

  report.csv_lines.push_back("item,value,tolerance,pass");
  int failed = 0;
  for (const CheckItem& item : items) {
    if (!item.pass) ++failed;
    report.csv_lines.push_back(join_row({item.name, format_double(item.value),
                                         format_double(item.tolerance),
                                         item.pass ? "1" : "0"}));
  }
  report.exit_code = failed == 0 ? 0 : 1;
  report.summary = std::to_string(items.size() - failed) + "/" +
                   std::to_string(items.size()) + " checks passed" + report.summary;
}

// ---------------------------------------------------------------------------
// disks: per-(lambda, horizon) table of centers, radii, and definiteness.

void run_disks(const ScenarioConfig& cfg, RunReport& report, int threads) {
  const CoefficientSystem& sys = cfg.problem.sys;
  const TimeScale& ts = cfg.scale();
  const int n = sys.n;
  require_admissible(cfg);
  require_cone(cfg, cone_margins(cfg));

  std::vector<std::string> header = {"lambda_re", "lambda_im", "t"};
  push_matrix_header(header, "center", n, n);
  for (int i = 0; i < n; ++i) header.push_back("radius_eig_" + std::to_string(i));
  header.push_back("p_min_eig");
  report.csv_lines.push_back(join_row(header));

  const int nl = static_cast<int>(cfg.lambdas.size());
  std::vector<std::vector<std::string>> rows(nl);
  double worst_pmin = std::numeric_limits<double>::infinity();
  std::mutex mu;
  parallel_for(nl, threads, [&](int i) {
    const Complex lambda = cfg.lambdas[i];
    const FundamentalTrajectory traj = fundamental_pair(sys, ts, lambda);
    std::vector<std::string> local;
    double pmin = std::numeric_limits<double>::infinity();
    for (double h : cfg.horizons) {
      const WeylDisk disk = weyl_disk(sys, cfg.problem.rot, ts, traj, ts.index_of(h));
      std::vector<std::string> cells = {format_double(lambda.real()),
                                        format_double(lambda.imag()), format_double(h)};
      push_matrix_cells(cells, disk.center);
      const RVector eigs = herm_eigenvalues(disk.radius);
      for (int e = 0; e < n; ++e) cells.push_back(format_double(eigs(e)));
      cells.push_back(format_double(disk.p_min_eig));
      local.push_back(join_row(cells));
      pmin = std::min(pmin, disk.p_min_eig);
    }
    rows[i] = std::move(local);
    const std::lock_guard<std::mutex> lock(mu);
    worst_pmin = std::min(worst_pmin, pmin);
  });
  for (auto& block : rows) {
    for (auto& row : block) report.csv_lines.push_back(std::move(row));
  }
  report.summary = std::to_string(nl * cfg.horizons.size()) + " disk rows, min p eig " +
                   format_double(worst_pmin);
}

// ---------------------------------------------------------------------------
// mfun: limiting M estimates per lambda.

void run_mfun(const ScenarioConfig& cfg, RunReport& report, int threads) {
  const CoefficientSystem& sys = cfg.problem.sys;
  const TimeScale& ts = cfg.scale();
  const int n = sys.n;
  require_admissible(cfg);
  const LambdaGuard guard = cone_margins(cfg);
  require_cone(cfg, guard);

  std::vector<std::string> header = {"lambda_re", "lambda_im"};
  push_matrix_header(header, "m", n, n);
  header.push_back("cauchy_gap");
  header.push_back("delta_star");
  report.csv_lines.push_back(join_row(header));

  const int nl = static_cast<int>(cfg.lambdas.size());
  std::vector<std::string> rows(nl);
  std::atomic<double> max_gap{0.0};
  parallel_for(nl, threads, [&](int i) {
    const Complex lambda = cfg.lambdas[i];
    const MEstimate est = m_estimate(sys, cfg.problem.rot, ts, lambda, cfg.horizons);
    std::vector<std::string> cells = {format_double(lambda.real()),
                                      format_double(lambda.imag())};
    push_matrix_cells(cells, est.M);
    cells.push_back(format_double(est.cauchy_gap));
    cells.push_back(format_double(guard.margins[i]));
    rows[i] = join_row(cells);
    double seen = max_gap.load();
    while (seen < est.cauchy_gap && !max_gap.compare_exchange_weak(seen, est.cauchy_gap)) {
    }
  });
  for (auto& row : rows) report.csv_lines.push_back(std::move(row));
  report.summary =
      std::to_string(nl) + " m rows, max cauchy gap " + format_double(max_gap.load());
}

// ---------------------------------------------------------------------------
// resolve: residual/boundary/norm-slack diagnostics per lambda.

void run_resolve(const ScenarioConfig& cfg, RunReport& report, int threads) {
  const CoefficientSystem& sys = cfg.problem.sys;
  const TimeScale& ts = cfg.scale();
  require_admissible(cfg);
  const LambdaGuard guard = cone_margins(cfg);
  require_cone(cfg, guard);

  report.csv_lines.push_back(join_row(
      {"lambda_re", "lambda_im", "bc_bottom", "bc_boundary_form", "interior_residual",
       "domain_row_residual", "max_tail_gap", "last_tail", "adj_bc_bottom",
       "adj_interior_residual", "adj_max_tail_gap", "duality_gap", "delta_star", "slack",
       "literal_lhs", "literal_rhs"}));

  const int nl = static_cast<int>(cfg.lambdas.size());
  std::vector<std::string> rows(nl);
  parallel_for(nl, threads, [&](int i) {
    const Complex lambda = cfg.lambdas[i];
    const FundamentalTrajectory traj = fundamental_pair(sys, ts, lambda);
    const WeylSolutionPair pair = make_pair(cfg, traj, lambda);
    Rng rng(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(i));
    const std::vector<CVector> f = seeded_forcing(ts, 2 * sys.n, rng);
    const std::vector<CVector> g = seeded_forcing(ts, 2 * sys.n, rng);
    const ResolventSolution rf = resolve(sys, ts, pair, traj, f);
    const ResolventSolution rg = adjoint_resolve(sys, ts, pair, traj, g);
    const ResolventChecks cf = resolvent_checks(sys, ts, pair, rf, f);
    const ResolventChecks cg = resolvent_checks(sys, ts, pair, rg, g);
    const double dual = duality_gap(sys, ts, rf, rg, f, g);
    const double delta = guard.margins[i];
    const NormInequalityReport ineq =
        norm_inequality(sys, cfg.problem.rot, ts, cfg.lambda0, rf, f, delta, delta / 2.0);
    rows[i] = join_row({format_double(lambda.real()), format_double(lambda.imag()),
                        format_double(cf.bc_bottom), format_double(cf.bc_boundary_form),
                        format_double(cf.interior_residual),
                        format_double(cf.domain_row_residual),
                        format_double(cf.max_tail_gap), format_double(cf.last_tail),
                        format_double(cg.bc_bottom), format_double(cg.interior_residual),
                        format_double(cg.max_tail_gap), format_double(dual),
                        format_double(delta), format_double(ineq.slack),
                        format_double(ineq.literal_lhs), format_double(ineq.literal_rhs)});
  });
  for (auto& row : rows) report.csv_lines.push_back(std::move(row));
  report.summary = std::to_string(nl) + " resolvent rows";
}

}  // namespace

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ScenarioConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail("config", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("config", "top level must be an object");
  check_keys(root, "config",
             {"problem", "timescale", "lambda0", "xi", "lambdas", "horizons", "seed",
              "buffer", "green_horizon", "energy_horizon", "tolerances"});

  ScenarioConfig cfg;
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a_hash(text)));
  cfg.config_hash = hex;

  cfg.ts = parse_timescale(require_key(root, "config", "timescale"), "timescale");
  cfg.problem =
      parse_problem(require_key(root, "config", "problem"), "problem", *cfg.ts, &cfg.variant);
  cfg.lambda0 = parse_complex(require_key(root, "config", "lambda0"), "lambda0");

  const json& lj = require_key(root, "config", "lambdas");
  if (!lj.is_array() || lj.empty()) fail("lambdas", "expected a nonempty array");
  for (std::size_t i = 0; i < lj.size(); ++i) {
    cfg.lambdas.push_back(parse_complex(lj[i], "lambdas[" + std::to_string(i) + "]"));
  }

  const json& hj = require_key(root, "config", "horizons");
  if (!hj.is_array() || hj.empty()) fail("horizons", "expected a nonempty array");
  for (std::size_t i = 0; i < hj.size(); ++i) {
    const std::string path = "horizons[" + std::to_string(i) + "]";
    const double h = parse_real(hj[i], path);
    if (!cfg.horizons.empty() && h <= cfg.horizons.back()) {
      fail(path, "horizons must be strictly increasing");
    }
    if (h > cfg.ts->horizon() + 1e-9) fail(path, "horizon exceeds the time scale");
    try {
      cfg.ts->index_of(h);
    } catch (const WeylError&) {
      fail(path, "horizon is not a grid point");
    }
    cfg.horizons.push_back(h);
  }

  if (root.contains("xi")) {
    cfg.xi = parse_complex(root["xi"], "xi");
  } else {
    cfg.xi = cfg.lambda0 + 2.0 * (cfg.lambdas.front() - cfg.lambda0);
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer() || root["seed"].get<std::int64_t>() < 0) {
      fail("seed", "expected a nonnegative integer");
    }
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("buffer")) {
    cfg.buffer = parse_real(root["buffer"], "buffer");
    if (cfg.buffer < 0.0) fail("buffer", "buffer must be nonnegative");
  }
  if (root.contains("green_horizon")) {
    cfg.green_horizon = parse_real(root["green_horizon"], "green_horizon");
    if (cfg.green_horizon <= cfg.ts->t0() || cfg.green_horizon > cfg.ts->horizon() + 1e-9) {
      fail("green_horizon", "window must lie inside the time scale");
    }
  }
  if (root.contains("energy_horizon")) {
    cfg.energy_horizon = parse_real(root["energy_horizon"], "energy_horizon");
    if (cfg.energy_horizon <= cfg.ts->t0() ||
        cfg.energy_horizon > cfg.ts->horizon() + 1e-9) {
      fail("energy_horizon", "window must lie inside the time scale");
    }
  }

  cfg.tolerances = default_tolerances(cfg.ts->kind());
  if (root.contains("tolerances")) {
    const json& tj = root["tolerances"];
    if (!tj.is_object()) fail("tolerances", "expected an object");
    for (const auto& item : tj.items()) {
      auto it = cfg.tolerances.find(item.key());
      if (it == cfg.tolerances.end()) fail("tolerances." + item.key(), "unknown tolerance");
      it->second = parse_real(item.value(), "tolerances." + item.key());
    }
  }
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("config", "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RunReport run_command(const std::string& command, const ScenarioConfig& cfg,
                      const std::string& out_dir, int threads) {
  RunReport report;
  report.command = command;
  json summary;
  if (command == "check") {
    run_check(cfg, report);
    int failed = 0;
    for (const CheckItem& item : report.items) {
      if (!item.pass) ++failed;
    }
    summary = {{"items", report.items.size()}, {"failed", failed}};
  } else if (command == "disks") {
    run_disks(cfg, report, threads);
    summary = {{"rows", report.csv_lines.size() - 1}};
  } else if (command == "mfun") {
    run_mfun(cfg, report, threads);
    summary = {{"rows", report.csv_lines.size() - 1}};
  } else if (command == "resolve") {
    run_resolve(cfg, report, threads);
    summary = {{"rows", report.csv_lines.size() - 1}};
  } else {
    fail("command", "unknown command \"" + command + "\"");
  }
  summary["summary_line"] = report.summary;
  write_report_files(out_dir, report, manifest_json(cfg, report, summary));
  return report;
}

}  // namespace weylscale
