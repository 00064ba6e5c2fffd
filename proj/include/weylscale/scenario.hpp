#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weylscale/problems.hpp"
#include "weylscale/resolvent.hpp"

namespace weylscale {

// A parsed and validated scenario: the problem bound to its grid, spectral
// data, and the effective tolerance table (defaults chosen by scale kind,
// overridden by the config file). Horizons must be grid points no later than
// the scale horizon; xi defaults to lambda0 + 2 (lambdas[0] - lambda0), which
// stays inside every half-plane cone containing lambdas[0].
struct ScenarioConfig {
  std::string variant;
  std::optional<TimeScale> ts;
  Problem problem;
  Complex lambda0{0.0, 0.0};
  Complex xi{0.0, 0.0};
  std::vector<Complex> lambdas;
  std::vector<double> horizons;
  std::uint64_t seed = 0;
  double buffer = 0.0;          // backward-sweep buffer; 0 selects the forward route
  double green_horizon = 0.0;   // cross-parameter identity window on dense scales
  double energy_horizon = 0.0;  // energy/coupling window on dense scales
  std::map<std::string, double> tolerances;
  std::string config_hash;

  const TimeScale& scale() const { return *ts; }
};

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config(const std::string& path);

std::uint64_t fnv1a_hash(const std::string& bytes);
// 17-significant-digit rendering; reparsing reproduces the double bit-exactly.
std::string format_double(double v);

struct CheckItem {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RunReport {
  int exit_code = 0;
  std::string command;
  std::vector<CheckItem> items;        // populated by `check`
  std::vector<std::string> csv_lines;  // emitted table, header first
  std::string csv_path;
  std::string manifest_path;
  std::string summary;
};

// command is one of check | disks | mfun | resolve. Writes <command>.csv and
// manifest.json under out_dir (created if missing) and returns the table it
// wrote. threads bounds the fan-out over independent spectral parameters;
// output order is independent of it.
RunReport run_command(const std::string& command, const ScenarioConfig& cfg,
                      const std::string& out_dir, int threads = 1);

}  // namespace weylscale
