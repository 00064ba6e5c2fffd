#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "weylscale/scenario.hpp"

namespace {

struct Options {
  std::string config;
  std::string out_dir = "weylscale_out";
  std::int64_t seed = -1;  // -1 keeps the config's seed
  int threads = 1;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "scenario config file (JSON)")->required();
  cmd->add_option("--out", opt.out_dir, "output directory for CSV and manifest");
  cmd->add_option("--seed", opt.seed, "override the config seed");
  cmd->add_option("--threads", opt.threads, "worker threads over spectral parameters")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weyl disk and resolvent diagnostics for Hamiltonian systems on "
               "Sturmian time scales"};
  app.require_subcommand(1);
  Options opt;
  std::string command;
  for (const char* name : {"check", "disks", "mfun", "resolve"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " command");
    add_common(sub, opt);
    sub->callback([&command, name] { command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help requests keep exit 0; every other command-line problem is a config error.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    weylscale::ScenarioConfig cfg = weylscale::parse_config(opt.config);
    if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
    const weylscale::RunReport report =
        weylscale::run_command(command, cfg, opt.out_dir, opt.threads);
    for (const weylscale::CheckItem& item : report.items) {
      std::cout << (item.pass ? "PASS " : "FAIL ") << item.name
                << "  value=" << weylscale::format_double(item.value)
                << "  tol=" << weylscale::format_double(item.tolerance) << "\n";
    }
    std::cout << command << ": " << report.summary << "\n";
    std::cout << "wrote " << report.csv_path << " and " << report.manifest_path << "\n";
    return report.exit_code;
  } catch (const weylscale::WeylError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == weylscale::ErrorCode::ConfigError ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
