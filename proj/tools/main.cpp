#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "eprbound/runner.hpp"

namespace {

using eprbound::Overrides;
using eprbound::RunConfig;

struct CommonArgs {
  std::string config_path;
  std::string grids;
  int thin = 0;
  std::string q_list;
  std::string eps_list;
  std::string radii;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string out_dir;
  bool oracle = false;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    std::string tok = text.substr(pos, next == std::string::npos ? next : next - pos);
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw eprbound::ConfigError(std::string("bad ") + what + " entry '" + tok + "'");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (out.empty()) throw eprbound::ConfigError(std::string(what) + " list is empty");
  return out;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON run configuration")->required();
  cmd->add_option("--grid", args.grids, "grid size(s) N[,N...]; last entry is the run grid");
  cmd->add_option("--q", args.q_list, "moment orders, comma separated");
  cmd->add_option("--eps", args.eps_list, "noise sweep values, descending, comma separated");
  cmd->add_option("--radii", args.radii, "locality window radii, comma separated");
  cmd->add_option("--seed", args.seed, "Monte Carlo master seed")
      ->each([&](const std::string&) { args.has_seed = true; });
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--thin", args.thin, "trajectory thinning factor (simulate)");
  cmd->add_flag("--oracle", args.oracle, "include designed-system oracle comparison");
}

RunConfig load(const CommonArgs& args) {
  Overrides ov;
  if (!args.grids.empty())
    for (double g : parse_list(args.grids, "--grid")) ov.grids.push_back(static_cast<int>(g));
  if (!args.q_list.empty()) ov.q_list = parse_list(args.q_list, "--q");
  if (!args.eps_list.empty()) ov.eps_list = parse_list(args.eps_list, "--eps");
  if (!args.radii.empty()) ov.radii = parse_list(args.radii, "--radii");
  ov.has_seed = args.has_seed;
  ov.seed = args.seed;
  ov.out_dir = args.out_dir;
  ov.thin = args.thin;
  ov.oracle = args.oracle;
  return eprbound::load_config_file(args.config_path, ov);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eprbound: steady-state dissipation bounds for confined 2-D diffusions"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* desc;
    int (*run)(const RunConfig&);
  };
  static const Sub subs[] = {
      {"solve", "solve the stationary Fokker-Planck problem", eprbound::run_solve},
      {"functionals", "drift decomposition and dissipation functionals", eprbound::run_functionals},
      {"constants", "estimate the domain constants C1 and C2", eprbound::run_constants},
      {"certify", "full bound certification report", eprbound::run_certify},
      {"sweep-eps", "low-noise sweep", eprbound::run_sweep},
      {"locality", "near-minimum locality ratio table", eprbound::run_locality},
      {"simulate", "Euler-Maruyama estimators and the bound sandwich", eprbound::run_simulate},
  };

  CommonArgs args[std::size(subs)];
  for (std::size_t k = 0; k < std::size(subs); ++k) {
    CLI::App* cmd = app.add_subcommand(subs[k].name, subs[k].desc);
    add_common(cmd, args[k]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : eprbound::kExitConfig;
  }

  try {
    for (std::size_t k = 0; k < std::size(subs); ++k)
      if (app.get_subcommand(subs[k].name)->parsed()) {
        int code = subs[k].run(load(args[k]));
        if (code == eprbound::kExitBoundViolation)
          std::cerr << "bound violation detected (holds = false)\n";
        return code;
      }
  } catch (const eprbound::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return eprbound::kExitConfig;
  } catch (const eprbound::expr::ParseError& e) {
    std::cerr << "expression error: " << e.what() << "\n";
    return eprbound::kExitConfig;
  } catch (const eprbound::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return eprbound::kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return eprbound::kExitNumeric;
  }
  return eprbound::kExitConfig;
}
