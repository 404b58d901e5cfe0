#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "eprbound/certify.hpp"
#include "eprbound/mc.hpp"
#include "eprbound/sobolev.hpp"
#include "eprbound/system.hpp"

namespace eprbound {

/// Process exit codes shared by the CLI and the orchestration layer.
enum ExitCode : int {
  kExitOk = 0,
  kExitBoundViolation = 1,  // a certified check reported holds = false
  kExitConfig = 2,
  kExitNumeric = 3,
};

/// Command-line overrides applied on top of the JSON config.
struct Overrides {
  std::vector<int> grids;        // --grid
  std::vector<double> q_list;    // --q
  std::vector<double> eps_list;  // --eps
  std::vector<double> radii;     // --radii
  bool has_seed = false;
  std::uint64_t seed = 0;        // --seed
  std::string out_dir;           // --out
  int thin = 0;                  // --thin (0: keep config value)
  bool oracle = false;           // --oracle
};

/// Fully resolved run configuration: defaults applied, expressions parsed,
/// invariants validated.
struct RunConfig {
  nlohmann::json resolved;  // embedded in every report
  std::string config_hash;  // FNV-1a of the resolved config text
  System system;
  int grid_n = 128;
  std::vector<int> refine;           // refinement study grids (ends with grid_n)
  std::vector<int> constants_grids;  // sobolev estimation grids
  std::vector<double> q_list;
  std::vector<double> eps_list;
  std::vector<double> radii;
  SimConfig sim;
  bool sim_stationary = false;
  int density_bins = 0;  // binned-density CSV resolution, 0 = off
  std::string out_dir = "out";
  bool oracle = false;
};

/// Builds the System from the config's "system"/"domain"/"diffusion" blocks.
System build_system(const nlohmann::json& spec);

RunConfig load_config(const nlohmann::json& raw, const Overrides& ov = {});
RunConfig load_config_file(const std::string& path, const Overrides& ov = {});

// Report builders (pure: no file output).
nlohmann::json solve_report(const RunConfig& rc);
nlohmann::json functionals_report(const RunConfig& rc);
nlohmann::json constants_report(const RunConfig& rc);
nlohmann::json certify_report(const RunConfig& rc);
nlohmann::json sweep_report(const RunConfig& rc);
nlohmann::json locality_report(const RunConfig& rc);
nlohmann::json simulate_report(const RunConfig& rc);

// Subcommand entry points: run the pipeline, write outputs under
// rc.out_dir, return the process exit code.
int run_solve(const RunConfig& rc);
int run_functionals(const RunConfig& rc);
int run_constants(const RunConfig& rc);
int run_certify(const RunConfig& rc);
int run_sweep(const RunConfig& rc);
int run_locality(const RunConfig& rc);
int run_simulate(const RunConfig& rc);

}  // namespace eprbound
