#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "eprbound/functionals.hpp"
#include "eprbound/grid.hpp"
#include "eprbound/system.hpp"

namespace eprbound {

/// Euler-Maruyama ensemble configuration. Paths are seeded independently of
/// execution order: path k uses SplitMix64-mixed (master_seed, k) feeding an
/// mt19937_64 stream with fixed Box-Muller normals, so results are bitwise
/// reproducible across runs and thread counts.
struct SimConfig {
  double dt = 1e-3;
  double t_max = 200.0;
  int n_paths = 32;
  std::uint64_t master_seed = 1;
  Vec2 initial_point{0.0, 0.0};
  bool stationary_initial = false;  // sample x0 from initial_density instead
  std::shared_ptr<const ScalarField> initial_density;
  int thin = 1000;           // store every thin-th state
  double t_window_hint = 20.0;  // default TUR window carried from the config
};

struct PathSummary {
  std::uint64_t seed = 0;
  long n_steps = 0;
  long n_reflections = 0;
  double sum_x = 0.0, sum_y = 0.0;    // over post-step states
  double sum_xx = 0.0, sum_yy = 0.0;
  Vec2 final_state;
  std::vector<Vec2> thinned;
};

/// Trajectory ensemble: thinned states plus per-path accumulators. Carries
/// the system and config so estimators can replay paths exactly.
struct Ensemble {
  System sys;
  SimConfig cfg;
  long steps_per_path = 0;
  std::vector<PathSummary> paths;
};

struct EstimatorResult {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  long skipped = 0;  // increments dropped in masked cells
};

/// Runs the ensemble (reflecting walls, coordinate-wise mirror). Throws if
/// the drift-step stability guard dt * max|F| <= 0.1 * min(side) fails.
Ensemble simulate(const System& sys, const SimConfig& cfg);

/// Stationary Girsanov entropy-production estimator: time average of
/// F_irr(x_mid) . D^-1 dx with midpoint evaluation, F_irr interpolated
/// bilinearly from the decomposition; mean +- path-to-path standard error.
EstimatorResult epr_estimator(const Ensemble& ens, const Decomposition& dec,
                              const DiffusionMatrix& d);

/// TUR lower bound 2 mean(J_w)^2 / (T_w var(J_w)) from windowed currents
/// J_w = sum w(x_mid) . dx; jackknife standard error over windows.
EstimatorResult tur_lower_bound(const Ensemble& ens, const CellVectorField& weight,
                                double t_window);

/// Histogram of the thinned states, normalized to a density.
ScalarField binned_density(const Ensemble& ens, int nx, int ny);

/// Worker-thread cap from the EPR_THREADS environment variable (>= 1).
int thread_budget();

}  // namespace eprbound
