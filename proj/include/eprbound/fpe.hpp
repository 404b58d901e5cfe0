#pragma once

#include <Eigen/SparseCore>
#include <cstdint>

#include "eprbound/grid.hpp"
#include "eprbound/system.hpp"

namespace eprbound {

/// Converged stationary solution of the zero-flux Fokker-Planck boundary
/// value problem.
struct SteadyState {
  ScalarField rho;       // positive, sum(rho) * hx * hy = 1
  FaceField current;     // Scharfetter-Gummel face fluxes; boundary faces 0
  double residual_linf = 0.0;  // max |L rho| on the normalized density
  double mass_prenorm = 0.0;   // vector mass before normalization
  int iterations = 0;
};

struct SolveOptions {
  double tol_factor = 1e-11;    // residual tolerance, relative to ||L||_inf
  double shift_factor = 1e-10;  // sigma = shift_factor * ||L||_inf
  int max_iters = 200;
  std::uint64_t seed = 0;       // 0: uniform initial vector; else random positive
};

/// Bernoulli function z / (e^z - 1) of the exponential-fitting fluxes.
double bernoulli(double z);

/// Drift averaged onto faces (arithmetic mean of the two adjacent cell-center
/// samples). Boundary faces are zero and never read.
FaceField face_drift(const System& sys, const Grid& grid);

/// Sparse operator L with L*rho = discrete div[(D grad - F) rho] built from
/// Scharfetter-Gummel face fluxes; boundary faces are omitted (zero flux).
/// Column sums vanish identically (discrete conservation).
Eigen::SparseMatrix<double> assemble_operator(const System& sys, const Grid& grid);

/// Max-abs row sum of a sparse matrix.
double operator_inf_norm(const Eigen::SparseMatrix<double>& m);

/// Extracts the positive normalized kernel vector of L by shifted inverse
/// power iteration (sparse LU reused across iterations) and reconstructs the
/// invariant current from the same face fluxes.
SteadyState solve_steady(const Eigen::SparseMatrix<double>& op, const System& sys,
                         const Grid& grid, const SolveOptions& opts = {});

/// Convenience: assemble + solve.
SteadyState solve_steady(const System& sys, const Grid& grid, const SolveOptions& opts = {});

/// Scharfetter-Gummel face fluxes of a given density (boundary faces zero).
FaceField reconstruct_current(const ScalarField& rho, const System& sys);

}  // namespace eprbound
