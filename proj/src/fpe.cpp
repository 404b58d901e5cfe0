#include "eprbound/fpe.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <random>
#include <vector>

namespace eprbound {

double bernoulli(double z) {
  // z/(e^z - 1): series near zero, expm1 elsewhere. For z >> 1 the ratio
  // underflows gracefully to 0; for z << -1 it approaches -z.
  double az = std::fabs(z);
  if (az < 1e-8) return 1.0 - 0.5 * z + z * z / 12.0;
  return z / std::expm1(z);
}

FaceField face_drift(const System& sys, const Grid& grid) {
  // Simpson average of the drift along the segment joining the two cell
  // centers. The exponential fitting is exact when the face Peclet number
  // matches the potential drop across the face; Simpson keeps that line
  // integral accurate to O(h^5) per face, so the log-density error does not
  // accumulate across steep potential tails.
  CellVectorField fc = sample_drift(sys, grid);
  FaceField f(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i) {
      Vec2 mid = sys.drift(grid.x_node(i), grid.y_center(j));
      f.fx_at(i, j) = (fc.x_at(i - 1, j) + 4.0 * mid.x + fc.x_at(i, j)) / 6.0;
    }
  for (int j = 1; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      Vec2 mid = sys.drift(grid.x_center(i), grid.y_node(j));
      f.fy_at(i, j) = (fc.y_at(i, j - 1) + 4.0 * mid.y + fc.y_at(i, j)) / 6.0;
    }
  return f;
}

namespace {

// Flux on the face between "low" and "high" cells:
//   J = (d/h) [B(-v) rho_low - B(v) rho_high],  v = F_face * h / d.
// Accumulates the two Bernoulli weights for operator assembly.
struct FaceWeights {
  double w_low, w_high;  // J = (d/h) (w_low * rho_low - w_high * rho_high)
};

FaceWeights sg_weights(double f_face, double h, double d) {
  double v = f_face * h / d;
  return {bernoulli(-v), bernoulli(v)};
}

}  // namespace

Eigen::SparseMatrix<double> assemble_operator(const System& sys, const Grid& grid) {
  const int nx = grid.nx, ny = grid.ny;
  FaceField fd = face_drift(sys, grid);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5 * grid.cells()));

  // L rho = -div J: each interior face couples its two cells with opposite
  // signs and the same 1/h factor, so columns of L sum to zero exactly.
  const double cx = sys.diffusion.d1 / (grid.hx * grid.hx);
  const double cy = sys.diffusion.d2 / (grid.hy * grid.hy);
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      FaceWeights w = sg_weights(fd.fx_at(i, j), grid.hx, sys.diffusion.d1);
      int low = grid.idx(i - 1, j), high = grid.idx(i, j);
      // -J/hx into the low cell, +J/hx into the high cell.
      trip.emplace_back(low, low, -cx * w.w_low);
      trip.emplace_back(low, high, cx * w.w_high);
      trip.emplace_back(high, low, cx * w.w_low);
      trip.emplace_back(high, high, -cx * w.w_high);
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      FaceWeights w = sg_weights(fd.fy_at(i, j), grid.hy, sys.diffusion.d2);
      int low = grid.idx(i, j - 1), high = grid.idx(i, j);
      trip.emplace_back(low, low, -cy * w.w_low);
      trip.emplace_back(low, high, cy * w.w_high);
      trip.emplace_back(high, low, cy * w.w_low);
      trip.emplace_back(high, high, -cy * w.w_high);
    }

  Eigen::SparseMatrix<double> m(grid.cells(), grid.cells());
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

double operator_inf_norm(const Eigen::SparseMatrix<double>& m) {
  std::vector<double> row_sum(static_cast<std::size_t>(m.rows()), 0.0);
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      row_sum[static_cast<std::size_t>(it.row())] += std::fabs(it.value());
  return max_abs(row_sum);
}

FaceField reconstruct_current(const ScalarField& rho, const System& sys) {
  const Grid& grid = rho.grid;
  FaceField fd = face_drift(sys, grid);
  FaceField j(grid);
  for (int jj = 0; jj < grid.ny; ++jj)
    for (int i = 1; i < grid.nx; ++i) {
      FaceWeights w = sg_weights(fd.fx_at(i, jj), grid.hx, sys.diffusion.d1);
      j.fx_at(i, jj) = sys.diffusion.d1 / grid.hx *
                       (w.w_low * rho.at(i - 1, jj) - w.w_high * rho.at(i, jj));
    }
  for (int jj = 1; jj < grid.ny; ++jj)
    for (int i = 0; i < grid.nx; ++i) {
      FaceWeights w = sg_weights(fd.fy_at(i, jj), grid.hy, sys.diffusion.d2);
      j.fy_at(i, jj) = sys.diffusion.d2 / grid.hy *
                       (w.w_low * rho.at(i, jj - 1) - w.w_high * rho.at(i, jj));
    }
  return j;
}

SteadyState solve_steady(const Eigen::SparseMatrix<double>& op, const System& sys,
                         const Grid& grid, const SolveOptions& opts) {
  const int n = grid.cells();
  const double norm_l = operator_inf_norm(op);
  const double sigma = opts.shift_factor * norm_l;
  const double tol = opts.tol_factor * norm_l;

  Eigen::SparseMatrix<double> shifted = op;
  for (int k = 0; k < n; ++k) shifted.coeffRef(k, k) += sigma;
  shifted.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success)
    throw NumericError("sparse LU factorization of the shifted operator failed");

  Eigen::VectorXd w(n);
  if (opts.seed == 0) {
    w.setOnes();
  } else {
    std::mt19937_64 gen(opts.seed);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (int k = 0; k < n; ++k) w[k] = u(gen);
  }
  w /= w.template lpNorm<Eigen::Infinity>();

  double residual = HUGE_VAL;
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    Eigen::VectorXd next = lu.solve(w);
    if (!next.allFinite())
      throw NumericError("inverse iteration produced a non-finite vector");
    double scale = next.template lpNorm<Eigen::Infinity>();
    if (next.sum() < 0.0) scale = -scale;  // keep the kernel direction positive
    next /= scale;
    w = next;
    residual = (op * w).template lpNorm<Eigen::Infinity>();
    if (residual < tol && w.minCoeff() > 0.0) break;
  }
  if (residual >= tol)
    throw NumericError("steady-state iteration did not converge: residual " +
                       std::to_string(residual) + " vs tolerance " + std::to_string(tol));

  double wmax = w.template lpNorm<Eigen::Infinity>();
  double wmin = w.minCoeff();
  if (wmin < -1e-14 * wmax)
    throw NumericError("steady-state density has negative entries beyond tolerance "
                       "(assembly bug): min/max = " + std::to_string(wmin / wmax));
  if (wmin <= 0.0)
    throw NumericError("steady-state density is not strictly positive");

  SteadyState out;
  out.rho = ScalarField(grid);
  double mass = w.sum() * grid.cell_area();
  for (int k = 0; k < n; ++k) out.rho.v[static_cast<std::size_t>(k)] = w[k] / mass;
  out.mass_prenorm = mass;
  out.iterations = iter + 1;
  out.residual_linf = (op * Eigen::Map<const Eigen::VectorXd>(out.rho.v.data(), n))
                          .template lpNorm<Eigen::Infinity>();
  out.current = reconstruct_current(out.rho, sys);
  return out;
}

SteadyState solve_steady(const System& sys, const Grid& grid, const SolveOptions& opts) {
  return solve_steady(assemble_operator(sys, grid), sys, grid, opts);
}

}  // namespace eprbound
