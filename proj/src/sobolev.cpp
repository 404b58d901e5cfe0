#include "eprbound/sobolev.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "eprbound/errors.hpp"

namespace eprbound {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Unknown layout for zero-trace face fields: interior vertical faces first,
// then interior horizontal faces.
struct FaceIndex {
  int nx, ny;
  int nfx() const { return (nx - 1) * ny; }
  int nfy() const { return nx * (ny - 1); }
  int total() const { return nfx() + nfy(); }
  int ux(int ni, int j) const { return (ni - 1) + j * (nx - 1); }        // ni in [1, nx-1]
  int uy(int i, int nj) const { return nfx() + i + (nj - 1) * nx; }      // nj in [1, ny-1]
};

SpMat divergence_matrix(const Grid& g) {
  FaceIndex fi{g.nx, g.ny};
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(4 * g.cells()));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      int row = g.idx(i, j);
      if (i + 1 <= g.nx - 1) t.emplace_back(row, fi.ux(i + 1, j), 1.0 / g.hx);
      if (i >= 1) t.emplace_back(row, fi.ux(i, j), -1.0 / g.hx);
      if (j + 1 <= g.ny - 1) t.emplace_back(row, fi.uy(i, j + 1), 1.0 / g.hy);
      if (j >= 1) t.emplace_back(row, fi.uy(i, j), -1.0 / g.hy);
    }
  SpMat m(g.cells(), fi.total());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat curl_matrix(const Grid& g) {
  FaceIndex fi{g.nx, g.ny};
  const int nodes = (g.nx - 1) * (g.ny - 1);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(4 * nodes));
  for (int nj = 1; nj <= g.ny - 1; ++nj)
    for (int ni = 1; ni <= g.nx - 1; ++ni) {
      int row = (ni - 1) + (nj - 1) * (g.nx - 1);
      t.emplace_back(row, fi.uy(ni, nj), 1.0 / g.hx);
      t.emplace_back(row, fi.uy(ni - 1, nj), -1.0 / g.hx);
      t.emplace_back(row, fi.ux(ni, nj), -1.0 / g.hy);
      t.emplace_back(row, fi.ux(ni, nj - 1), 1.0 / g.hy);
    }
  SpMat m(nodes, fi.total());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat dirichlet_laplacian(const Grid& g) {
  const int mx = g.nx - 1, my = g.ny - 1;
  auto id = [&](int i, int j) { return i + j * mx; };
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(5 * mx * my));
  const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) {
      int row = id(i, j);
      t.emplace_back(row, row, 2.0 * ax + 2.0 * ay);
      if (i > 0) t.emplace_back(row, id(i - 1, j), -ax);
      if (i < mx - 1) t.emplace_back(row, id(i + 1, j), -ax);
      if (j > 0) t.emplace_back(row, id(i, j - 1), -ay);
      if (j < my - 1) t.emplace_back(row, id(i, j + 1), -ay);
    }
  SpMat m(mx * my, mx * my);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

struct EigenResult {
  double lambda;
  int iterations;
};

// Smallest eigenvalue of an SPD matrix by inverse power iteration with a
// reused Cholesky factorization; deterministic seeded start.
EigenResult smallest_eigenvalue(const SpMat& a, double rel_tol = 1e-10, int max_iters = 500,
                                std::uint64_t seed = 42) {
  Eigen::SimplicialLDLT<SpMat> solver;
  solver.compute(a);
  if (solver.info() != Eigen::Success)
    throw NumericError("Cholesky factorization failed in the eigensolver");

  const int n = static_cast<int>(a.rows());
  Eigen::VectorXd v(n);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < n; ++k) v[k] = u(gen);
  v.normalize();

  double lambda = v.dot(a * v);
  for (int iter = 1; iter <= max_iters; ++iter) {
    v = solver.solve(v);
    v.normalize();
    double next = v.dot(a * v);
    if (std::fabs(next - lambda) <= rel_tol * std::fabs(next))
      return {next, iter};
    lambda = next;
  }
  double residual = (a * v - lambda * v).norm();
  throw NumericError("inverse power iteration stagnated; eigen residual " +
                     std::to_string(residual));
}

}  // namespace

RayleighEstimate estimate_c2_detail(const Grid& grid) {
  SpMat d = divergence_matrix(grid);
  SpMat c = curl_matrix(grid);
  // Quadratic form (||div phi||^2 + ||curl phi||^2) / ||phi||^2; the uniform
  // entity weight hx*hy cancels between numerator and denominator.
  SpMat a = SpMat(d.transpose()) * d + SpMat(c.transpose()) * c;
  a.makeCompressed();
  EigenResult e = smallest_eigenvalue(a);
  if (!(e.lambda > 0.0))
    throw NumericError("curl/div quadratic form has a nullspace on a simply "
                       "connected rectangle (unexpected)");
  return {1.0 / std::sqrt(e.lambda), e.lambda, e.iterations};
}

double estimate_c2(const Grid& grid) { return estimate_c2_detail(grid).constant; }

RayleighEstimate estimate_c1_detail(const Grid& grid) {
  // Divergence-free zero-trace fields are exactly the perp-gradients of node
  // stream functions vanishing on the wall; the constrained Rayleigh quotient
  // reduces to the Dirichlet Laplacian spectrum.
  SpMat k = dirichlet_laplacian(grid);
  EigenResult e = smallest_eigenvalue(k);
  if (!(e.lambda > 0.0))
    throw NumericError("Dirichlet Laplacian is singular (unexpected)");
  return {1.0 / std::sqrt(e.lambda), e.lambda, e.iterations};
}

double estimate_c1(const Grid& grid) { return estimate_c1_detail(grid).constant; }

Extrapolation refine_and_extrapolate(std::vector<std::pair<double, double>> h_value) {
  if (h_value.size() < 3)
    throw ConfigError("refine_and_extrapolate needs at least 3 grid levels");
  std::sort(h_value.begin(), h_value.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  const std::size_t n = h_value.size();
  double v1 = h_value[n - 3].second, v2 = h_value[n - 2].second, v3 = h_value[n - 1].second;
  double h2 = h_value[n - 2].first, h3 = h_value[n - 1].first;
  double d1 = v2 - v1, d2 = v3 - v2;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (d1 == 0.0 && d2 == 0.0) return {v3, nan, true};
  if (d1 * d2 <= 0.0 || std::fabs(d2) >= std::fabs(d1))
    return {v3, nan, false};  // not a converging monotone sequence

  double ratio = h_value[n - 3].first / h2;
  double order = std::log(d1 / d2) / std::log(ratio);
  double r2 = (h2 / h3) * (h2 / h3);
  return {v3 + d2 / (r2 - 1.0), order, true};
}

DomainConstants estimate_constants(const Domain& domain, const std::vector<int>& grid_sizes) {
  if (grid_sizes.empty()) throw ConfigError("constants need at least one grid size");
  DomainConstants out;
  std::vector<std::pair<double, double>> c1_series, c2_series;
  for (int n : grid_sizes) {
    Grid g(domain, n, n);
    RayleighEstimate r1 = estimate_c1_detail(g);
    RayleighEstimate r2 = estimate_c2_detail(g);
    double h = std::max(g.hx, g.hy);
    out.grids_used.push_back({n, h, r1.constant, r2.constant, r1.lambda, r2.lambda});
    c1_series.emplace_back(h, r1.constant);
    c2_series.emplace_back(h, r2.constant);
  }
  const auto& finest = out.grids_used.back();
  out.eigen_c1 = finest.lambda_c1;
  out.eigen_c2 = finest.lambda_c2;
  if (grid_sizes.size() >= 3) {
    Extrapolation e1 = refine_and_extrapolate(c1_series);
    Extrapolation e2 = refine_and_extrapolate(c2_series);
    out.c1 = e1.value;
    out.c2 = e2.value;
    out.extrapolated = e1.monotone && e2.monotone;
    out.observed_order_c1 = e1.observed_order;
    out.observed_order_c2 = e2.observed_order;
  } else {
    out.c1 = finest.c1;
    out.c2 = finest.c2;
  }
  if (!(out.c1 <= out.c2 * (1.0 + 1e-9)))
    throw NumericError("estimated constants violate c1 <= c2");
  return out;
}

double face_l2_norm(const FaceField& f) {
  double s = 0.0;
  for (double v : f.fx) s += v * v;
  for (double v : f.fy) s += v * v;
  return std::sqrt(s * f.grid.cell_area());
}

double face_div_l2_norm(const FaceField& f) {
  ScalarField d = face_divergence(f);
  double s = 0.0;
  for (double v : d.v) s += v * v;
  return std::sqrt(s * f.grid.cell_area());
}

double face_curl_l2_norm(const FaceField& f) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (int nj = 1; nj <= g.ny - 1; ++nj)
    for (int ni = 1; ni <= g.nx - 1; ++ni) {
      double c = (f.fy_at(ni, nj) - f.fy_at(ni - 1, nj)) / g.hx -
                 (f.fx_at(ni, nj) - f.fx_at(ni, nj - 1)) / g.hy;
      s += c * c;
    }
  return std::sqrt(s * g.cell_area());
}

FaceField random_zero_trace_field(const Grid& grid, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  FaceField f(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i <= grid.nx - 1; ++i) f.fx_at(i, j) = n01(gen);
  for (int j = 1; j <= grid.ny - 1; ++j)
    for (int i = 0; i < grid.nx; ++i) f.fy_at(i, j) = n01(gen);
  return f;
}

FaceField random_divergence_free_field(const Grid& grid, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  // psi on interior nodes, zero on the wall; field = (d(psi)/dy, -d(psi)/dx).
  std::vector<double> psi(static_cast<std::size_t>((grid.nx + 1) * (grid.ny + 1)), 0.0);
  auto nidx = [&](int i, int j) { return static_cast<std::size_t>(i + j * (grid.nx + 1)); };
  for (int j = 1; j <= grid.ny - 1; ++j)
    for (int i = 1; i <= grid.nx - 1; ++i) psi[nidx(i, j)] = n01(gen);
  FaceField f(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i <= grid.nx - 1; ++i)
      f.fx_at(i, j) = (psi[nidx(i, j + 1)] - psi[nidx(i, j)]) / grid.hy;
  for (int j = 1; j <= grid.ny - 1; ++j)
    for (int i = 0; i < grid.nx; ++i)
      f.fy_at(i, j) = -(psi[nidx(i + 1, j)] - psi[nidx(i, j)]) / grid.hx;
  return f;
}

}  // namespace eprbound
