#include "eprbound/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eprbound {

namespace {

double checked_q(double q, double min_q) {
  if (!(q >= min_q))
    throw ConfigError("moment order q must be >= " + std::to_string(min_q));
  return q;
}

// Normalized cell weight rho_ij * hx * hy / mass, zero on masked cells.
struct Weighting {
  const ScalarField& rho;
  const Decomposition& dec;
  double scale;  // cell_area / input_mass

  double operator()(int cell) const {
    if (!dec.valid[static_cast<std::size_t>(cell)]) return 0.0;
    return rho.v[static_cast<std::size_t>(cell)] * scale;
  }
};

Weighting weighting(const Decomposition& dec, const ScalarField& rho) {
  return {rho, dec, rho.grid.cell_area() / dec.input_mass};
}

}  // namespace

Decomposition decompose(const System& sys, const SteadyState& state) {
  return decompose(sys, state.rho, state.current);
}

Decomposition decompose(const System& sys, const ScalarField& rho, const FaceField& current) {
  const Grid& g = rho.grid;
  Decomposition dec;
  dec.phi = ScalarField(g);
  dec.valid.assign(static_cast<std::size_t>(g.cells()), 1);

  double mass = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double r = rho.at(i, j);
      mass += r;
      if (!(r >= kRhoFloor)) {
        dec.valid[static_cast<std::size_t>(g.idx(i, j))] = 0;
        ++dec.masked_cells;
        dec.phi.at(i, j) = -std::log(kRhoFloor);
      } else {
        dec.phi.at(i, j) = -std::log(r);
      }
    }
  dec.input_mass = mass * g.cell_area();
  if (!(dec.input_mass > 0.0)) throw NumericError("density has no mass");
  for (int c = 0; c < g.cells(); ++c)
    if (!dec.valid[static_cast<std::size_t>(c)])
      dec.excluded_mass += rho.v[static_cast<std::size_t>(c)] * g.cell_area() / dec.input_mass;

  dec.grad_phi = gradient(dec.phi);
  dec.f_rev = CellVectorField(g);
  for (int c = 0; c < g.cells(); ++c) {
    dec.f_rev.vx[static_cast<std::size_t>(c)] =
        -sys.diffusion.d1 * dec.grad_phi.vx[static_cast<std::size_t>(c)];
    dec.f_rev.vy[static_cast<std::size_t>(c)] =
        -sys.diffusion.d2 * dec.grad_phi.vy[static_cast<std::size_t>(c)];
  }

  dec.f_irr = face_to_center(current);
  for (int c = 0; c < g.cells(); ++c) {
    if (dec.valid[static_cast<std::size_t>(c)]) {
      dec.f_irr.vx[static_cast<std::size_t>(c)] /= rho.v[static_cast<std::size_t>(c)];
      dec.f_irr.vy[static_cast<std::size_t>(c)] /= rho.v[static_cast<std::size_t>(c)];
    } else {
      dec.f_irr.vx[static_cast<std::size_t>(c)] = 0.0;
      dec.f_irr.vy[static_cast<std::size_t>(c)] = 0.0;
    }
  }
  dec.curl_f_irr = curl(dec.f_irr);
  dec.div_f_irr = divergence(dec.f_irr);
  return dec;
}

double entropy_production(const Decomposition& dec, const DiffusionMatrix& d,
                          const ScalarField& rho) {
  Weighting w = weighting(dec, rho);
  double sum = 0.0;
  for (int c = 0; c < rho.grid.cells(); ++c) {
    double fx = dec.f_irr.vx[static_cast<std::size_t>(c)];
    double fy = dec.f_irr.vy[static_cast<std::size_t>(c)];
    sum += (fx * fx / d.d1 + fy * fy / d.d2) * w(c);
  }
  return sum;
}

double vorticity_moment(const Decomposition& dec, const ScalarField& rho, double q) {
  checked_q(q, 1.0);
  Weighting w = weighting(dec, rho);
  double sum = 0.0;
  for (int c = 0; c < rho.grid.cells(); ++c)
    sum += std::pow(dec.curl_f_irr.v[static_cast<std::size_t>(c)] *
                        dec.curl_f_irr.v[static_cast<std::size_t>(c)],
                    q) *
           w(c);
  return sum;
}

LevelsetVariation levelset_variation(const Decomposition& dec, const ScalarField& rho, double q) {
  checked_q(q, 1.0);
  Weighting w = weighting(dec, rho);
  double sum = 0.0, sum_div = 0.0;
  for (int c = 0; c < rho.grid.cells(); ++c) {
    std::size_t k = static_cast<std::size_t>(c);
    double gf = dec.grad_phi.vx[k] * dec.f_irr.vx[k] + dec.grad_phi.vy[k] * dec.f_irr.vy[k];
    double dv = dec.div_f_irr.v[k];
    double wc = w(c);
    sum += std::pow(gf * gf, q) * wc;
    sum_div += std::pow(dv * dv, q) * wc;
  }
  return {sum, sum_div};
}

double misalignment(const Decomposition& dec, const ScalarField& rho, double q) {
  checked_q(q, 1.0);
  Weighting w = weighting(dec, rho);
  double sum = 0.0;
  for (int c = 0; c < rho.grid.cells(); ++c) {
    std::size_t k = static_cast<std::size_t>(c);
    double cross = dec.grad_phi.vx[k] * dec.f_irr.vy[k] - dec.grad_phi.vy[k] * dec.f_irr.vx[k];
    sum += std::pow(cross * cross, q) * w(c);
  }
  return sum;
}

HolderFactor holder_factor(const ScalarField& rho, double q) {
  if (!(q > 1.0)) throw ConfigError("holder_factor requires q > 1");
  const Grid& g = rho.grid;
  double mass = cell_integral(rho);
  if (!(mass > 0.0)) throw NumericError("density has no mass");

  // integral rho^(1/(1-q)) dx via log-sum-exp; the smallest density dominates.
  const double p = 1.0 / (1.0 - q);  // negative
  double max_e = -HUGE_VAL;
  std::vector<double> e(static_cast<std::size_t>(g.cells()));
  for (int c = 0; c < g.cells(); ++c) {
    double r = rho.v[static_cast<std::size_t>(c)] / mass;
    if (!(r > 0.0)) return {std::numeric_limits<double>::infinity(), true};
    e[static_cast<std::size_t>(c)] = p * std::log(r);
    max_e = std::fmax(max_e, e[static_cast<std::size_t>(c)]);
  }
  double s = 0.0;
  for (double ec : e) s += std::exp(ec - max_e);
  double log_integral = max_e + std::log(s) + std::log(g.cell_area());
  double log_value = log_integral * (q - 1.0) / q;
  if (log_value > std::log(std::numeric_limits<double>::max()))
    return {std::numeric_limits<double>::infinity(), true};
  return {std::exp(log_value), false};
}

StreamFunction stream_and_a(const SteadyState& state, const Decomposition& dec) {
  const Grid& g = state.rho.grid;
  const FaceField& J = state.current;
  const int nxn = g.nx + 1, nyn = g.ny + 1;
  auto nidx = [&](int i, int j) { return static_cast<std::size_t>(i + j * nxn); };

  // Node stream function from J = perp-grad(psi): d(psi)/dy = Jx on vertical
  // faces, d(psi)/dx = -Jy on horizontal faces. Column-first integration;
  // boundary faces are zero, so psi stays 0 along the whole wall.
  std::vector<double> psi_col(static_cast<std::size_t>(nxn * nyn), 0.0);
  for (int i = 0; i <= g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      psi_col[nidx(i, j + 1)] = psi_col[nidx(i, j)] + g.hy * J.fx_at(i, j);

  // Row-first integration of the same data for the path-dependence check.
  std::vector<double> psi_row(static_cast<std::size_t>(nxn * nyn), 0.0);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      psi_row[nidx(i + 1, j)] = psi_row[nidx(i, j)] - g.hx * J.fy_at(i, j);
  // Row-first rebuilds each row from the left wall; seed rows from psi_col's
  // boundary column (zero) so the two fields are directly comparable.
  double gap = 0.0;
  for (std::size_t k = 0; k < psi_col.size(); ++k)
    gap = std::fmax(gap, std::fabs(psi_col[k] - psi_row[k]));

  StreamFunction out{ScalarField(g), ScalarField(g), gap};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double p = 0.25 * (psi_col[nidx(i, j)] + psi_col[nidx(i + 1, j)] +
                         psi_col[nidx(i, j + 1)] + psi_col[nidx(i + 1, j + 1)]);
      out.psi.at(i, j) = p;
      int c = g.idx(i, j);
      out.a.at(i, j) = dec.valid[static_cast<std::size_t>(c)]
                           ? p / state.rho.v[static_cast<std::size_t>(c)]
                           : 0.0;
    }
  return out;
}

FunctionalSet compute_functionals(const System& sys, const SteadyState& state,
                                  const Decomposition& dec, const std::vector<double>& q_list) {
  FunctionalSet fs;
  fs.epr = entropy_production(dec, sys.diffusion, state.rho);
  fs.excluded_mass = dec.excluded_mass;

  std::vector<double> qs = {1.0};
  for (double q : q_list)
    if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
  for (double q : qs) {
    fs.v_q[q] = vorticity_moment(dec, state.rho, q);
    LevelsetVariation ls = levelset_variation(dec, state.rho, q);
    fs.delta_ls_q[q] = ls.value;
    fs.delta_ls_div_q[q] = ls.div_route;
    fs.delta_perp_q[q] = misalignment(dec, state.rho, q);
    if (q > 1.0) {
      HolderFactor h = holder_factor(state.rho, q);
      fs.holder_q[q] = h.value;
      if (h.overflow) fs.holder_overflow.insert(q);
    }
  }

  double mass = dec.input_mass;
  fs.sup_rho = *std::max_element(state.rho.v.begin(), state.rho.v.end()) / mass;
  fs.inf_rho = *std::min_element(state.rho.v.begin(), state.rho.v.end()) / mass;
  const Grid& g = state.rho.grid;
  double bmin = HUGE_VAL;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1)
        bmin = std::fmin(bmin, state.rho.at(i, j));
  fs.boundary_inf_rho = bmin / mass;
  return fs;
}

UnweightedIntegrals unweighted_integrals(const Decomposition& dec) {
  const Grid& g = dec.phi.grid;
  UnweightedIntegrals out{0.0, 0.0, 0.0};
  for (int c = 0; c < g.cells(); ++c) {
    std::size_t k = static_cast<std::size_t>(c);
    if (!dec.valid[k]) {
      out.excluded_area += g.cell_area();
      continue;
    }
    double cu = dec.curl_f_irr.v[k];
    double gf = dec.grad_phi.vx[k] * dec.f_irr.vx[k] + dec.grad_phi.vy[k] * dec.f_irr.vy[k];
    out.curl_sq += cu * cu * g.cell_area();
    out.ls_sq += gf * gf * g.cell_area();
  }
  return out;
}

double stationarity_identity_l2(const Decomposition& dec, const ScalarField& rho) {
  Weighting w = weighting(dec, rho);
  double sum = 0.0;
  for (int c = 0; c < rho.grid.cells(); ++c) {
    std::size_t k = static_cast<std::size_t>(c);
    double gf = dec.grad_phi.vx[k] * dec.f_irr.vx[k] + dec.grad_phi.vy[k] * dec.f_irr.vy[k];
    double r = dec.div_f_irr.v[k] - gf;
    sum += r * r * w(c);
  }
  return std::sqrt(sum);
}

}  // namespace eprbound
