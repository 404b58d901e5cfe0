#include "eprbound/certify.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "eprbound/fpe.hpp"

namespace eprbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHoldsSlack = 1e-9;

void finalize(BoundCheck& b) {
  b.margin = b.lhs == 0.0 ? kInf : b.rhs / b.lhs;
  b.holds = b.lhs <= b.rhs * (1.0 + kHoldsSlack) || b.rhs == kInf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

BoundCheck check_theorem1(const FunctionalSet& fs, double c2, double lambda_min) {
  if (!(c2 > 0.0) || !(lambda_min > 0.0))
    throw ConfigError("theorem 1 check needs positive c2 and lambda_min");
  double v = fs.v_q.at(1.0);
  double ls = fs.delta_ls_q.at(1.0);
  double perp = fs.delta_perp_q.at(1.0);
  BoundCheck b;
  b.name = "theorem1";
  b.lhs = fs.epr;
  b.constant_used = 4.0 * c2 * c2 / lambda_min;
  b.constant_note = "4*C2^2/lambda_min (C2=" + fmt(c2) + "), squared trace inequality "
                    "plus triangle inequality on both remainder terms";
  b.rhs = b.constant_used * (v + 0.25 * (ls + perp));
  // Proof-exact composition: the divergence of F_irr sqrt(rho) is exactly
  // (1/2) sqrt(rho) grad(phi).F_irr, so only the curl term pays a factor 2.
  b.rhs_tight = 2.0 * c2 * c2 / lambda_min * (2.0 * v + 0.5 * perp + 0.25 * ls);
  finalize(b);
  return b;
}

BoundCheck check_theorem2(const FunctionalSet& fs, double c2, double lambda_min, double q) {
  if (!(q > 1.0)) throw ConfigError("theorem 2 requires q > 1");
  if (!fs.v_q.count(q) || !fs.holder_q.count(q))
    throw ConfigError("functional set is missing the q = " + fmt(q) + " moments");
  if (!(fs.boundary_inf_rho > 0.0))
    throw ConfigError("theorem 2 requires rho > 0 on the boundary cells");
  BoundCheck b;
  b.name = "theorem2_q" + fmt(q);
  b.lhs = fs.epr;
  double holder = fs.holder_q.at(q);
  b.constant_used = 2.0 * c2 * c2 / lambda_min * fs.sup_rho * holder;
  b.constant_note = "2*C2^2*sup(rho)*holder_q/lambda_min (C2=" + fmt(c2) +
                    ", holder=" + fmt(holder) + ")";
  if (fs.holder_overflow.count(q)) {
    b.rhs = kInf;
    b.vacuous = true;
  } else {
    b.rhs = b.constant_used *
            (std::pow(fs.v_q.at(q), 1.0 / q) + std::pow(fs.delta_ls_q.at(q), 1.0 / q));
  }
  finalize(b);
  return b;
}

std::pair<BoundCheck, BoundCheck> check_corollary_bounds(const FunctionalSet& fs,
                                                         const Decomposition& dec, double c2,
                                                         double lambda_min) {
  if (!(fs.boundary_inf_rho > 0.0))
    throw ConfigError("corollary bounds require rho > 0 on the boundary cells");
  UnweightedIntegrals ui = unweighted_integrals(dec);

  BoundCheck b1;
  b1.name = "corollary_unweighted";
  b1.lhs = fs.epr;
  b1.constant_used = 2.0 * c2 * c2 / lambda_min * fs.sup_rho;
  b1.constant_note = "2*C2^2*sup(rho)/lambda_min (C2=" + fmt(c2) + "), unweighted integrals";
  if (ui.excluded_area > 0.0)
    b1.constant_note += "; masked area " + fmt(ui.excluded_area) + " excluded";
  b1.rhs = b1.constant_used * (ui.curl_sq + ui.ls_sq);
  finalize(b1);

  BoundCheck b2;
  b2.name = "corollary_supinf";
  b2.lhs = fs.epr;
  if (fs.inf_rho > 0.0 && dec.all_valid()) {
    b2.constant_used = 2.0 * c2 * c2 / lambda_min * fs.sup_rho / fs.inf_rho;
    b2.constant_note = "2*C2^2*sup(rho)/(inf(rho)*lambda_min) (C2=" + fmt(c2) + ")";
    b2.rhs = b2.constant_used * (fs.v_q.at(1.0) + fs.delta_ls_q.at(1.0));
  } else {
    b2.constant_used = kInf;
    b2.constant_note = "inf(rho) = 0 on the grid; right-hand side is infinite";
    b2.rhs = kInf;
    b2.vacuous = true;
  }
  finalize(b2);
  return {b1, b2};
}

IsotropyIdentity isotropic_identity_check(const System& sys, const SteadyState& state,
                                          const Decomposition& dec) {
  const Grid& g = state.rho.grid;
  IsotropyIdentity out;
  double mass = dec.input_mass;
  double sum_full = 0.0, sum_alg = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t k = static_cast<std::size_t>(g.idx(i, j));
      if (!dec.valid[k]) continue;
      Vec2 f = sys.drift(g.x_center(i), g.y_center(j));
      double gx = dec.grad_phi.vx[k], gy = dec.grad_phi.vy[k];
      double cross_full = gx * f.y - gy * f.x;
      // Algebraic irreversible part on the same discrete gradient.
      double ax = f.x + sys.diffusion.d1 * gx;
      double ay = f.y + sys.diffusion.d2 * gy;
      double cross_alg = gx * ay - gy * ax;
      out.max_gap = std::fmax(out.max_gap, std::fabs(cross_full - cross_alg));
      out.max_cross = std::fmax(out.max_cross, std::fabs(cross_full));
      double w = state.rho.v[k] * g.cell_area() / mass;
      sum_full += cross_full * cross_full * w;
      sum_alg += cross_alg * cross_alg * w;
    }
  out.delta_perp_full_drift = sum_full;
  out.delta_perp_algebraic = sum_alg;
  return out;
}

SweepResult fw_sweep(const System& sys, const std::vector<double>& eps_list, int grid_n,
                     double c2) {
  if (eps_list.empty()) throw ConfigError("eps list is empty");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (eps_list[k] < 0.1)
      throw ConfigError("eps below the solver conditioning floor 0.1");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
      throw ConfigError("eps list must be strictly descending");
  }
  double lmax = sys.diffusion.lambda_max();
  DiffusionMatrix dhat{sys.diffusion.d1 / lmax, sys.diffusion.d2 / lmax};

  SweepResult out;
  Grid grid(sys.domain, grid_n, grid_n);
  for (double eps : eps_list) {
    System sys_eps = sys.with_diffusion({eps * dhat.d1, eps * dhat.d2});
    SweepRecord rec;
    rec.eps = eps;
    try {
      SteadyState state = solve_steady(sys_eps, grid);
      Decomposition dec = decompose(sys_eps, state);
      rec.epr = entropy_production(dec, sys_eps.diffusion, state.rho);
      rec.v = vorticity_moment(dec, state.rho, 1.0);
      rec.delta_ls = levelset_variation(dec, state.rho, 1.0).value;
      rec.delta_perp = misalignment(dec, state.rho, 1.0);
      rec.ratio_ls_perp = rec.delta_perp > 0.0 ? rec.delta_ls / rec.delta_perp : kInf;
      rec.fw_rhs = 4.0 * c2 * c2 * rec.delta_perp;
      rec.epr_within_bound = rec.epr <= rec.fw_rhs * (1.0 + kHoldsSlack);
      if (dhat.isotropic()) {
        rec.isotropic = true;
        IsotropyIdentity iso = isotropic_identity_check(sys_eps, state, dec);
        rec.delta_perp_full_drift = iso.delta_perp_full_drift;
        rec.isotropy_gap_rel = iso.max_cross > 0.0 ? iso.max_gap / iso.max_cross : 0.0;
      }
    } catch (const NumericError& err) {
      out.truncated = true;
      out.truncation_error = "eps = " + fmt(eps) + ": " + err.what();
      break;
    }
    out.records.push_back(rec);
  }
  if (out.records.empty())
    throw NumericError("sweep failed at the first eps: " + out.truncation_error);
  return out;
}

LocalityTable parabolic_locality(const System& sys, const SteadyState& state,
                                 const Decomposition& dec, const std::vector<double>& radii) {
  (void)sys;
  if (radii.empty()) throw ConfigError("locality needs at least one radius");
  const Grid& g = state.rho.grid;

  // Window center: cell minimizing phi (ties broken by scan order).
  int ci = 0, cj = 0;
  double best = kInf;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (dec.valid[static_cast<std::size_t>(g.idx(i, j))] && dec.phi.at(i, j) < best) {
        best = dec.phi.at(i, j);
        ci = i;
        cj = j;
      }
  LocalityTable out;
  out.center = {g.x_center(ci), g.y_center(cj)};

  double r_min = radii[0];
  for (double r : radii) r_min = std::fmin(r_min, r);

  // K: mean 5-point Laplacian of phi over the smallest window (interior
  // cells only; the minimum sits in the bulk for any confining potential).
  double k_sum = 0.0;
  int k_count = 0;
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      if (std::fabs(g.x_center(i) - out.center.x) > r_min ||
          std::fabs(g.y_center(j) - out.center.y) > r_min)
        continue;
      double lap = (dec.phi.at(i + 1, j) - 2.0 * dec.phi.at(i, j) + dec.phi.at(i - 1, j)) /
                       (g.hx * g.hx) +
                   (dec.phi.at(i, j + 1) - 2.0 * dec.phi.at(i, j) + dec.phi.at(i, j - 1)) /
                       (g.hy * g.hy);
      k_sum += lap;
      ++k_count;
    }
  if (k_count == 0) throw NumericError("smallest locality window contains no interior cells");
  out.k_curvature = k_sum / k_count;

  for (double r : radii) {
    LocalityRow row;
    row.radius = r;
    row.diam = 2.0 * r;
    double num = 0.0, curl_sq = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        if (std::fabs(g.x_center(i) - out.center.x) > r ||
            std::fabs(g.y_center(j) - out.center.y) > r)
          continue;
        std::size_t k = static_cast<std::size_t>(g.idx(i, j));
        if (!dec.valid[k]) continue;
        ++row.cells;
        double gf = dec.grad_phi.vx[k] * dec.f_irr.vx[k] + dec.grad_phi.vy[k] * dec.f_irr.vy[k];
        num += gf * gf * g.cell_area();
        curl_sq += dec.curl_f_irr.v[k] * dec.curl_f_irr.v[k] * g.cell_area();
      }
    row.numerator = num;
    row.denominator = out.k_curvature * row.diam * row.diam * curl_sq;
    row.in_regime = out.k_curvature > 0.0 && row.diam * std::sqrt(out.k_curvature) < 1.0;
    if (row.denominator < 1e-14) {
      row.defined = false;
      row.ratio = 0.0;
    } else {
      row.ratio = num / row.denominator;
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace eprbound
