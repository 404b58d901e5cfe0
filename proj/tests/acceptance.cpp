// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Heavier grids than the unit tests; everything is deterministic (fixed
// seeds, direct solvers), so a green run stays green.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "eprbound/certify.hpp"
#include "eprbound/fpe.hpp"
#include "eprbound/mc.hpp"
#include "eprbound/sobolev.hpp"

using namespace eprbound;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Solved {
  System sys;
  Grid grid{Domain{0, 1, 0, 1}, 8, 8};
  SteadyState state;
  Decomposition dec;
};

Solved solve(const System& sys, int n) {
  Solved s{sys};
  s.grid = Grid(sys.domain, n, n);
  s.state = solve_steady(sys, s.grid);
  s.dec = decompose(sys, s.state);
  return s;
}

bool within(double value, double target, double rel) {
  return std::fabs(value - target) <= rel * std::fabs(target);
}

// --- criterion 1: solver oracle on designed-dw ---------------------------
void criterion1(const std::vector<Solved>& dw_levels, double t_solve_256) {
  std::vector<double> errs;
  for (const Solved& s : dw_levels) {
    DesignedGroundTruth gt = designed_ground_truth(s.sys, s.grid);
    double max_err = 0.0, sup = 0.0;
    for (std::size_t k = 0; k < gt.rho.v.size(); ++k) {
      max_err = std::fmax(max_err, std::fabs(s.state.rho.v[k] - gt.rho.v[k]));
      sup = std::fmax(sup, gt.rho.v[k]);
    }
    errs.push_back(max_err / sup);
  }
  double order1 = std::log2(errs[0] / errs[1]);
  double order2 = std::log2(errs[1] / errs[2]);
  bool pass = errs[1] <= 1e-3 && order1 >= 1.8 && order2 >= 1.8 && t_solve_256 <= 60.0;
  report(1, pass,
         fmt("designed-dw Linf rel err %.2e @128 (tol 1e-3); orders %.2f, %.2f (tol 1.8); "
             "256^2 solve %.1fs (tol 60s)",
             errs[1], order1, order2, t_solve_256));
}

// --- criterion 2: analytic functionals on rot-ou -------------------------
void criterion2(const Solved& ou) {
  FunctionalSet fs = compute_functionals(ou.sys, ou.state, ou.dec, {});
  StreamFunction sf = stream_and_a(ou.state, ou.dec);
  double worst_a = 0.0;
  for (int j = 0; j < ou.grid.ny; ++j)
    for (int i = 0; i < ou.grid.nx; ++i)
      if (std::hypot(ou.grid.x_center(i), ou.grid.y_center(j)) <= 3.0)
        worst_a = std::fmax(worst_a, std::fabs(sf.a.at(i, j) - 1.0));
  bool pass = within(fs.epr, 2.0, 0.02) && within(fs.v_q.at(1.0), 4.0, 0.02) &&
              within(fs.delta_perp_q.at(1.0), 8.0, 0.02) &&
              fs.delta_ls_q.at(1.0) <= 1e-3 * fs.delta_perp_q.at(1.0) && worst_a <= 0.02;
  report(2, pass,
         fmt("epr %.4f (2 +- 2%%), V %.4f (4 +- 2%%), dperp %.4f (8 +- 2%%), "
             "dls/dperp %.1e (tol 1e-3), max|a-1| %.4f on |x|<=3 (tol 0.02)",
             fs.epr, fs.v_q.at(1.0), fs.delta_perp_q.at(1.0),
             fs.delta_ls_q.at(1.0) / fs.delta_perp_q.at(1.0), worst_a));
}

// --- criterion 3: domain constants ----------------------------------------
void criterion3() {
  const std::vector<int> grids = {32, 64, 128};
  DomainConstants unit = estimate_constants(Domain{0, 1, 0, 1}, grids);
  DomainConstants twice = estimate_constants(Domain{0, 2, 0, 2}, grids);
  double c2_ref = 1.0 / M_PI;
  double c1_ref = 1.0 / (std::sqrt(2.0) * M_PI);
  double scale2 = twice.c2 / unit.c2, scale1 = twice.c1 / unit.c1;
  bool pass = within(unit.c2, c2_ref, 0.02) && within(unit.c1, c1_ref, 0.02) &&
              within(scale2, 2.0, 0.02) && within(scale1, 2.0, 0.02) && unit.extrapolated;
  report(3, pass,
         fmt("unit square C2 %.6f (1/pi %.6f +- 2%%), C1 %.6f (%.6f +- 2%%); "
             "side-2 scaling %.4f, %.4f (2 +- 2%%)",
             unit.c2, c2_ref, unit.c1, c1_ref, scale2, scale1));
}

// --- criterion 4: certification suite -------------------------------------
void criterion4(const std::vector<Solved>& systems,
                const DomainConstants& dc_big, const DomainConstants& dc_small) {
  bool all_hold = true;
  bool tight_ok = true;
  std::string notes;
  for (const Solved& s : systems) {
    FunctionalSet fs = compute_functionals(s.sys, s.state, s.dec, {1.5, 2.0, 3.0});
    double c2 = s.sys.domain.width() > 5.0 ? dc_big.c2 : dc_small.c2;
    double lmin = s.sys.diffusion.lambda_min();
    BoundCheck t1 = check_theorem1(fs, c2, lmin);
    all_hold = all_hold && t1.holds;
    tight_ok = tight_ok && t1.rhs_tight <= t1.rhs * (1.0 + 1e-12);
    for (double q : {1.5, 2.0, 3.0}) all_hold = all_hold && check_theorem2(fs, c2, lmin, q).holds;
    auto [b1, b2] = check_corollary_bounds(fs, s.dec, c2, lmin);
    all_hold = all_hold && b1.holds && b2.holds;
    notes += fmt("%s margin %.3g; ", s.sys.name.c_str(), t1.margin);
  }
  report(4, all_hold && tight_ok,
         fmt("theorem1/theorem2(q=1.5,2,3)/corollaries hold on all 4 systems: %s; "
             "tight <= loose: %s",
             all_hold ? "yes" : "NO", tight_ok ? "yes" : "NO") + "  [" + notes + "]");
}

// --- criterion 5: low-noise sweep -----------------------------------------
void criterion5(const DomainConstants& dc_big, const DomainConstants& dc_small) {
  auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> eps = {1.0, 0.5, 0.25, 0.125};
  SweepResult ou = fw_sweep(make_rot_ou(), eps, 256, dc_big.c2);
  SweepResult nl = fw_sweep(make_nl_rot(), eps, 256, dc_small.c2);
  double elapsed = seconds_since(t0);

  bool ou_flat = ou.records.size() == 4;
  for (const auto& r : ou.records)
    ou_flat = ou_flat && within(r.epr, 2.0, 0.03) && within(r.delta_perp, 8.0, 0.03);
  bool nl_monotone = nl.records.size() == 4;
  for (std::size_t k = 1; k < nl.records.size(); ++k)
    nl_monotone = nl_monotone && nl.records[k].ratio_ls_perp < nl.records[k - 1].ratio_ls_perp;
  bool nl_bound = true;
  for (const auto& r : nl.records) nl_bound = nl_bound && r.epr_within_bound;

  report(5, ou_flat && nl_monotone && nl_bound && elapsed <= 600.0,
         fmt("rot-ou epr/dperp flat within 3%%: %s; nl-rot ratio decreasing: %s "
             "(%.2e -> %.2e); bound holds: %s; runtime %.0fs (tol 600s)",
             ou_flat ? "yes" : "NO", nl_monotone ? "yes" : "NO",
             nl.records.front().ratio_ls_perp, nl.records.back().ratio_ls_perp,
             nl_bound ? "yes" : "NO", elapsed));
}

// --- criterion 6: parabolic locality --------------------------------------
void criterion6(const Solved& dw256, const Solved& ou) {
  const std::vector<double> radii = {0.5, 0.25, 0.125};
  LocalityTable dw = parabolic_locality(dw256.sys, dw256.state, dw256.dec, radii);
  bool bounded = true, monotone = true;
  double prev = 1e300;
  for (const auto& row : dw.rows) {
    bounded = bounded && row.defined && row.ratio <= 10.0;
    monotone = monotone && row.ratio <= prev * (1.0 + 1e-9);
    prev = row.ratio;
  }
  LocalityTable our = parabolic_locality(ou.sys, ou.state, ou.dec, radii);
  bool ou_zero = true;
  for (const auto& row : our.rows) ou_zero = ou_zero && row.ratio <= 1e-4;

  report(6, bounded && monotone && ou_zero,
         fmt("designed-dw ratios {%.2e, %.2e, %.2e} <= 10 and non-increasing: %s; "
             "rot-ou ratio <= 1e-4: %s",
             dw.rows[0].ratio, dw.rows[1].ratio, dw.rows[2].ratio,
             (bounded && monotone) ? "yes" : "NO", ou_zero ? "yes" : "NO"));
}

// --- criterion 7: Monte Carlo sandwich -------------------------------------
void criterion7(const Solved& ou128, const Solved& ou256, const Solved& dw_coarse,
                const Solved& dw_fine, const DomainConstants& dc_big,
                const DomainConstants& dc_small) {
  bool pass = true;
  std::string notes;

  struct Case {
    const Solved* coarse;
    const Solved* fine;
    double c2;
    double t_max;
    int paths;
  };
  const Case cases[] = {{&ou128, &ou256, dc_big.c2, 1500.0, 48},
                        {&dw_coarse, &dw_fine, dc_small.c2, 1200.0, 48}};
  for (const Case& c : cases) {
    const Solved& s = *c.fine;
    FunctionalSet fs = compute_functionals(s.sys, s.state, s.dec, {});
    double epr_quad = fs.epr;
    // Quadrature error proxy from the two grid levels.
    FunctionalSet fs_coarse =
        compute_functionals(c.coarse->sys, c.coarse->state, c.coarse->dec, {});
    double quad_err = std::fabs(epr_quad - fs_coarse.epr);
    BoundCheck t1 = check_theorem1(fs, c.c2, s.sys.diffusion.lambda_min());

    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = c.t_max;
    cfg.n_paths = c.paths;
    cfg.master_seed = 20260810;
    cfg.stationary_initial = true;
    cfg.initial_density = std::make_shared<ScalarField>(s.state.rho);
    Ensemble ens = simulate(s.sys, cfg);
    EstimatorResult mc = epr_estimator(ens, s.dec, s.sys.diffusion);
    EstimatorResult tur = tur_lower_bound(ens, s.dec.f_irr, 50.0);

    double combined = std::sqrt(mc.std_error * mc.std_error + quad_err * quad_err);
    bool sandwich = tur.value <= mc.value + 3.0 * (tur.std_error + mc.std_error) &&
                    mc.value <= t1.rhs;
    bool agrees = std::fabs(mc.value - epr_quad) <= 3.0 * combined;
    pass = pass && sandwich && agrees;
    notes += fmt("%s: tur %.3f <= mc %.4f+-%.4f ~ quad %.4f <= rhs %.3g (|diff| %.4f vs 3se "
                 "%.4f); ",
                 s.sys.name.c_str(), tur.value, mc.value, mc.std_error, epr_quad, t1.rhs,
                 std::fabs(mc.value - epr_quad), 3.0 * combined);
  }

  // Bitwise reproducibility across thread counts on a short ensemble.
  SimConfig rep;
  rep.dt = 1e-3;
  rep.t_max = 25.0;
  rep.n_paths = 8;
  rep.master_seed = 99;
  rep.stationary_initial = true;
  rep.initial_density = std::make_shared<ScalarField>(ou128.state.rho);
  setenv("EPR_THREADS", "1", 1);
  Ensemble e1 = simulate(ou128.sys, rep);
  EstimatorResult m1 = epr_estimator(e1, ou128.dec, ou128.sys.diffusion);
  setenv("EPR_THREADS", "4", 1);
  Ensemble e4 = simulate(ou128.sys, rep);
  EstimatorResult m4 = epr_estimator(e4, ou128.dec, ou128.sys.diffusion);
  unsetenv("EPR_THREADS");
  bool bitwise = m1.value == m4.value && m1.std_error == m4.std_error;
  for (std::size_t p = 0; p < e1.paths.size(); ++p)
    bitwise = bitwise && e1.paths[p].sum_xx == e4.paths[p].sum_xx &&
              e1.paths[p].final_state.x == e4.paths[p].final_state.x;
  pass = pass && bitwise;
  notes += fmt("bitwise across threads: %s", bitwise ? "yes" : "NO");
  report(7, pass, notes);
}

// --- criterion 8: property suites ------------------------------------------
void criterion8(const std::vector<Solved>& systems, const std::vector<Solved>& dw_levels,
                const Solved& ou256) {
  // Conservation and positivity on every catalog system.
  bool conserve = true, positive = true;
  for (const Solved& s : systems) {
    ScalarField div = face_divergence(s.state.current);
    double total = 0.0;
    for (double v : div.v) total += v;
    conserve = conserve && std::fabs(total * s.grid.cell_area()) <= 1e-12;
    double mn = 1e300;
    for (double v : s.state.rho.v) mn = std::fmin(mn, v);
    positive = positive && mn > 0.0;
  }

  // Stationarity identity order >= 1.8 on the designed-dw refinement.
  std::vector<double> ids;
  for (const Solved& s : dw_levels) ids.push_back(stationarity_identity_l2(s.dec, s.state.rho));
  double ord1 = std::log2(ids[0] / ids[1]);
  double ord2 = std::log2(ids[1] / ids[2]);
  bool identity = ord1 >= 1.8 && ord2 >= 1.8;

  // Non-negativity of all functionals everywhere.
  bool nonneg = true;
  for (const Solved& s : systems) {
    FunctionalSet fs = compute_functionals(s.sys, s.state, s.dec, {1.5, 2.0, 3.0});
    nonneg = nonneg && fs.epr >= 0.0;
    for (const auto& [q, v] : fs.v_q) nonneg = nonneg && v >= 0.0;
    for (const auto& [q, v] : fs.delta_ls_q) nonneg = nonneg && v >= 0.0;
    for (const auto& [q, v] : fs.delta_perp_q) nonneg = nonneg && v >= 0.0;
  }

  // Discrete trace inequalities over 100 random zero-trace fields, 5% slack,
  // against the extrapolated constants.
  DomainConstants dc = estimate_constants(Domain{0, 1, 0, 1}, {16, 32, 64});
  Grid g(Domain{0, 1, 0, 1}, 64, 64);
  bool ineq = true;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    FaceField any = random_zero_trace_field(g, seed);
    ineq = ineq && face_l2_norm(any) <=
                       dc.c2 * (face_curl_l2_norm(any) + face_div_l2_norm(any)) * 1.05;
    FaceField sol = random_divergence_free_field(g, seed + 500);
    ineq = ineq && face_l2_norm(sol) <= dc.c1 * face_curl_l2_norm(sol) * 1.05;
  }

  // Isotropic-diffusion identity on rot-ou.
  IsotropyIdentity iso = isotropic_identity_check(ou256.sys, ou256.state, ou256.dec);
  bool isotropic = iso.max_gap <= 1e-10 * iso.max_cross;

  report(8, conserve && positive && identity && nonneg && ineq && isotropic,
         fmt("conservation<=1e-12: %s; positivity: %s; stationarity orders %.2f, %.2f: %s; "
             "non-negativity: %s; 100 random-field inequalities (5%% slack): %s; "
             "isotropic identity gap %.1e <= 1e-10: %s",
             conserve ? "yes" : "NO", positive ? "yes" : "NO", ord1, ord2,
             identity ? "yes" : "NO", nonneg ? "yes" : "NO", ineq ? "yes" : "NO",
             iso.max_cross > 0 ? iso.max_gap / iso.max_cross : 0.0, isotropic ? "yes" : "NO"));
}

}  // namespace

int main() {
  std::printf("eprbound acceptance suite\n");
  auto t_all = std::chrono::steady_clock::now();

  // Shared solves.
  System dw_sys = make_designed_dw();
  std::vector<Solved> dw_levels;
  double t_dw256 = 0.0;
  for (int n : {64, 128, 256}) {
    auto t0 = std::chrono::steady_clock::now();
    dw_levels.push_back(solve(dw_sys, n));
    if (n == 256) t_dw256 = seconds_since(t0);
  }
  Solved ou256 = solve(make_rot_ou(), 256);
  Solved ou128 = solve(make_rot_ou(), 128);
  Solved gd128 = solve(make_grad_dw(), 128);
  Solved nl128 = solve(make_nl_rot(), 128);

  DomainConstants dc_big = estimate_constants(Domain{-6, 6, -6, 6}, {32, 64, 128});
  DomainConstants dc_small = estimate_constants(Domain{-2, 2, -2, 2}, {32, 64, 128});

  std::vector<Solved> catalog = {ou256, gd128, dw_levels[1], nl128};

  criterion1(dw_levels, t_dw256);
  criterion2(ou256);
  criterion3();
  criterion4(catalog, dc_big, dc_small);
  criterion5(dc_big, dc_small);
  criterion6(dw_levels[2], ou256);
  criterion7(ou128, ou256, dw_levels[0], dw_levels[1], dc_big, dc_small);
  criterion8(catalog, dw_levels, ou256);

  std::printf("%d/8 criteria passed in %.0fs\n", 8 - g_failures, seconds_since(t_all));
  return g_failures == 0 ? 0 : 1;
}
