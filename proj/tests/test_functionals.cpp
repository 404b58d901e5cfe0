#include <doctest.h>

#include <cmath>

#include "eprbound/certify.hpp"
#include "eprbound/fpe.hpp"
#include "eprbound/functionals.hpp"

using namespace eprbound;

namespace {

struct Solved {
  System sys;
  SteadyState state;
  Decomposition dec;
};

Solved solve_catalog(const char* name, int n) {
  Solved out{make_catalog_system(name, {}), {}, {}};
  Grid g(out.sys.domain, n, n);
  out.state = solve_steady(out.sys, g);
  out.dec = decompose(out.sys, out.state);
  return out;
}

// Quadrature of the closed-form designed-dw integrands on the same grid,
// using the exact density and exact irreversible drift. Independent of the
// solver and of the decomposition stencils.
struct DesignedOracle {
  double epr, v1, ls1, perp1, holder2, v2, ls2;
};

DesignedOracle designed_dw_oracle(const Grid& g) {
  System s = make_designed_dw();
  DesignedOracle o{0, 0, 0, 0, 0, 0, 0};
  double z = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double x = g.x_center(i), y = g.y_center(j);
      z += std::exp(-((x * x - 1) * (x * x - 1) + y * y));
    }
  z *= g.cell_area();
  double hinv = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double x = g.x_center(i), y = g.y_center(j);
      double rho = std::exp(-((x * x - 1) * (x * x - 1) + y * y)) / z;
      Vec2 fi = s.f_irr_exact(x, y);
      double gx = 4 * x * (x * x - 1), gy = 2 * y;  // grad phi
      // curl of F_irr by analytic central differences of the closed form.
      double h = 1e-5;
      double curl = (s.f_irr_exact(x + h, y).y - s.f_irr_exact(x - h, y).y) / (2 * h) -
                    (s.f_irr_exact(x, y + h).x - s.f_irr_exact(x, y - h).x) / (2 * h);
      double ls = gx * fi.x + gy * fi.y;
      double perp = gx * fi.y - gy * fi.x;
      double w = rho * g.cell_area();
      o.epr += (fi.x * fi.x + fi.y * fi.y) * w;
      o.v1 += curl * curl * w;
      o.ls1 += ls * ls * w;
      o.perp1 += perp * perp * w;
      o.v2 += curl * curl * curl * curl * w;
      o.ls2 += ls * ls * ls * ls * w;
      hinv += (1.0 / rho) * g.cell_area();
    }
  o.holder2 = std::sqrt(hinv);
  return o;
}

}  // namespace

TEST_CASE("rot-ou functionals hit the Gaussian closed forms") {
  Solved s = solve_catalog("rot-ou", 256);
  double epr = entropy_production(s.dec, s.sys.diffusion, s.state.rho);
  CHECK(epr == doctest::Approx(2.0).epsilon(0.02));
  CHECK(vorticity_moment(s.dec, s.state.rho, 1.0) == doctest::Approx(4.0).epsilon(0.02));
  CHECK(vorticity_moment(s.dec, s.state.rho, 2.0) == doctest::Approx(16.0).epsilon(0.02));
  CHECK(misalignment(s.dec, s.state.rho, 1.0) == doctest::Approx(8.0).epsilon(0.02));
  LevelsetVariation ls = levelset_variation(s.dec, s.state.rho, 1.0);
  CHECK(ls.value <= 1e-3 * misalignment(s.dec, s.state.rho, 1.0));

  // F_irr at (1, 0) is alpha * (0, 1) up to O(h^2).
  Vec2 fi = bilinear(s.dec.f_irr, 1.0, 0.0);
  CHECK(fi.y == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::fabs(fi.x) < 0.01);
}

TEST_CASE("alpha scaling quadruples the dissipation") {
  System s2 = make_catalog_system("rot-ou", {{"alpha", 2.0}});
  Grid g(s2.domain, 192, 192);
  SteadyState st = solve_steady(s2, g);
  Decomposition dec = decompose(s2, st);
  CHECK(entropy_production(dec, s2.diffusion, st.rho) == doctest::Approx(8.0).epsilon(0.02));
}

TEST_CASE("grad-dw is an equilibrium state") {
  Solved s = solve_catalog("grad-dw", 96);
  CHECK(max_abs(s.dec.f_irr.vx) < 1e-8);
  CHECK(max_abs(s.dec.f_irr.vy) < 1e-8);
  CHECK(entropy_production(s.dec, s.sys.diffusion, s.state.rho) < 1e-8);
  CHECK(vorticity_moment(s.dec, s.state.rho, 1.0) < 1e-8);
  CHECK(levelset_variation(s.dec, s.state.rho, 1.0).value < 1e-8);
  CHECK(misalignment(s.dec, s.state.rho, 1.0) < 1e-8);

  StreamFunction sf = stream_and_a(s.state, s.dec);
  CHECK(max_abs(sf.psi.v) < 1e-10);
  CHECK(max_abs(sf.a.v) < 1e-6);
}

TEST_CASE("gauge invariance: scaling the density changes nothing") {
  Solved s = solve_catalog("nl-rot", 64);
  FunctionalSet base = compute_functionals(s.sys, s.state, s.dec, {2.0});

  SteadyState scaled = s.state;
  for (double& v : scaled.rho.v) v *= 7.25;
  for (double& v : scaled.current.fx) v *= 7.25;  // current is linear in rho
  for (double& v : scaled.current.fy) v *= 7.25;
  Decomposition dec2 = decompose(s.sys, scaled);
  FunctionalSet mod = compute_functionals(s.sys, scaled, dec2, {2.0});

  CHECK(mod.epr == doctest::Approx(base.epr).epsilon(1e-12));
  CHECK(mod.v_q.at(1.0) == doctest::Approx(base.v_q.at(1.0)).epsilon(1e-12));
  CHECK(mod.v_q.at(2.0) == doctest::Approx(base.v_q.at(2.0)).epsilon(1e-12));
  CHECK(mod.delta_ls_q.at(1.0) == doctest::Approx(base.delta_ls_q.at(1.0)).epsilon(1e-12));
  CHECK(mod.delta_perp_q.at(1.0) == doctest::Approx(base.delta_perp_q.at(1.0)).epsilon(1e-12));
  CHECK(mod.holder_q.at(2.0) == doctest::Approx(base.holder_q.at(2.0)).epsilon(1e-12));
  CHECK(mod.sup_rho == doctest::Approx(base.sup_rho).epsilon(1e-12));

  // F_rev and F_irr themselves are unchanged.
  double gap = 0.0;
  for (std::size_t k = 0; k < s.dec.f_irr.vx.size(); ++k) {
    gap = std::fmax(gap, std::fabs(s.dec.f_irr.vx[k] - dec2.f_irr.vx[k]));
    gap = std::fmax(gap, std::fabs(s.dec.f_rev.vy[k] - dec2.f_rev.vy[k]));
  }
  CHECK(gap < 1e-12 * (1.0 + max_abs(s.dec.f_irr.vx)));
}

TEST_CASE("decomposition reproduces the input drift at interior cells") {
  Solved s = solve_catalog("designed-dw", 128);
  const Grid& g = s.state.rho.grid;
  double err = 0.0;
  for (int j = 2; j < g.ny - 2; ++j)
    for (int i = 2; i < g.nx - 2; ++i) {
      Vec2 f = s.sys.drift(g.x_center(i), g.y_center(j));
      std::size_t k = static_cast<std::size_t>(g.idx(i, j));
      err = std::fmax(err, std::fabs(s.dec.f_rev.vx[k] + s.dec.f_irr.vx[k] - f.x));
      err = std::fmax(err, std::fabs(s.dec.f_rev.vy[k] + s.dec.f_irr.vy[k] - f.y));
    }
  CHECK(err < 0.05);  // O(h^2) with the quartic potential's large third derivatives
}

TEST_CASE("stationarity identity converges at second order") {
  double prev = 0.0;
  for (int n : {64, 128, 256}) {
    Solved s = solve_catalog("designed-dw", n);
    double l2 = stationarity_identity_l2(s.dec, s.state.rho);
    if (prev > 0.0) CHECK(std::log2(prev / l2) > 1.8);
    prev = l2;
  }
}

TEST_CASE("lambda_min reduction holds exactly as computed") {
  System s = make_catalog_system("nl-rot", {});
  s = s.with_diffusion({0.7, 1.9});
  Grid g(s.domain, 64, 64);
  SteadyState st = solve_steady(s, g);
  Decomposition dec = decompose(s, st);
  double epr = entropy_production(dec, s.diffusion, st.rho);
  double sum_sq = 0.0;
  double mass = dec.input_mass;
  for (int c = 0; c < g.cells(); ++c) {
    std::size_t k = static_cast<std::size_t>(c);
    sum_sq += (dec.f_irr.vx[k] * dec.f_irr.vx[k] + dec.f_irr.vy[k] * dec.f_irr.vy[k]) *
              st.rho.v[k] * g.cell_area() / mass;
  }
  CHECK(epr <= sum_sq / s.diffusion.lambda_min() * (1.0 + 1e-12));
  CHECK(epr >= 0.0);
}

TEST_CASE("holder factor: constant density algebra and the q -> 1 limit") {
  Grid g(Domain{-6, 6, -6, 6}, 32, 32);  // |Omega| = 144
  ScalarField uniform(g, 1.0 / 144.0);
  HolderFactor h2 = holder_factor(uniform, 2.0);
  CHECK_FALSE(h2.overflow);
  CHECK(h2.value == doctest::Approx(144.0).epsilon(1e-12));

  // Unnormalized input gives the same factor (mass-normalized internally).
  ScalarField scaled(g, 3.7);
  CHECK(holder_factor(scaled, 2.0).value == doctest::Approx(144.0).epsilon(1e-12));

  CHECK_THROWS_AS(holder_factor(uniform, 1.0), ConfigError);

  // On rot-ou the factor increases toward 1/inf(rho) as q -> 1+ and the
  // q = 1 remark constant sup/inf dominates sup * holder_q along the way.
  Solved s = solve_catalog("rot-ou", 128);
  FunctionalSet fs = compute_functionals(s.sys, s.state, s.dec, {1.5, 1.25, 1.1});
  double h15 = fs.holder_q.at(1.5), h125 = fs.holder_q.at(1.25), h11 = fs.holder_q.at(1.1);
  CHECK(h15 < h125);
  CHECK(h125 < h11);
  CHECK(h11 <= 1.0 / fs.inf_rho * (1.0 + 1e-9));
  CHECK(fs.sup_rho * h11 <= fs.sup_rho / fs.inf_rho * (1.0 + 1e-9));
}

TEST_CASE("designed-dw functionals match the closed-form quadrature oracle") {
  Solved s = solve_catalog("designed-dw", 256);
  const Grid& g = s.state.rho.grid;
  DesignedOracle o = designed_dw_oracle(g);
  FunctionalSet fs = compute_functionals(s.sys, s.state, s.dec, {2.0});
  CHECK(fs.epr == doctest::Approx(o.epr).epsilon(0.005));
  CHECK(fs.v_q.at(1.0) == doctest::Approx(o.v1).epsilon(0.005));
  CHECK(fs.delta_ls_q.at(1.0) == doctest::Approx(o.ls1).epsilon(0.005));
  CHECK(fs.delta_ls_q.at(1.0) > 0.0);  // kappa != 0 makes the level sets vary
  CHECK(fs.delta_perp_q.at(1.0) == doctest::Approx(o.perp1).epsilon(0.005));
  CHECK(fs.holder_q.at(2.0) == doctest::Approx(o.holder2).epsilon(0.005));
  // The two level-set routes agree (stationarity identity).
  CHECK(fs.delta_ls_div_q.at(1.0) == doctest::Approx(fs.delta_ls_q.at(1.0)).epsilon(0.02));
}

TEST_CASE("stream function recovery") {
  SUBCASE("rot-ou recovers a constant a = alpha D0 / gamma on the bulk") {
    Solved s = solve_catalog("rot-ou", 192);
    StreamFunction sf = stream_and_a(s.state, s.dec);
    CHECK(sf.path_dependence < 1e-8);
    const Grid& g = s.state.rho.grid;
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (std::hypot(g.x_center(i), g.y_center(j)) <= 3.0)
          worst = std::fmax(worst, std::fabs(sf.a.at(i, j) - 1.0));
    CHECK(worst < 0.02);
  }
  SUBCASE("designed-dw recovers the prescribed a * bump on the bulk") {
    Solved s = solve_catalog("designed-dw", 192);
    StreamFunction sf = stream_and_a(s.state, s.dec);
    const Grid& g = s.state.rho.grid;
    double sup = 0.0, worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double x = g.x_center(i), y = g.y_center(j);
        if (std::fabs(x) > 1.5 || std::fabs(y) > 1.5) continue;
        double truth = 0.5 * (1 + 0.4 * x) * (1 - x * x / 4) * (1 - y * y / 4);
        sup = std::fmax(sup, std::fabs(truth));
        worst = std::fmax(worst, std::fabs(sf.a.at(i, j) - truth));
      }
    CHECK(worst < 0.02 * sup);
  }
}

TEST_CASE("cells under the density floor are masked and reported") {
  System s = make_custom_system("0", "0", Domain{0, 1, 0, 1}, {1.0, 1.0});
  Grid g(s.domain, 16, 16);
  ScalarField rho(g, 1.0);
  rho.at(0, 0) = 0.0;  // degenerate cell, below the 1e-290 floor
  rho.at(5, 7) = 1e-295;
  FaceField current(g);  // zero current
  Decomposition dec = decompose(s, rho, current);
  CHECK(dec.masked_cells == 2);
  CHECK_FALSE(dec.all_valid());
  CHECK(dec.excluded_mass > 0.0);
  CHECK(dec.excluded_mass < 1e-290);  // the masked cells carry almost no mass
  CHECK(dec.f_irr.x_at(0, 0) == 0.0);

  // Functionals stay finite; the unweighted integrals report the lost area.
  CHECK(std::isfinite(entropy_production(dec, s.diffusion, rho)));
  UnweightedIntegrals ui = unweighted_integrals(dec);
  CHECK(ui.excluded_area == doctest::Approx(2.0 * g.cell_area()));

  // An effectively-zero density makes the Hoelder factor overflow...
  HolderFactor h = holder_factor(rho, 2.0);
  CHECK(h.overflow);
  CHECK(std::isinf(h.value));

  // ...and the sup/inf corollary form vacuous (but still reported as holding).
  SteadyState fake;
  fake.rho = rho;
  fake.current = current;
  FunctionalSet fs = compute_functionals(s, fake, dec, {});
  CHECK(fs.excluded_mass == dec.excluded_mass);
  auto [b1, b2] = check_corollary_bounds(fs, dec, 1.0, 1.0);
  CHECK(b1.holds);
  CHECK(b2.holds);
  CHECK(b2.vacuous);
  CHECK(std::isinf(b2.rhs));
}

TEST_CASE("isotropic identity and non-negativity") {
  Solved s = solve_catalog("rot-ou", 128);
  IsotropyIdentity iso = isotropic_identity_check(s.sys, s.state, s.dec);
  CHECK(iso.max_gap <= 1e-10 * iso.max_cross);
  FunctionalSet fs = compute_functionals(s.sys, s.state, s.dec, {1.5, 2.0, 3.0});
  CHECK(fs.epr >= 0.0);
  for (const auto& [q, v] : fs.v_q) CHECK(v >= 0.0);
  for (const auto& [q, v] : fs.delta_ls_q) CHECK(v >= 0.0);
  for (const auto& [q, v] : fs.delta_perp_q) CHECK(v >= 0.0);
}
