#include "eprbound/system.hpp"

#include <cfloat>
#include <cmath>
#include <cstdio>
#include <memory>

namespace eprbound {

namespace {

// Central-difference step for expression derivatives, scaled with the
// evaluation point.
const double kFdStep = std::cbrt(DBL_EPSILON);

double fd_x(const expr::Expression& e, double x, double y) {
  double h = kFdStep * std::fmax(1.0, std::fabs(x));
  return (e(x + h, y) - e(x - h, y)) / (2.0 * h);
}

double fd_y(const expr::Expression& e, double x, double y) {
  double h = kFdStep * std::fmax(1.0, std::fabs(y));
  return (e(x, y + h) - e(x, y - h)) / (2.0 * h);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void validate_diffusion(const DiffusionMatrix& d) {
  if (!(d.d1 > 0.0) || !(d.d2 > 0.0))
    throw ConfigError("diffusion matrix must be symmetric positive definite (d1, d2 > 0)");
}

Domain square(double half_side) { return {-half_side, half_side, -half_side, half_side}; }

DesignedSpec parse_designed(const std::string& phi, const std::string& a, const std::string& bump) {
  return {expr::parse(phi), expr::parse(a), expr::parse(bump)};
}

}  // namespace

System System::with_diffusion(const DiffusionMatrix& d) const {
  validate_diffusion(d);
  System out = *this;
  out.diffusion = d;
  // The drift stays fixed (low-noise sweeps scale only the noise). Exact
  // splits and designed oracles survive only where they remain valid.
  if (name == "rot-ou" && d.isotropic()) {
    double gamma = params.at("gamma");
    out.designed = parse_designed(
        fmt(gamma / (2.0 * d.d1)) + "*(x^2 + y^2)",
        fmt(params.at("alpha") * d.d1 / gamma), "1");
  } else if (name == "grad-dw") {
    out.designed = parse_designed(
        "(x^2-1)^2/" + fmt(d.d1) + " + y^2/" + fmt(d.d2), "0", "1");
  } else {
    out.designed.reset();
    out.f_rev_exact = nullptr;
    out.f_irr_exact = nullptr;
  }
  return out;
}

System make_rot_ou(double gamma, double alpha, double d0, double half_side) {
  if (!(gamma > 0.0)) throw ConfigError("rot-ou requires gamma > 0");
  System s;
  s.name = "rot-ou";
  s.domain = square(half_side);
  s.diffusion = {d0, d0};
  validate_diffusion(s.diffusion);
  s.params = {{"gamma", gamma}, {"alpha", alpha}, {"D0", d0}, {"L", half_side}};
  s.drift = [=](double x, double y) -> Vec2 {
    return {-gamma * x - alpha * y, alpha * x - gamma * y};
  };
  s.f_rev_exact = [=](double x, double y) -> Vec2 { return {-gamma * x, -gamma * y}; };
  s.f_irr_exact = [=](double x, double y) -> Vec2 { return {-alpha * y, alpha * x}; };
  s.designed = parse_designed(fmt(gamma / (2.0 * d0)) + "*(x^2 + y^2)",
                              fmt(alpha * d0 / gamma), "1");
  return s;
}

System make_grad_dw(double d0, double half_side) {
  System s;
  s.name = "grad-dw";
  s.domain = square(half_side);
  s.diffusion = {d0, d0};
  validate_diffusion(s.diffusion);
  s.params = {{"D0", d0}, {"L", half_side}};
  s.drift = [](double x, double y) -> Vec2 {
    return {-4.0 * x * (x * x - 1.0), -2.0 * y};
  };
  s.f_rev_exact = s.drift;
  s.f_irr_exact = [](double, double) -> Vec2 { return {0.0, 0.0}; };
  s.designed = parse_designed("((x^2-1)^2 + y^2)/" + fmt(d0), "0", "1");
  return s;
}

System make_designed_dw(double a0, double kappa, double d0, double half_side) {
  System s;
  s.name = "designed-dw";
  s.domain = square(half_side);
  s.diffusion = {d0, d0};
  validate_diffusion(s.diffusion);
  s.params = {{"a0", a0}, {"kappa", kappa}, {"D0", d0}, {"L", half_side}};
  const double L = half_side;
  // phi = (x^2-1)^2 + y^2, a = a0 (1 + kappa x),
  // bump = (1 - (x/L)^2)(1 - (y/L)^2); F_irr = exp(phi) perp-grad(a bump e^-phi),
  // which the product rule reduces to derivatives of g = a*bump and phi alone.
  auto f_irr = [=](double x, double y) -> Vec2 {
    double a = a0 * (1.0 + kappa * x);
    double bx = 1.0 - (x / L) * (x / L);
    double by = 1.0 - (y / L) * (y / L);
    double g = a * bx * by;
    double dg_dx = a0 * kappa * bx * by + a * (-2.0 * x / (L * L)) * by;
    double dg_dy = a * bx * (-2.0 * y / (L * L));
    double phi_x = 4.0 * x * (x * x - 1.0);
    double phi_y = 2.0 * y;
    return {dg_dy - g * phi_y, -(dg_dx - g * phi_x)};
  };
  auto f_rev = [=](double x, double y) -> Vec2 {
    return {-d0 * 4.0 * x * (x * x - 1.0), -d0 * 2.0 * y};
  };
  s.drift = [=](double x, double y) -> Vec2 {
    Vec2 r = f_rev(x, y), i = f_irr(x, y);
    return {r.x + i.x, r.y + i.y};
  };
  s.f_rev_exact = f_rev;
  s.f_irr_exact = f_irr;
  s.designed = parse_designed(
      "(x^2-1)^2 + y^2",
      fmt(a0) + "*(1 + " + fmt(kappa) + "*x)",
      "(1-(x/" + fmt(L) + ")^2)*(1-(y/" + fmt(L) + ")^2)");
  return s;
}

System make_nl_rot(double alpha, double kappa, double d0, double half_side) {
  System s;
  s.name = "nl-rot";
  s.domain = square(half_side);
  s.diffusion = {d0, d0};
  validate_diffusion(s.diffusion);
  s.params = {{"alpha", alpha}, {"kappa", kappa}, {"D0", d0}, {"L", half_side}};
  // F = -grad U + alpha (1 + kappa x) perp-grad U with U = (x^2-1)^2 + y^2.
  s.drift = [=](double x, double y) -> Vec2 {
    double ux = 4.0 * x * (x * x - 1.0);
    double uy = 2.0 * y;
    double rot = alpha * (1.0 + kappa * x);
    return {-ux + rot * uy, -uy - rot * ux};
  };
  return s;
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"rot-ou", "grad-dw", "designed-dw", "nl-rot"};
  return names;
}

System make_catalog_system(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const char* key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  System s;
  if (name == "rot-ou") {
    s = make_rot_ou(get("gamma", 1.0), get("alpha", 1.0), get("D0", 1.0), get("L", 6.0));
  } else if (name == "grad-dw") {
    s = make_grad_dw(get("D0", 1.0), get("L", 2.0));
  } else if (name == "designed-dw") {
    s = make_designed_dw(get("a0", 0.5), get("kappa", 0.4), get("D0", 1.0), get("L", 2.0));
  } else if (name == "nl-rot") {
    s = make_nl_rot(get("alpha", 1.0), get("kappa", 0.4), get("D0", 1.0), get("L", 2.0));
  } else {
    std::string valid;
    for (const auto& n : catalog_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown catalog system '" + name + "'; valid names: " + valid);
  }
  for (const auto& [k, v] : params) {
    if (!s.params.count(k))
      throw ConfigError("unknown parameter '" + k + "' for catalog system '" + name + "'");
    s.params[k] = v;
  }
  return s;
}

System make_custom_system(const std::string& fx, const std::string& fy, const Domain& domain,
                          const DiffusionMatrix& d) {
  validate_diffusion(d);
  System s;
  s.name = "custom";
  s.domain = domain;
  s.diffusion = d;
  auto ex = std::make_shared<expr::Expression>(expr::parse(fx));
  auto ey = std::make_shared<expr::Expression>(expr::parse(fy));
  s.drift = [ex, ey](double x, double y) -> Vec2 { return {(*ex)(x, y), (*ey)(x, y)}; };
  return s;
}

System make_designed_system(const std::string& phi, const std::string& a, const std::string& bump,
                            const Domain& domain, const DiffusionMatrix& d) {
  validate_diffusion(d);
  System s;
  s.name = "designed";
  s.domain = domain;
  s.diffusion = d;
  auto spec = std::make_shared<DesignedSpec>(parse_designed(phi, a, bump));
  auto f_irr = [spec](double x, double y) -> Vec2 {
    // exp(phi) perp-grad(g e^-phi) = (d_y g - g d_y phi, -(d_x g - g d_x phi)),
    // g = a * bump; no exponential is ever formed.
    auto g_at = [&](double px, double py) { return (spec->a)(px, py) * (spec->bump)(px, py); };
    double hx = kFdStep * std::fmax(1.0, std::fabs(x));
    double hy = kFdStep * std::fmax(1.0, std::fabs(y));
    double g = g_at(x, y);
    double dg_dx = (g_at(x + hx, y) - g_at(x - hx, y)) / (2.0 * hx);
    double dg_dy = (g_at(x, y + hy) - g_at(x, y - hy)) / (2.0 * hy);
    double phi_x = fd_x(spec->phi, x, y);
    double phi_y = fd_y(spec->phi, x, y);
    return {dg_dy - g * phi_y, -(dg_dx - g * phi_x)};
  };
  s.drift = [spec, f_irr, d](double x, double y) -> Vec2 {
    Vec2 irr = f_irr(x, y);
    return {-d.d1 * fd_x(spec->phi, x, y) + irr.x, -d.d2 * fd_y(spec->phi, x, y) + irr.y};
  };
  s.f_irr_exact = f_irr;
  s.designed = *spec;
  return s;
}

DesignedGroundTruth designed_ground_truth(const System& sys, const Grid& grid) {
  if (!sys.designed)
    throw ConfigError("designed_ground_truth requires a designed system");
  const DesignedSpec& ds = *sys.designed;

  DesignedGroundTruth out{ScalarField(grid), CellVectorField(grid), {}};
  ScalarField phi(grid);
  double phi_min = HUGE_VAL;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      double p = ds.phi(grid.x_center(i), grid.y_center(j));
      phi.at(i, j) = p;
      phi_min = std::fmin(phi_min, p);
    }
  double mass = 0.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      double r = std::exp(-(phi.at(i, j) - phi_min));
      out.rho.at(i, j) = r;
      mass += r;
    }
  mass *= grid.cell_area();
  for (double& r : out.rho.v) r /= mass;

  // F_irr = exp(phi) * perp-grad(psi), psi = a * bump * exp(-phi), by centered
  // differences of psi on the grid spacing. exp(phi(x)) * exp(-phi(x +- h)) is
  // folded into exp(phi(x) - phi(x +- h)) so large potentials do not saturate.
  auto g_at = [&](double px, double py) { return ds.a(px, py) * ds.bump(px, py); };
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      double x = grid.x_center(i), y = grid.y_center(j);
      double p0 = phi.at(i, j);
      if (p0 - phi_min > 745.0) out.saturated_cells.push_back(grid.idx(i, j));
      auto psi_rel = [&](double px, double py) {
        // psi(px,py) * exp(phi(x,y)); finite whenever the potential gap is.
        return g_at(px, py) * std::exp(p0 - ds.phi(px, py));
      };
      out.f_irr.x_at(i, j) = (psi_rel(x, y + grid.hy) - psi_rel(x, y - grid.hy)) / (2.0 * grid.hy);
      out.f_irr.y_at(i, j) = -(psi_rel(x + grid.hx, y) - psi_rel(x - grid.hx, y)) / (2.0 * grid.hx);
    }
  return out;
}

CellVectorField sample_drift(const System& sys, const Grid& grid) {
  CellVectorField f(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      Vec2 v = sys.drift(grid.x_center(i), grid.y_center(j));
      if (!std::isfinite(v.x) || !std::isfinite(v.y))
        throw NumericError("drift is not finite at grid point (" +
                           std::to_string(grid.x_center(i)) + ", " +
                           std::to_string(grid.y_center(j)) + ")");
      f.x_at(i, j) = v.x;
      f.y_at(i, j) = v.y;
    }
  return f;
}

}  // namespace eprbound
