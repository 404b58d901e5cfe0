#pragma once

#include <string>
#include <vector>

#include "eprbound/functionals.hpp"
#include "eprbound/grid.hpp"
#include "eprbound/sobolev.hpp"
#include "eprbound/system.hpp"

namespace eprbound {

/// One machine-checked inequality: lhs is the entropy production rate, rhs
/// the assembled bound.
struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant_used = 0.0;
  std::string constant_note;
  double margin = 0.0;  // rhs / lhs, +inf when lhs == 0
  bool holds = false;   // lhs <= rhs (1 + 1e-9)
  bool vacuous = false; // rhs overflowed to +inf (bound trivially true)
  double rhs_tight = 0.0;  // proof-exact variant where one exists, else 0
};

/// Upper bound with constant 4 c2^2 / lambda_min on V + (delta_LS +
/// delta_perp)/4, plus the tighter composition 2 c2^2 (2V + delta_perp/2 +
/// delta_LS/4) that skips the triangle inequality on the divergence term.
BoundCheck check_theorem1(const FunctionalSet& fs, double c2, double lambda_min);

/// q-moment bound with constant 2 c2^2 sup(rho) holder_q / lambda_min on
/// (V^q)^(1/q) + (delta_LS^q)^(1/q); requires rho > 0 on the boundary cells
/// and q > 1 present in the functional set.
BoundCheck check_theorem2(const FunctionalSet& fs, double c2, double lambda_min, double q);

/// The two corollary forms: unweighted integrals times 2 c2^2 sup(rho), and
/// the weighted q = 1 moments times 2 c2^2 sup(rho)/inf(rho).
std::pair<BoundCheck, BoundCheck> check_corollary_bounds(const FunctionalSet& fs,
                                                         const Decomposition& dec, double c2,
                                                         double lambda_min);

struct SweepRecord {
  double eps = 0.0;
  double epr = 0.0;
  double v = 0.0;
  double delta_ls = 0.0;
  double delta_perp = 0.0;
  double ratio_ls_perp = 0.0;
  double fw_rhs = 0.0;  // 4 c2^2 delta_perp
  bool epr_within_bound = false;
  // Isotropic-diffusion extras: delta_perp evaluated with the full drift in
  // place of F_irr, and the pointwise agreement of the two cross products.
  bool isotropic = false;
  double delta_perp_full_drift = 0.0;
  double isotropy_gap_rel = 0.0;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  bool truncated = false;
  std::string truncation_error;
};

/// Low-noise sweep: for each eps (descending, >= 0.1) solve with diffusion
/// eps * D/||D|| and record the q = 1 functionals against the bound.
SweepResult fw_sweep(const System& sys, const std::vector<double>& eps_list, int grid_n,
                     double c2);

struct LocalityRow {
  double radius = 0.0;
  double diam = 0.0;  // side length of the square subdomain
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
  bool defined = true;    // denominator above floor
  bool in_regime = true;  // diam * sqrt(K) < 1
  int cells = 0;
};

struct LocalityTable {
  Vec2 center;          // cell center minimizing phi
  double k_curvature = 0.0;  // mean discrete Laplacian of phi over smallest window
  std::vector<LocalityRow> rows;
};

/// Near-minimum locality check: unweighted integrals of |F_irr . grad phi|^2
/// against K diam^2 |curl F_irr|^2 over shrinking square windows centered on
/// the potential minimum.
LocalityTable parabolic_locality(const System& sys, const SteadyState& state,
                                 const Decomposition& dec, const std::vector<double>& radii);

struct IsotropyIdentity {
  double max_gap = 0.0;        // max pointwise |cross(F) - cross(F_irr)|
  double max_cross = 0.0;      // max pointwise |cross(F)|
  double delta_perp_full_drift = 0.0;
  double delta_perp_algebraic = 0.0;
};

/// For isotropic D, grad(phi) x F equals grad(phi) x (F + D grad(phi))
/// identically; checked on the discrete fields.
IsotropyIdentity isotropic_identity_check(const System& sys, const SteadyState& state,
                                          const Decomposition& dec);

}  // namespace eprbound
