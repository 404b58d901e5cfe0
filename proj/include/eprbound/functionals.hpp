#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "eprbound/fpe.hpp"
#include "eprbound/grid.hpp"
#include "eprbound/system.hpp"

namespace eprbound {

/// Density floor below which cells are masked out of the decomposition
/// (phi = -ln rho is singular there); their rho-weight is reported.
inline constexpr double kRhoFloor = 1e-290;

/// Drift decomposition at a steady state: phi = -ln rho, reversible part
/// -D grad(phi), irreversible part J/rho averaged to cell centers, and the
/// cell-centered curl and divergence of the irreversible part.
struct Decomposition {
  ScalarField phi;
  CellVectorField grad_phi;
  CellVectorField f_rev;
  CellVectorField f_irr;
  ScalarField curl_f_irr;
  ScalarField div_f_irr;
  std::vector<std::uint8_t> valid;  // 0 where rho fell below the floor
  double excluded_mass = 0.0;       // normalized rho-weight of masked cells
  int masked_cells = 0;
  double input_mass = 0.0;          // sum(rho) * cell area of the input density

  bool all_valid() const { return masked_cells == 0; }
};

Decomposition decompose(const System& sys, const SteadyState& state);

/// Gauge-test entry: decompose an arbitrary positive density and its current.
Decomposition decompose(const System& sys, const ScalarField& rho, const FaceField& current);

/// Entropy production rate: integral of F_irr . D^-1 F_irr weighted by the
/// (internally normalized) density.
double entropy_production(const Decomposition& dec, const DiffusionMatrix& d,
                          const ScalarField& rho);

/// rho-weighted vorticity moment: integral of |curl F_irr|^(2q) rho dx, q >= 1.
double vorticity_moment(const Decomposition& dec, const ScalarField& rho, double q);

struct LevelsetVariation {
  double value;      // integral of |grad(phi) . F_irr|^(2q) rho dx
  double div_route;  // same moment with div F_irr (stationarity identity)
};

/// Level-set variation moment, with the divergence-route cross-check.
LevelsetVariation levelset_variation(const Decomposition& dec, const ScalarField& rho, double q);

/// Misalignment moment: integral of |grad(phi) x F_irr|^(2q) rho dx.
double misalignment(const Decomposition& dec, const ScalarField& rho, double q);

struct HolderFactor {
  double value;    // (integral rho^(1/(1-q)) dx)^((q-1)/q), +inf on overflow
  bool overflow;
};

/// Hoelder companion factor of the q-moment bound; q > 1.
HolderFactor holder_factor(const ScalarField& rho, double q);

struct StreamFunction {
  ScalarField psi;          // cell-centered stream function, psi = 0 on the wall
  ScalarField a;            // psi / rho
  double path_dependence;   // max gap between the two integration orders
};

/// Integrates the face current into its stream function (J = perp-grad psi,
/// psi = 0 on the boundary) and recovers a = psi / rho. A path-dependence
/// value far above the solver residual signals a non-solenoidal current.
StreamFunction stream_and_a(const SteadyState& state, const Decomposition& dec);

/// The full functional set consumed by the certification checks.
struct FunctionalSet {
  double epr = 0.0;
  std::map<double, double> v_q;
  std::map<double, double> delta_ls_q;
  std::map<double, double> delta_ls_div_q;  // divergence-route cross-check
  std::map<double, double> delta_perp_q;
  std::map<double, double> holder_q;        // q > 1 entries only
  std::set<double> holder_overflow;
  double sup_rho = 0.0;
  double inf_rho = 0.0;
  double boundary_inf_rho = 0.0;  // min over boundary cells
  double excluded_mass = 0.0;
};

/// Computes epr and the q = 1 moments plus every q in q_list.
FunctionalSet compute_functionals(const System& sys, const SteadyState& state,
                                  const Decomposition& dec, const std::vector<double>& q_list);

/// Unweighted integrals over unmasked cells for the first corollary form.
struct UnweightedIntegrals {
  double curl_sq;      // integral |curl F_irr|^2 dx
  double ls_sq;        // integral |grad(phi) . F_irr|^2 dx
  double excluded_area;
};
UnweightedIntegrals unweighted_integrals(const Decomposition& dec);

/// L2(rho) norm of div F_irr - grad(phi) . F_irr (stationarity identity).
double stationarity_identity_l2(const Decomposition& dec, const ScalarField& rho);

}  // namespace eprbound
