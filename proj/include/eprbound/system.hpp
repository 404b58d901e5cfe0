#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eprbound/expr.hpp"
#include "eprbound/grid.hpp"

namespace eprbound {

/// Constant diagonal diffusion matrix diag(d1, d2); the general SPD case of
/// the theory is not needed by the solver, and lambda_min still enters every
/// bound constant.
struct DiffusionMatrix {
  double d1 = 1.0;
  double d2 = 1.0;

  double lambda_min() const { return d1 < d2 ? d1 : d2; }
  double lambda_max() const { return d1 > d2 ? d1 : d2; }
  bool isotropic() const { return d1 == d2; }
};

/// Expression triple defining a system with analytically known invariant
/// density: rho ~ exp(-phi), stream function psi = a * bump * exp(-phi),
/// irreversible drift exp(phi) * perp-grad(psi). A bump vanishing on the
/// boundary makes the zero-flux condition exact.
struct DesignedSpec {
  expr::Expression phi;
  expr::Expression a;
  expr::Expression bump;
};

using DriftFn = std::function<Vec2(double, double)>;

/// A drift/diffusion system on a rectangular domain. Catalog systems carry
/// closed-form drifts (and, where available, the exact reversible/irreversible
/// split used as test oracles); custom and designed systems evaluate
/// expressions, with derivatives taken by central finite differences.
struct System {
  std::string name;
  Domain domain{-1, 1, -1, 1};
  DiffusionMatrix diffusion;
  std::map<std::string, double> params;

  DriftFn drift;
  DriftFn f_rev_exact;  // null when no closed form is known
  DriftFn f_irr_exact;  // null when no closed form is known
  std::optional<DesignedSpec> designed;

  Vec2 drift_at(double x, double y) const { return drift(x, y); }

  /// Same system with the diffusion matrix replaced (drift unchanged); used
  /// by the low-noise sweep.
  System with_diffusion(const DiffusionMatrix& d) const;
};

// Catalog constructors. Parameter defaults follow the catalog definitions.
System make_rot_ou(double gamma = 1.0, double alpha = 1.0, double d0 = 1.0, double half_side = 6.0);
System make_grad_dw(double d0 = 1.0, double half_side = 2.0);
System make_designed_dw(double a0 = 0.5, double kappa = 0.4, double d0 = 1.0, double half_side = 2.0);
System make_nl_rot(double alpha = 1.0, double kappa = 0.4, double d0 = 1.0, double half_side = 2.0);

/// Catalog dispatch; throws ConfigError listing valid names if unknown.
System make_catalog_system(const std::string& name, const std::map<std::string, double>& params);

const std::vector<std::string>& catalog_names();

/// System from user expressions F = (fx, fy).
System make_custom_system(const std::string& fx, const std::string& fy, const Domain& domain,
                          const DiffusionMatrix& d);

/// System from a designed (phi, a, bump) triple.
System make_designed_system(const std::string& phi, const std::string& a, const std::string& bump,
                            const Domain& domain, const DiffusionMatrix& d);

struct DesignedGroundTruth {
  ScalarField rho;          // normalized: sum(rho) * hx * hy = 1
  CellVectorField f_irr;    // exp(phi) * perp-grad(psi), centered differences of psi
  std::vector<int> saturated_cells;  // cells where exp(phi) overflowed
};

/// Exact invariant density and irreversible drift of a designed system,
/// evaluated on a grid. Requires sys.designed.
DesignedGroundTruth designed_ground_truth(const System& sys, const Grid& grid);

/// Cell-centered drift samples.
CellVectorField sample_drift(const System& sys, const Grid& grid);

}  // namespace eprbound
