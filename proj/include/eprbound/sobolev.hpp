#pragma once

#include <cstdint>
#include <vector>

#include "eprbound/grid.hpp"

namespace eprbound {

/// Domain constants of the curl/div trace inequalities, numerically estimated
/// from discrete Rayleigh quotients on MAC-staggered fields with zero normal
/// trace. c1 applies on the divergence-free subspace, c2 on the full space,
/// so c1 <= c2.
struct DomainConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double eigen_c1 = 0.0;  // smallest Rayleigh value on the finest grid
  double eigen_c2 = 0.0;
  struct GridEstimate {
    int n;
    double h;
    double c1, c2;
    double lambda_c1, lambda_c2;
  };
  std::vector<GridEstimate> grids_used;
  bool extrapolated = false;
  double observed_order_c1 = 0.0;
  double observed_order_c2 = 0.0;
};

struct RayleighEstimate {
  double constant;   // lambda^(-1/2)
  double lambda;     // smallest Rayleigh value
  int iterations;
};

/// Best constant in ||phi|| <= c2 (||curl phi|| + ||div phi||) over face
/// fields with zero normal trace: inverse power iteration on the quadratic
/// form (div at cells, curl at interior nodes), c2 = lambda*^(-1/2).
RayleighEstimate estimate_c2_detail(const Grid& grid);
double estimate_c2(const Grid& grid);

/// Best constant in ||phi|| <= c1 ||curl phi|| over discretely
/// divergence-free zero-trace fields, via the stream-function reduction:
/// c1 = lambda_1(Dirichlet Laplacian)^(-1/2).
RayleighEstimate estimate_c1_detail(const Grid& grid);
double estimate_c1(const Grid& grid);

struct Extrapolation {
  double value;
  double observed_order;  // NaN when undefined (constant or non-monotone data)
  bool monotone;
};

/// Richardson extrapolation of >= 3 grid levels assuming O(h^2) error.
/// Non-monotone sequences fall back to the finest-grid value.
Extrapolation refine_and_extrapolate(std::vector<std::pair<double, double>> h_value);

/// Runs both estimates over n x n grids and extrapolates.
DomainConstants estimate_constants(const Domain& domain, const std::vector<int>& grid_sizes);

// Discrete norms matching the Rayleigh quotients; used by the property
// checks on random test fields.
double face_l2_norm(const FaceField& f);
double face_div_l2_norm(const FaceField& f);
double face_curl_l2_norm(const FaceField& f);  // curl at interior nodes

/// Face field with zero boundary normal components and N(0,1) interior faces.
FaceField random_zero_trace_field(const Grid& grid, std::uint64_t seed);

/// Discretely divergence-free zero-trace field (perp-gradient of a random
/// node stream function vanishing on the boundary).
FaceField random_divergence_free_field(const Grid& grid, std::uint64_t seed);

}  // namespace eprbound
