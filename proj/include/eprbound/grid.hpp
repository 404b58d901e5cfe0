#pragma once

#include <cstdint>
#include <vector>

#include "eprbound/errors.hpp"

namespace eprbound {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned rectangle; bounded, Lipschitz and simply connected by
/// construction, which is all the domain theory requires in 2-D.
struct Domain {
  double x_min, x_max, y_min, y_max;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

/// Uniform cell-centered grid over a Domain.
struct Grid {
  Domain domain{0, 1, 0, 1};
  int nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;

  Grid() = default;
  Grid(const Domain& d, int nx_, int ny_) : domain(d), nx(nx_), ny(ny_) {
    if (!(d.x_min < d.x_max) || !(d.y_min < d.y_max))
      throw ConfigError("domain bounds must satisfy x_min < x_max, y_min < y_max");
    if (nx < 2 || ny < 2) throw ConfigError("grid must have nx, ny >= 2");
    hx = d.width() / nx;
    hy = d.height() / ny;
  }

  int cells() const { return nx * ny; }
  int idx(int i, int j) const { return i + j * nx; }
  double cell_area() const { return hx * hy; }

  double x_center(int i) const { return domain.x_min + (i + 0.5) * hx; }
  double y_center(int j) const { return domain.y_min + (j + 0.5) * hy; }
  double x_node(int i) const { return domain.x_min + i * hx; }
  double y_node(int j) const { return domain.y_min + j * hy; }
};

/// Scalar values at cell centers.
struct ScalarField {
  Grid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), v(static_cast<std::size_t>(g.cells()), fill) {}

  double& at(int i, int j) { return v[static_cast<std::size_t>(grid.idx(i, j))]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(grid.idx(i, j))]; }
};

/// Vector values at cell centers.
struct CellVectorField {
  Grid grid;
  std::vector<double> vx, vy;

  CellVectorField() = default;
  explicit CellVectorField(const Grid& g)
      : grid(g),
        vx(static_cast<std::size_t>(g.cells()), 0.0),
        vy(static_cast<std::size_t>(g.cells()), 0.0) {}

  double& x_at(int i, int j) { return vx[static_cast<std::size_t>(grid.idx(i, j))]; }
  double x_at(int i, int j) const { return vx[static_cast<std::size_t>(grid.idx(i, j))]; }
  double& y_at(int i, int j) { return vy[static_cast<std::size_t>(grid.idx(i, j))]; }
  double y_at(int i, int j) const { return vy[static_cast<std::size_t>(grid.idx(i, j))]; }
};

/// MAC-staggered vector field: fx on the (nx+1) x ny vertical faces, fy on
/// the nx x (ny+1) horizontal faces. A zero-flux current keeps its boundary
/// faces exactly zero.
struct FaceField {
  Grid grid;
  std::vector<double> fx, fy;

  FaceField() = default;
  explicit FaceField(const Grid& g)
      : grid(g),
        fx(static_cast<std::size_t>((g.nx + 1) * g.ny), 0.0),
        fy(static_cast<std::size_t>(g.nx * (g.ny + 1)), 0.0) {}

  // fx index: face i in [0, nx], cell row j in [0, ny).
  double& fx_at(int i, int j) { return fx[static_cast<std::size_t>(i + j * (grid.nx + 1))]; }
  double fx_at(int i, int j) const { return fx[static_cast<std::size_t>(i + j * (grid.nx + 1))]; }
  // fy index: cell column i in [0, nx), face j in [0, ny].
  double& fy_at(int i, int j) { return fy[static_cast<std::size_t>(i + j * grid.nx)]; }
  double fy_at(int i, int j) const { return fy[static_cast<std::size_t>(i + j * grid.nx)]; }
};

// --- discrete field operators -------------------------------------------
// Cell-centered derivatives use centered differences in the interior and
// second-order one-sided stencils on the boundary rows/columns.

/// Gradient of a cell-centered scalar.
CellVectorField gradient(const ScalarField& s);

/// Scalar curl d(vy)/dx - d(vx)/dy of a cell-centered vector field.
ScalarField curl(const CellVectorField& f);

/// Divergence d(vx)/dx + d(vy)/dy of a cell-centered vector field.
ScalarField divergence(const CellVectorField& f);

/// Divergence of a face field, one value per cell (boundary faces included).
ScalarField face_divergence(const FaceField& f);

/// Averages face values to cell centers.
CellVectorField face_to_center(const FaceField& f);

/// Bilinear interpolation of a cell-centered field at (x, y); coordinates are
/// clamped to the hull of cell centers.
double bilinear(const ScalarField& s, double x, double y);
Vec2 bilinear(const CellVectorField& f, double x, double y);

/// Midpoint-rule integral: sum of values times cell area.
double cell_integral(const ScalarField& s);

double max_abs(const std::vector<double>& v);

}  // namespace eprbound
