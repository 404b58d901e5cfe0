#include "eprbound/grid.hpp"

#include <algorithm>
#include <cmath>

namespace eprbound {

namespace {

// d/dx along one row of cell values: centered interior, 2nd-order one-sided
// at the two ends.
inline double d_interior(double m1, double p1, double h) { return (p1 - m1) / (2.0 * h); }
inline double d_left(double f0, double f1, double f2, double h) {
  return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
}
inline double d_right(double fm2, double fm1, double f0, double h) {
  return (3.0 * f0 - 4.0 * fm1 + fm2) / (2.0 * h);
}

template <class Get>
double ddx(const Grid& g, int i, int j, Get&& f) {
  if (i == 0) return d_left(f(0, j), f(1, j), f(2, j), g.hx);
  if (i == g.nx - 1) return d_right(f(i - 2, j), f(i - 1, j), f(i, j), g.hx);
  return d_interior(f(i - 1, j), f(i + 1, j), g.hx);
}

template <class Get>
double ddy(const Grid& g, int i, int j, Get&& f) {
  if (j == 0) return d_left(f(i, 0), f(i, 1), f(i, 2), g.hy);
  if (j == g.ny - 1) return d_right(f(i, j - 2), f(i, j - 1), f(i, j), g.hy);
  return d_interior(f(i, j - 1), f(i, j + 1), g.hy);
}

}  // namespace

CellVectorField gradient(const ScalarField& s) {
  const Grid& g = s.grid;
  CellVectorField out(g);
  auto get = [&](int i, int j) { return s.at(i, j); };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      out.x_at(i, j) = ddx(g, i, j, get);
      out.y_at(i, j) = ddy(g, i, j, get);
    }
  return out;
}

ScalarField curl(const CellVectorField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  auto getx = [&](int i, int j) { return f.x_at(i, j); };
  auto gety = [&](int i, int j) { return f.y_at(i, j); };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.at(i, j) = ddx(g, i, j, gety) - ddy(g, i, j, getx);
  return out;
}

ScalarField divergence(const CellVectorField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  auto getx = [&](int i, int j) { return f.x_at(i, j); };
  auto gety = [&](int i, int j) { return f.y_at(i, j); };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.at(i, j) = ddx(g, i, j, getx) + ddy(g, i, j, gety);
  return out;
}

ScalarField face_divergence(const FaceField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.at(i, j) = (f.fx_at(i + 1, j) - f.fx_at(i, j)) / g.hx +
                     (f.fy_at(i, j + 1) - f.fy_at(i, j)) / g.hy;
  return out;
}

CellVectorField face_to_center(const FaceField& f) {
  const Grid& g = f.grid;
  CellVectorField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      out.x_at(i, j) = 0.5 * (f.fx_at(i, j) + f.fx_at(i + 1, j));
      out.y_at(i, j) = 0.5 * (f.fy_at(i, j) + f.fy_at(i, j + 1));
    }
  return out;
}

namespace {

struct BilinearStencil {
  int i0, j0, i1, j1;
  double wx, wy;  // weight of the (i1, j1) corner along each axis
};

BilinearStencil locate(const Grid& g, double x, double y) {
  double sx = (x - g.domain.x_min) / g.hx - 0.5;
  double sy = (y - g.domain.y_min) / g.hy - 0.5;
  sx = std::clamp(sx, 0.0, static_cast<double>(g.nx - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(g.ny - 1));
  int i0 = std::min(static_cast<int>(sx), g.nx - 2);
  int j0 = std::min(static_cast<int>(sy), g.ny - 2);
  return {i0, j0, i0 + 1, j0 + 1, sx - i0, sy - j0};
}

}  // namespace

double bilinear(const ScalarField& s, double x, double y) {
  BilinearStencil st = locate(s.grid, x, y);
  double a = s.at(st.i0, st.j0) * (1 - st.wx) + s.at(st.i1, st.j0) * st.wx;
  double b = s.at(st.i0, st.j1) * (1 - st.wx) + s.at(st.i1, st.j1) * st.wx;
  return a * (1 - st.wy) + b * st.wy;
}

Vec2 bilinear(const CellVectorField& f, double x, double y) {
  BilinearStencil st = locate(f.grid, x, y);
  auto lerp = [&](const std::vector<double>& c) {
    const Grid& g = f.grid;
    double a = c[g.idx(st.i0, st.j0)] * (1 - st.wx) + c[g.idx(st.i1, st.j0)] * st.wx;
    double b = c[g.idx(st.i0, st.j1)] * (1 - st.wx) + c[g.idx(st.i1, st.j1)] * st.wx;
    return a * (1 - st.wy) + b * st.wy;
  };
  return {lerp(f.vx), lerp(f.vy)};
}

double cell_integral(const ScalarField& s) {
  double sum = 0.0;
  for (double v : s.v) sum += v;
  return sum * s.grid.cell_area();
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace eprbound
