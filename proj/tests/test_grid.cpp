#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "eprbound/grid.hpp"
#include "eprbound/io.hpp"

using namespace eprbound;

namespace {

ScalarField sample(const Grid& g, double (*f)(double, double)) {
  ScalarField s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s.at(i, j) = f(g.x_center(i), g.y_center(j));
  return s;
}

}  // namespace

TEST_CASE("grid geometry") {
  Grid g(Domain{-2, 2, 0, 1}, 8, 16);
  CHECK(g.hx == doctest::Approx(0.5));
  CHECK(g.hy == doctest::Approx(0.0625));
  CHECK(g.x_center(0) == doctest::Approx(-1.75));
  CHECK(g.x_node(8) == doctest::Approx(2.0));
  CHECK(g.cells() == 128);
  CHECK_THROWS_AS(Grid(Domain{2, -2, 0, 1}, 8, 8), ConfigError);
  CHECK_THROWS_AS(Grid(Domain{0, 1, 0, 1}, 1, 8), ConfigError);
}

TEST_CASE("gradient is second order including the boundary stencils") {
  auto f = [](double x, double y) { return std::sin(x) * std::exp(0.5 * y); };
  auto fx = [](double x, double y) { return std::cos(x) * std::exp(0.5 * y); };
  auto fy = [](double x, double y) { return 0.5 * std::sin(x) * std::exp(0.5 * y); };
  double prev = 0.0;
  for (int n : {32, 64, 128}) {
    Grid g(Domain{-1, 1, -1, 1}, n, n);
    CellVectorField grad = gradient(sample(g, f));
    double err = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        err = std::fmax(err, std::fabs(grad.x_at(i, j) - fx(g.x_center(i), g.y_center(j))));
        err = std::fmax(err, std::fabs(grad.y_at(i, j) - fy(g.x_center(i), g.y_center(j))));
      }
    if (prev > 0.0) CHECK(std::log2(prev / err) > 1.8);
    prev = err;
  }
}

TEST_CASE("curl of a gradient field vanishes") {
  // The x- and y-stencils act on different tensor indices (the one-sided
  // variants switch on their own axis only), so curl(grad f) cancels exactly
  // up to rounding on every grid.
  auto f = [](double x, double y) { return std::exp(-(x * x + 2 * y * y)) + 0.3 * x * y; };
  for (int n : {32, 64, 128}) {
    Grid g(Domain{-1.5, 1.5, -1.5, 1.5}, n, n);
    CellVectorField grad = gradient(sample(g, f));
    double scale = std::fmax(max_abs(grad.vx), max_abs(grad.vy)) / std::fmin(g.hx, g.hy);
    ScalarField c = curl(grad);
    double l2 = 0.0;
    for (double v : c.v) l2 += v * v;
    l2 = std::sqrt(l2 * g.cell_area());
    CHECK(l2 < 1e-12 * scale);
  }
}

TEST_CASE("face divergence telescopes to zero total for zero-trace fields") {
  Grid g(Domain{0, 1, 0, 2}, 12, 9);
  FaceField f(g);
  std::uint64_t s = 99;
  auto next = [&s] {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<double>(s >> 11) * 0x1p-53 - 0.5;
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) f.fx_at(i, j) = next();
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f.fy_at(i, j) = next();
  ScalarField div = face_divergence(f);
  double total = 0.0;
  for (double v : div.v) total += v;
  CHECK(std::fabs(total * g.cell_area()) < 1e-12);
}

TEST_CASE("bilinear interpolation reproduces affine fields exactly") {
  Grid g(Domain{-1, 3, 2, 4}, 16, 8);
  ScalarField s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s.at(i, j) = 2.0 * g.x_center(i) - 0.5 * g.y_center(j) + 1.0;
  CHECK(bilinear(s, 0.3, 2.7) == doctest::Approx(2.0 * 0.3 - 0.5 * 2.7 + 1.0));
  CHECK(bilinear(s, g.x_center(3), g.y_center(5)) == doctest::Approx(s.at(3, 5)));
}

TEST_CASE("binary density files round-trip bit-exactly") {
  Grid g(Domain{-6, 6, -6, 6}, 16, 16);
  ScalarField rho(g);
  for (int c = 0; c < g.cells(); ++c)
    rho.v[static_cast<std::size_t>(c)] = std::exp(-0.037 * c) + 1e-7 * c;
  auto path = std::filesystem::temp_directory_path() / "eprbound_test_rho.bin";
  write_rho_binary(path, rho);
  ScalarField back = read_rho_binary(path);
  REQUIRE(back.grid.nx == g.nx);
  CHECK(back.grid.domain.x_min == g.domain.x_min);
  for (std::size_t k = 0; k < rho.v.size(); ++k) CHECK(back.v[k] == rho.v[k]);
  std::filesystem::remove(path);
}

TEST_CASE("csv doubles are 17-significant-digit round-trippable") {
  double v = 1.0 / 3.0;
  CHECK(std::stod(csv_double(v)) == v);
  CHECK(std::stod(csv_double(6.02e23)) == 6.02e23);
  CHECK(csv_double(2.0) == "2");
}
