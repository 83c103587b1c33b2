#include <doctest.h>

#include <cmath>
#include <vector>

#include "rescade/errors.hpp"
#include "rescade/grid.hpp"

using rescade::Grid;

TEST_CASE("uniform grid hits both endpoints and the exact lattice values") {
  const Grid g = Grid::uniform(1, 5);
  REQUIRE(g.dims() == 1);
  REQUIRE(g.size() == 5);
  const std::vector<double> want{-1.0, -0.5, 0.0, 0.5, 1.0};
  for (int i = 0; i < 5; ++i) CHECK(g.axis(0)[i] == want[i]);
}

TEST_CASE("index order is lexicographic with the last axis fastest") {
  const Grid g = Grid::from_axes({{-1.0, 1.0}, {0.0, 0.25, 0.5}});
  REQUIRE(g.size() == 6);
  std::size_t idx = 0;
  for (double a : {-1.0, 1.0}) {
    for (double b : {0.0, 0.25, 0.5}) {
      const std::vector<double> p = g.point(idx);
      CHECK(p[0] == a);
      CHECK(p[1] == b);
      ++idx;
    }
  }
  // for_each must agree with point() on every index.
  g.for_each([&](std::size_t i, std::span<const double> pt) {
    const std::vector<double> p = g.point(i);
    CHECK(pt[0] == p[0]);
    CHECK(pt[1] == p[1]);
  });
}

TEST_CASE("from_axes rejects unsorted or empty axes") {
  CHECK_THROWS_AS(Grid::from_axes({{0.0, 0.0}}), rescade::InvalidArgumentError);
  CHECK_THROWS_AS(Grid::from_axes({{1.0, -1.0}}),
                  rescade::InvalidArgumentError);
  CHECK_THROWS_AS(Grid::from_axes({}), rescade::InvalidArgumentError);
  CHECK_THROWS_AS(Grid::from_axes({{}}), rescade::InvalidArgumentError);
}

TEST_CASE("lattice size cap fails fast") {
  CHECK_THROWS_AS(Grid::uniform(3, 5000), rescade::ResourceExhaustedError);
  CHECK_THROWS_AS(Grid::uniform(2, 100, /*max_points=*/64),
                  rescade::ResourceExhaustedError);
  CHECK_NOTHROW(Grid::uniform(2, 8, /*max_points=*/64));
}

TEST_CASE("uniform grid needs at least two points per axis") {
  CHECK_THROWS_AS(Grid::uniform(1, 1), rescade::InvalidArgumentError);
  CHECK_THROWS_AS(Grid::uniform(0, 5), rescade::InvalidArgumentError);
}

TEST_CASE("sup_norm_diff finds the max and checks finiteness") {
  const Grid g = Grid::uniform(1, 5);
  const auto sq = [](std::span<const double> x) { return x[0] * x[0]; };
  const auto zero = [](std::span<const double>) { return 0.0; };
  CHECK(rescade::sup_norm_diff(sq, zero, g) == 1.0);
  CHECK(rescade::sup_norm(sq, g) == 1.0);

  const auto bad = [](std::span<const double> x) { return 1.0 / x[0]; };
  CHECK_THROWS_AS(rescade::sup_norm_diff(bad, zero, g),
                  rescade::InvalidOracleError);
}

TEST_CASE("lipschitz estimate is exact for linear functions") {
  const Grid g = Grid::uniform(1, 101);
  const auto lin = [](std::span<const double> x) { return 3.0 * x[0]; };
  CHECK(rescade::estimate_lipschitz(lin, g) == doctest::Approx(3.0).epsilon(1e-12));

  // Secant slopes never exceed the true constant (mean value theorem); for a
  // fine grid they also get close to it.
  const Grid fine = Grid::uniform(1, 1025);
  const auto sq = [](std::span<const double> x) { return x[0] * x[0]; };
  const double est = rescade::estimate_lipschitz(sq, fine);
  CHECK(est <= 2.0 + 1e-12);
  CHECK(est > 1.99);
}

TEST_CASE("lipschitz estimate needs three points per axis") {
  const Grid g = Grid::uniform(1, 2);
  const auto lin = [](std::span<const double> x) { return x[0]; };
  CHECK_THROWS_AS(rescade::estimate_lipschitz(lin, g),
                  rescade::InvalidArgumentError);
}

TEST_CASE("2d lipschitz estimate sees both axes") {
  const Grid g = Grid::uniform(2, 33);
  const auto f = [](std::span<const double> x) { return 0.25 * x[1]; };
  CHECK(rescade::estimate_lipschitz(f, g) ==
        doctest::Approx(0.25).epsilon(1e-12));
}
