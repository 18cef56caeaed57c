#include <doctest.h>

#include "cofrk/basis.hpp"

using namespace cofrk;

TEST_CASE("bisquare parent") {
  CHECK(bisquare(0.0) == doctest::Approx(1.0));
  CHECK(bisquare(1.0) == doctest::Approx(0.0));
  CHECK(bisquare(0.5) == doctest::Approx(0.5625));
  CHECK(bisquare(2.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(bisquare(-0.1), std::invalid_argument);
}

TEST_CASE("default basis matches the two-level layout") {
  const BasisSystem basis = build_default_basis({0, 1, 0, 1});
  REQUIRE(basis.n_levels() == 2);
  CHECK(basis.level_size(0) == 9);
  CHECK(basis.level_size(1) == 81);
  CHECK(basis.total_size() == 90);
  CHECK(basis.levels[0].scale == doctest::Approx(0.936));
  CHECK(basis.levels[1].scale == doctest::Approx(0.234));

  // 3x3 lattice centroids at {1/6, 1/2, 5/6}^2, enumerated row-major.
  std::vector<double> ticks{1.0 / 6, 0.5, 5.0 / 6};
  int idx = 0;
  for (double y : ticks)
    for (double x : ticks) {
      CHECK(basis.levels[0].centroids[idx].first == doctest::Approx(x));
      CHECK(basis.levels[0].centroids[idx].second == doctest::Approx(y));
      ++idx;
    }
}

TEST_CASE("basis validation") {
  CHECK_THROWS_AS(build_basis({0, 1, 0, 1}, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_basis({0, 1, 0, 1}, {{3, 0.5}, {9, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(build_basis({0, 1, 0, 1}, {{0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(build_basis({0, 1, 0, 1}, {{3, -0.5}}), std::invalid_argument);
}

TEST_CASE("build_phi entries") {
  SUBCASE("coincident centroid gives 1, far BAU gives structural 0") {
    // Single BAU centered at (0.5, 0.5); one-function level sits exactly there.
    const BauGrid grid = build_bau_grid({0, 1, 0, 1}, 1, 1);
    const BasisSystem basis = build_basis({0, 1, 0, 1}, {{1, 0.3}});
    const SpMat phi = build_phi(grid, basis);
    CHECK(phi.coeff(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("scaled distance 0.5 gives the bisquare value") {
    const BauGrid grid = build_bau_grid({0.35, 0.65, 0.35, 0.65}, 1, 1);
    BasisSystem basis = build_basis({0, 1, 0, 1}, {{1, 0.3}});
    basis.levels[0].centroids[0] = {0.5, 0.5 + 0.15};  // offset 0.15 at scale 0.3
    const SpMat phi = build_phi(grid, basis);
    CHECK(phi.coeff(0, 0) == doctest::Approx(0.5625));
  }
  SUBCASE("support boundary and beyond stay zero") {
    const BauGrid grid = build_bau_grid({0, 1, 0, 1}, 2, 2);
    BasisSystem basis = build_basis({0, 1, 0, 1}, {{1, 0.2}});
    basis.levels[0].centroids[0] = {0.25, 0.25};
    const SpMat phi = build_phi(grid, basis);
    CHECK(phi.coeff(0, 0) == doctest::Approx(1.0));
    CHECK(phi.coeff(3, 0) == 0.0);  // distance ~0.707 >> scale
  }
}

TEST_CASE("phi block widths and coverage on the default system") {
  const BauGrid grid = build_bau_grid({0, 1, 0, 1}, 32, 32);
  const BasisSystem basis = build_default_basis(grid.bounds);
  const SpMat phi = build_phi(grid, basis);
  REQUIRE(phi.rows() == 1024);
  REQUIRE(phi.cols() == 90);

  // Every BAU is covered by at least one basis function.
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(phi.rows());
  for (int outer = 0; outer < phi.outerSize(); ++outer)
    for (SpMat::InnerIterator it(phi, outer); it; ++it) {
      CHECK(it.value() >= 0.0);
      CHECK(it.value() <= 1.0);
      row_sums[it.row()] += it.value();
    }
  for (Eigen::Index b = 0; b < row_sums.size(); ++b) CHECK(row_sums[b] > 0.0);
}

TEST_CASE("halving scales weakly decreases every entry") {
  const BauGrid grid = build_bau_grid({0, 1, 0, 1}, 8, 8);
  const BasisSystem coarse = build_basis({0, 1, 0, 1}, {{3, 0.9}, {5, 0.4}});
  BasisSystem fine = coarse;
  fine.levels[0].scale = 0.45;
  fine.levels[1].scale = 0.2;
  const Matrix full(build_phi(grid, coarse));
  const Matrix half(build_phi(grid, fine));
  CHECK(((half - full).array() <= 1e-15).all());
}
