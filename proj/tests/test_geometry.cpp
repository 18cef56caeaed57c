#include <doctest.h>

#include "cofrk/geometry.hpp"

using namespace cofrk;

TEST_CASE("build_bau_grid basics") {
  SUBCASE("2x2 unit square") {
    const BauGrid grid = build_bau_grid({0, 1, 0, 1}, 2, 2);
    REQUIRE(grid.size() == 4);
    for (const BauCell& c : grid.cells) CHECK(c.area == doctest::Approx(0.25));
    CHECK(grid.cells[0].cx == doctest::Approx(0.25));
    CHECK(grid.cells[0].cy == doctest::Approx(0.25));
    CHECK(grid.cells[1].cx == doctest::Approx(0.75));
    CHECK(grid.cells[1].cy == doctest::Approx(0.25));
    CHECK(grid.cells[2].cx == doctest::Approx(0.25));
    CHECK(grid.cells[2].cy == doctest::Approx(0.75));
    CHECK(grid.cells[3].cx == doctest::Approx(0.75));
    CHECK(grid.cells[3].cy == doctest::Approx(0.75));
    for (int i = 0; i < 4; ++i) CHECK(grid.cells[i].id == i);
  }
  SUBCASE("single cell") {
    const BauGrid grid = build_bau_grid({0, 1, 0, 1}, 1, 1);
    REQUIRE(grid.size() == 1);
    CHECK(grid.cells[0].area == doctest::Approx(1.0));
    CHECK(grid.cells[0].cx == doctest::Approx(0.5));
    CHECK(grid.cells[0].cy == doctest::Approx(0.5));
  }
  SUBCASE("rectangular domain") {
    const BauGrid grid = build_bau_grid({0, 2, 0, 1}, 2, 1);
    REQUIRE(grid.size() == 2);
    CHECK(grid.cells[0].area == doctest::Approx(1.0));
    CHECK(grid.cells[1].area == doctest::Approx(1.0));
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(build_bau_grid({0, 1, 0, 1}, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_bau_grid({0, 1, 0, 1}, 2, -1), std::invalid_argument);
    CHECK_THROWS_AS(build_bau_grid({1, 1, 0, 1}, 2, 2), std::invalid_argument);
  }
}

TEST_CASE("point containment and edge tie-break") {
  const BauGrid grid = build_bau_grid({0, 1, 0, 1}, 2, 2);
  CHECK(grid.cell_containing(0.1, 0.1) == 0);
  CHECK(grid.cell_containing(0.9, 0.1) == 1);
  CHECK(grid.cell_containing(0.1, 0.9) == 2);
  // Shared edges go to the larger row-major index.
  CHECK(grid.cell_containing(0.5, 0.1) == 1);
  CHECK(grid.cell_containing(0.1, 0.5) == 2);
  CHECK(grid.cell_containing(0.5, 0.5) == 3);
  // Domain boundary clamps back inside.
  CHECK(grid.cell_containing(1.0, 1.0) == 3);
  CHECK(grid.cell_containing(1.5, 0.5) == -1);
}

TEST_CASE("build_obs_aggregation") {
  const BauGrid grid = build_bau_grid({0, 1, 0, 1}, 2, 2);
  SUBCASE("point footprint is an indicator row") {
    const auto agg = build_obs_aggregation(grid, {Footprint::point(0, 0.75, 0.75)});
    REQUIRE(agg.rows() == 1);
    CHECK(agg.weights.coeff(0, 3) == doctest::Approx(1.0));
    CHECK(agg.weights.row(0).sum() == doctest::Approx(1.0));
  }
  SUBCASE("rectangle covering everything averages equally") {
    const auto agg = build_obs_aggregation(grid, {Footprint::rectangle(0, {0, 1, 0, 1})});
    for (int b = 0; b < 4; ++b) CHECK(agg.weights.coeff(0, b) == doctest::Approx(0.25));
  }
  SUBCASE("bottom half covers two BAUs") {
    const auto agg = build_obs_aggregation(grid, {Footprint::rectangle(0, {0, 1, 0, 0.5})});
    CHECK(agg.weights.coeff(0, 0) == doctest::Approx(0.5));
    CHECK(agg.weights.coeff(0, 1) == doctest::Approx(0.5));
    CHECK(agg.weights.coeff(0, 2) == doctest::Approx(0.0));
    CHECK(agg.weights.coeff(0, 3) == doctest::Approx(0.0));
  }
  SUBCASE("empty footprint errors with its id") {
    try {
      build_obs_aggregation(grid, {Footprint::rectangle(7, {0.3, 0.45, 0.3, 0.45})});
      FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("7") != std::string::npos);
    }
  }
}

TEST_CASE("build_pred_aggregation") {
  const BauGrid grid = build_bau_grid({0, 1, 0, 1}, 2, 2);
  SUBCASE("single-BAU region is an indicator") {
    const auto agg = build_pred_aggregation(grid, {Footprint::rectangle(0, {0, 0.5, 0, 0.5})});
    CHECK(agg.weights.coeff(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("whole domain is uniform") {
    const auto agg = build_pred_aggregation(grid, {Footprint::rectangle(0, {0, 1, 0, 1})});
    for (int b = 0; b < 4; ++b) CHECK(agg.weights.coeff(0, b) == doctest::Approx(0.25));
  }
  SUBCASE("two half-domain regions partition the grid") {
    const auto agg = build_pred_aggregation(
        grid, {Footprint::rectangle(0, {0, 1, 0, 0.5}), Footprint::rectangle(1, {0, 1, 0.5, 1})});
    CHECK(agg.weights.coeff(0, 0) == doctest::Approx(0.5));
    CHECK(agg.weights.coeff(0, 1) == doctest::Approx(0.5));
    CHECK(agg.weights.coeff(1, 2) == doctest::Approx(0.5));
    CHECK(agg.weights.coeff(1, 3) == doctest::Approx(0.5));
    // Every BAU appears in exactly one row's support.
    Eigen::VectorXd support = Eigen::VectorXd::Zero(4);
    for (int outer = 0; outer < agg.weights.outerSize(); ++outer)
      for (SpMat::InnerIterator it(agg.weights, outer); it; ++it)
        support[it.col()] += 1.0;
    for (int b = 0; b < 4; ++b) CHECK(support[b] == doctest::Approx(1.0));
  }
}

TEST_CASE("aggregation rows are stochastic and deterministic") {
  const BauGrid grid = build_bau_grid({0, 2, 0, 3}, 5, 7);
  std::vector<Footprint> fps;
  fps.push_back(Footprint::point(0, 1.31, 2.17));
  fps.push_back(Footprint::rectangle(1, {0.1, 1.7, 0.2, 2.9}));
  fps.push_back(Footprint::rectangle(2, {0.0, 2.0, 0.0, 0.6}));
  const auto a = build_obs_aggregation(grid, fps);
  const auto b = build_obs_aggregation(grid, fps);
  for (int m = 0; m < a.rows(); ++m) {
    CHECK(std::abs(a.weights.row(m).sum() - 1.0) < 1e-12);
  }
  for (int outer = 0; outer < a.weights.outerSize(); ++outer)
    for (SpMat::InnerIterator it(a.weights, outer); it; ++it) {
      CHECK(it.value() >= 0.0);
      CHECK(it.value() <= 1.0);
      CHECK(it.value() == b.weights.coeff(it.row(), it.col()));
    }
}
