#include "cofrk/geometry.hpp"

#include <cmath>

namespace cofrk {

int BauGrid::cell_containing(double x, double y) const {
  if (!bounds.contains(x, y)) return -1;
  // Half-open cells [x0, x1) put an edge point into the right/upper cell,
  // which is the larger row-major index; the top domain edge clamps back.
  int ix = static_cast<int>(std::floor((x - bounds.x_min) / dx()));
  int iy = static_cast<int>(std::floor((y - bounds.y_min) / dy()));
  if (ix >= nx) ix = nx - 1;
  if (iy >= ny) iy = ny - 1;
  return iy * nx + ix;
}

BauGrid build_bau_grid(const Rect& bounds, int nx, int ny) {
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("build_bau_grid: cell counts must be positive");
  if (bounds.x_max <= bounds.x_min || bounds.y_max <= bounds.y_min)
    throw std::invalid_argument("build_bau_grid: degenerate bounds");

  BauGrid grid;
  grid.bounds = bounds;
  grid.nx = nx;
  grid.ny = ny;
  grid.cells.reserve(static_cast<size_t>(nx) * ny);
  const double dx = bounds.width() / nx;
  const double dy = bounds.height() / ny;
  const double area = dx * dy;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      BauCell c;
      c.id = iy * nx + ix;
      c.cx = bounds.x_min + (ix + 0.5) * dx;
      c.cy = bounds.y_min + (iy + 0.5) * dy;
      c.area = area;
      grid.cells.push_back(c);
    }
  }
  return grid;
}

namespace {

AggregationMatrix build_aggregation(const BauGrid& grid,
                                    const std::vector<Footprint>& targets,
                                    const char* what) {
  std::vector<Triplet> trips;
  const int n_bau = grid.size();
  for (size_t m = 0; m < targets.size(); ++m) {
    const Footprint& f = targets[m];
    if (f.kind == Footprint::Kind::Point) {
      const int b = grid.cell_containing(f.x, f.y);
      if (b < 0)
        throw std::invalid_argument(std::string(what) + ": footprint " +
                                    std::to_string(f.id) +
                                    " lies outside the BAU grid");
      trips.emplace_back(static_cast<int>(m), b, 1.0);
      continue;
    }
    // Centroid inclusion with area weights; rows normalized below.
    double total = 0.0;
    std::vector<std::pair<int, double>> hits;
    for (const BauCell& c : grid.cells) {
      if (f.rect.contains(c.cx, c.cy)) {
        hits.emplace_back(c.id, c.area);
        total += c.area;
      }
    }
    if (hits.empty())
      throw std::invalid_argument(std::string(what) + ": footprint " +
                                  std::to_string(f.id) +
                                  " contains no BAU centroid");
    for (const auto& [b, w] : hits)
      trips.emplace_back(static_cast<int>(m), b, w / total);
  }
  AggregationMatrix agg;
  agg.weights = SpMat(static_cast<int>(targets.size()), n_bau);
  agg.weights.setFromTriplets(trips.begin(), trips.end());
  agg.weights.makeCompressed();
  return agg;
}

}  // namespace

AggregationMatrix build_obs_aggregation(const BauGrid& grid,
                                        const std::vector<Footprint>& footprints) {
  return build_aggregation(grid, footprints, "build_obs_aggregation");
}

AggregationMatrix build_pred_aggregation(const BauGrid& grid,
                                         const std::vector<Footprint>& regions) {
  return build_aggregation(grid, regions, "build_pred_aggregation");
}

}  // namespace cofrk
