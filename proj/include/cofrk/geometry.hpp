#pragma once

#include <string>
#include <vector>

#include "cofrk/types.hpp"

namespace cofrk {

struct Rect {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

struct BauCell {
  int id = 0;
  double cx = 0.0, cy = 0.0;
  double area = 0.0;
};

/// Regular partition of a rectangular domain into nx*ny disjoint cells.
/// Cell ids are row-major: id = iy*nx + ix, and equal the cell's row index
/// in every matrix built over the grid.
struct BauGrid {
  Rect bounds;
  int nx = 0, ny = 0;
  std::vector<BauCell> cells;

  int size() const { return nx * ny; }
  double dx() const { return bounds.width() / nx; }
  double dy() const { return bounds.height() / ny; }

  /// Id of the cell containing (x, y). Points on a shared cell edge go to
  /// the cell with the larger row-major index; points outside return -1.
  int cell_containing(double x, double y) const;
};

BauGrid build_bau_grid(const Rect& bounds, int nx, int ny);

/// A measurement support: either a point or an axis-aligned rectangle.
struct Footprint {
  enum class Kind { Point, Rectangle };

  int id = 0;
  Kind kind = Kind::Point;
  double x = 0.0, y = 0.0;  // point coordinates
  Rect rect;                // rectangle geometry
  int process_id = 0;

  static Footprint point(int id, double x, double y, int process_id = 0) {
    Footprint f;
    f.id = id;
    f.kind = Kind::Point;
    f.x = x;
    f.y = y;
    f.process_id = process_id;
    return f;
  }
  static Footprint rectangle(int id, const Rect& r, int process_id = 0) {
    Footprint f;
    f.id = id;
    f.kind = Kind::Rectangle;
    f.rect = r;
    f.process_id = process_id;
    return f;
  }
};

/// Sparse row-stochastic map from BAUs to footprints or prediction regions.
/// Every row has at least one entry and sums to one.
struct AggregationMatrix {
  SpMat weights;  // rows x n_bau

  Eigen::Index rows() const { return weights.rows(); }
  Eigen::Index cols() const { return weights.cols(); }
};

/// Row m holds area-proportional weights over the BAUs whose centroid lies
/// inside footprint m. A footprint covering no centroid is an error.
AggregationMatrix build_obs_aggregation(const BauGrid& grid,
                                        const std::vector<Footprint>& footprints);

/// Same construction for prediction regions.
AggregationMatrix build_pred_aggregation(const BauGrid& grid,
                                         const std::vector<Footprint>& regions);

}  // namespace cofrk
