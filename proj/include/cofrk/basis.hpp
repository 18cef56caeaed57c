#pragma once

#include <vector>

#include "cofrk/geometry.hpp"
#include "cofrk/types.hpp"

namespace cofrk {

/// Bisquare parent: (1 - r^2)^2 on [0, 1], zero beyond.
double bisquare(double r);

struct BasisLevel {
  int lattice = 0;   // lattice is lattice x lattice centroids
  double scale = 0;  // dilation applied to the parent function
  std::vector<std::pair<double, double>> centroids;  // row-major over the lattice

  int size() const { return lattice * lattice; }
};

/// Multiresolution system of lattice-centered radial basis functions,
/// coarse to fine. Columns of Phi follow level-major order within a process.
struct BasisSystem {
  Rect domain;
  std::vector<BasisLevel> levels;

  int n_levels() const { return static_cast<int>(levels.size()); }
  int level_size(int l) const { return levels[l].size(); }
  int level_offset(int l) const {
    int off = 0;
    for (int m = 0; m < l; ++m) off += levels[m].size();
    return off;
  }
  int total_size() const { return level_offset(n_levels()); }
};

struct BasisLevelSpec {
  int lattice = 0;
  double scale = 0;
};

/// Centroids sit at the centers of a lattice x lattice uniform partition of
/// the domain; scales must decrease strictly from coarse to fine.
BasisSystem build_basis(const Rect& domain, const std::vector<BasisLevelSpec>& spec);

/// Two-level default: 3x3 lattice at scale 0.936 and 9x9 at 0.234 on the unit
/// square, scales stretched proportionally for other rectangles.
BasisSystem build_default_basis(const Rect& domain);

/// B x R matrix of basis evaluations at BAU centroids, stored sparse with
/// exact zeros dropped.
SpMat build_phi(const BauGrid& grid, const BasisSystem& basis);

/// Single row of Phi evaluated at an arbitrary location.
Vector eval_basis_at(const BasisSystem& basis, double x, double y);

}  // namespace cofrk
