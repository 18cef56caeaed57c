#include "cofrk/basis.hpp"

#include <algorithm>
#include <cmath>

namespace cofrk {

double bisquare(double r) {
  if (r < 0.0) throw std::invalid_argument("bisquare: negative scaled distance");
  if (r > 1.0) return 0.0;
  const double t = 1.0 - r * r;
  return t * t;
}

BasisSystem build_basis(const Rect& domain, const std::vector<BasisLevelSpec>& spec) {
  if (spec.empty()) throw std::invalid_argument("build_basis: no levels");
  BasisSystem basis;
  basis.domain = domain;
  double prev_scale = std::numeric_limits<double>::infinity();
  for (const BasisLevelSpec& s : spec) {
    if (s.lattice < 1) throw std::invalid_argument("build_basis: lattice size must be positive");
    if (s.scale <= 0.0) throw std::invalid_argument("build_basis: scale must be positive");
    if (s.scale >= prev_scale)
      throw std::invalid_argument("build_basis: scales must decrease strictly from coarse to fine");
    prev_scale = s.scale;

    BasisLevel level;
    level.lattice = s.lattice;
    level.scale = s.scale;
    level.centroids.reserve(static_cast<size_t>(s.lattice) * s.lattice);
    const double dx = domain.width() / s.lattice;
    const double dy = domain.height() / s.lattice;
    for (int iy = 0; iy < s.lattice; ++iy)
      for (int ix = 0; ix < s.lattice; ++ix)
        level.centroids.emplace_back(domain.x_min + (ix + 0.5) * dx,
                                     domain.y_min + (iy + 0.5) * dy);
    basis.levels.push_back(std::move(level));
  }
  return basis;
}

BasisSystem build_default_basis(const Rect& domain) {
  const double stretch = std::max(domain.width(), domain.height());
  return build_basis(domain, {{3, 0.936 * stretch}, {9, 0.234 * stretch}});
}

SpMat build_phi(const BauGrid& grid, const BasisSystem& basis) {
  std::vector<Triplet> trips;
  const int n_bau = grid.size();
  int col0 = 0;
  for (const BasisLevel& level : basis.levels) {
    for (int r = 0; r < level.size(); ++r) {
      const auto [bx, by] = level.centroids[r];
      for (const BauCell& c : grid.cells) {
        const double d = std::hypot(c.cx - bx, c.cy - by) / level.scale;
        if (d <= 1.0) {
          const double v = bisquare(d);
          if (v != 0.0) trips.emplace_back(c.id, col0 + r, v);
        }
      }
    }
    col0 += level.size();
  }
  SpMat phi(n_bau, basis.total_size());
  phi.setFromTriplets(trips.begin(), trips.end());
  phi.makeCompressed();
  return phi;
}

Vector eval_basis_at(const BasisSystem& basis, double x, double y) {
  Vector row = Vector::Zero(basis.total_size());
  int col0 = 0;
  for (const BasisLevel& level : basis.levels) {
    for (int r = 0; r < level.size(); ++r) {
      const auto [bx, by] = level.centroids[r];
      const double d = std::hypot(x - bx, y - by) / level.scale;
      if (d <= 1.0) row[col0 + r] = bisquare(d);
    }
    col0 += level.size();
  }
  return row;
}

}  // namespace cofrk
