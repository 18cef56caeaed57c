#pragma once

#include <random>
#include <vector>

#include "cofrk/em.hpp"
#include "cofrk/simulate.hpp"

namespace cofrk::test {

/// Small random-but-valid instance for the oracle comparisons: a coarse BAU
/// grid, a two-level basis, point observations for each process.
struct SmallInstance {
  BauGrid grid;
  BasisSystem basis;
  SpMat phi;
  Matrix f_bau;
  ModelParams params;
  StackedModel model;
  LatentPrecision prec;
};

inline SmallInstance make_small_instance(std::mt19937_64& rng, int p, int n_per_process,
                                         bool with_intercept = false,
                                         bool default_basis = false) {
  SmallInstance inst;
  inst.grid = build_bau_grid({0.0, 1.0, 0.0, 1.0}, 6, 6);
  inst.basis = default_basis
                   ? build_default_basis(inst.grid.bounds)
                   : build_basis(inst.grid.bounds, {{2, 0.9}, {3, 0.45}});
  inst.phi = build_phi(inst.grid, inst.basis);

  const int q = with_intercept ? 1 : 0;
  inst.f_bau = with_intercept ? Matrix::Ones(inst.grid.size(), 1) : Matrix(inst.grid.size(), 0);

  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::uniform_real_distribution<double> u_sigma(0.3, 1.5);
  std::uniform_real_distribution<double> u_rho(-0.4, 0.9);
  std::normal_distribution<double> normal(0.0, 1.0);

  inst.params = ModelParams::make(p, q);
  for (int j = 0; j < p; ++j) {
    inst.params.sigma2_s[j] = u_sigma(rng);
    inst.params.sigma2_xi[j] = 0.05 * u_sigma(rng);
    inst.params.sigma2_eps[j] = 0.01 * u_sigma(rng);
  }
  if (p >= 2) {
    inst.params.r0 = u_rho(rng);
    inst.params.r1 = 0.4;
  }
  inst.params.kappa0 = 0.2;
  if (with_intercept)
    for (int j = 0; j < p; ++j) inst.params.beta(j, 0) = normal(rng);

  std::vector<std::vector<Footprint>> footprints(p);
  std::vector<Vector> values(p);
  for (int j = 0; j < p; ++j) {
    values[j] = Vector(n_per_process);
    for (int m = 0; m < n_per_process; ++m) {
      footprints[j].push_back(Footprint::point(m, unit(rng), unit(rng), j));
      values[j][m] = normal(rng);
    }
  }
  inst.model = build_stacked_model(inst.grid, inst.phi, inst.f_bau, footprints, values,
                                   inst.params);
  inst.prec = build_precision(inst.params, inst.basis);
  return inst;
}

/// Brute-force conditional moments of c | Z from the dense joint Gaussian.
struct DenseConditional {
  Vector mu;
  Matrix sigma;
};

inline DenseConditional dense_conditional_oracle(const SmallInstance& inst) {
  const Matrix k = build_k_dense(inst.params, inst.basis);
  const Matrix phi = Matrix(inst.model.phi_design);
  const Matrix d = dense_noise(inst.model, inst.params);
  const Matrix sigma_z = phi * k * phi.transpose() + d;
  const Matrix cross = k * phi.transpose();  // Cov(c, Z)
  const Vector e = inst.model.residual(inst.params.beta);
  const Matrix solve = sigma_z.llt().solve(cross.transpose()).transpose();  // K Phi^T Sigma_Z^-1
  DenseConditional out;
  out.mu = solve * e;
  out.sigma = k - solve * cross.transpose();
  return out;
}

}  // namespace cofrk::test
