#pragma once

#include <vector>

#include "cofrk/geometry.hpp"
#include "cofrk/noise.hpp"
#include "cofrk/params.hpp"
#include "cofrk/types.hpp"

namespace cofrk {

/// Process-major stacked observation model. The basis design is
/// block-diagonal over processes, with the column blocks ordered to match
/// the process-major coefficient vector.
struct StackedModel {
  int p = 1;
  int q = 0;
  int n_bau = 0;
  int n_basis = 0;            // R
  Vector z;                   // stacked observations, length N
  SpMat f_design;             // N x (p*q); column j*q+k is covariate k of process j
  SpMat phi_design;           // N x (p*R)
  std::vector<int> offset;    // p+1 row offsets of the process blocks
  std::vector<SpMat> c_obs;   // per-process aggregation C_Z^{(j)}
  std::vector<SpMat> x_block; // per-process C_Z^{(j)} Phi
  std::vector<NoiseModel> noise;
  std::vector<Vector> v_xi;   // materialized BAU weights per process
  std::vector<Vector> v_eps;  // materialized footprint weights per process

  int n_obs(int j) const { return offset[j + 1] - offset[j]; }
  int n_total() const { return offset[p]; }

  /// z - F beta for the process-major stacking of beta's rows.
  Vector residual(const Matrix& beta) const;
};

/// Assembles the stacked model from per-process footprints and data vectors.
/// Processes may be observed on different footprints; an empty footprint list
/// marks a process as unobserved.
StackedModel build_stacked_model(const BauGrid& grid, const SpMat& phi,
                                 const Matrix& f_bau,
                                 const std::vector<std::vector<Footprint>>& footprints,
                                 const std::vector<Vector>& values,
                                 const ModelParams& params);

/// Per-process noise factors at the current variance parameters.
struct StackedNoiseFactor {
  const StackedModel* model = nullptr;
  std::vector<NoiseFactor> blocks;

  Vector solve(const Vector& rhs) const;
  Matrix solve_dense(const Matrix& rhs) const;
  double log_det() const;
};

StackedNoiseFactor factor_noise(const StackedModel& model, const ModelParams& params);

/// Dense stacked noise covariance; used by the testing oracles.
Matrix dense_noise(const StackedModel& model, const ModelParams& params);

}  // namespace cofrk
