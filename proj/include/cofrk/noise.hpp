#pragma once

#include <vector>

#include <Eigen/Cholesky>

#include "cofrk/types.hpp"

namespace cofrk {

/// One connected block of the per-process noise covariance
/// D_j = sigma2_xi * C V_xi C^T + sigma2_eps * diag(v_eps).
/// Footprints that share no BAU fall into singleton clusters, so the blocks
/// stay tiny for point data.
struct NoiseCluster {
  std::vector<int> rows;  // row indices within the process block
  Matrix w;               // dense block of C V_xi C^T
  Vector v_eps;           // matching slice of the error weights
};

class NoiseFactor;

/// Sparsity-clustered representation of one process's noise covariance.
class NoiseModel {
public:
  NoiseModel() = default;
  NoiseModel(const SpMat& c_obs, const Vector& v_xi, const Vector& v_eps);

  int rows() const { return rows_; }
  const std::vector<NoiseCluster>& clusters() const { return clusters_; }

  NoiseFactor factor(double sigma_xi2, double sigma_eps2) const;
  Matrix dense(double sigma_xi2, double sigma_eps2) const;

private:
  int rows_ = 0;
  std::vector<NoiseCluster> clusters_;
};

/// Cholesky factors of all clusters at fixed variance parameters.
class NoiseFactor {
public:
  double log_det() const { return log_det_; }

  Vector solve(const Vector& rhs) const;
  Matrix solve(const Matrix& rhs) const;

  const NoiseModel& model() const { return *model_; }
  Matrix solve_cluster(size_t ci, const Matrix& rhs) const;

private:
  friend class NoiseModel;
  const NoiseModel* model_ = nullptr;
  std::vector<Eigen::LLT<Matrix>> llts_;
  double log_det_ = 0.0;
};

}  // namespace cofrk
