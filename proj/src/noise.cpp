#include "cofrk/noise.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

namespace cofrk {

namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

NoiseModel::NoiseModel(const SpMat& c_obs, const Vector& v_xi, const Vector& v_eps) {
  rows_ = static_cast<int>(c_obs.rows());
  if (v_xi.size() != c_obs.cols())
    throw std::invalid_argument("NoiseModel: v_xi length must equal the BAU count");
  if (v_eps.size() != rows_)
    throw std::invalid_argument("NoiseModel: v_eps length must equal the observation count");

  SpMat w = c_obs * v_xi.asDiagonal() * SpMat(c_obs.transpose());
  w.prune(0.0);
  w.makeCompressed();

  std::vector<int> parent(rows_);
  std::iota(parent.begin(), parent.end(), 0);
  for (int k = 0; k < w.outerSize(); ++k)
    for (SpMat::InnerIterator it(w, k); it; ++it) {
      const int a = find_root(parent, static_cast<int>(it.row()));
      const int b = find_root(parent, static_cast<int>(it.col()));
      if (a != b) parent[a] = b;
    }

  std::vector<int> cluster_of(rows_, -1);
  for (int i = 0; i < rows_; ++i) {
    const int root = find_root(parent, i);
    if (cluster_of[root] < 0) {
      cluster_of[root] = static_cast<int>(clusters_.size());
      clusters_.push_back({});
    }
    cluster_of[i] = cluster_of[root];
    clusters_[cluster_of[i]].rows.push_back(i);
  }

  std::vector<int> local(rows_, -1);
  for (NoiseCluster& cl : clusters_) {
    const int k = static_cast<int>(cl.rows.size());
    for (int i = 0; i < k; ++i) local[cl.rows[i]] = i;
    cl.w = Matrix::Zero(k, k);
    cl.v_eps = Vector::Zero(k);
    for (int i = 0; i < k; ++i) cl.v_eps[i] = v_eps[cl.rows[i]];
  }
  for (int k = 0; k < w.outerSize(); ++k)
    for (SpMat::InnerIterator it(w, k); it; ++it) {
      NoiseCluster& cl = clusters_[cluster_of[it.row()]];
      cl.w(local[it.row()], local[it.col()]) = it.value();
    }
}

NoiseFactor NoiseModel::factor(double sigma_xi2, double sigma_eps2) const {
  NoiseFactor f;
  f.model_ = this;
  f.llts_.reserve(clusters_.size());
  f.log_det_ = 0.0;
  for (const NoiseCluster& cl : clusters_) {
    Matrix d = sigma_xi2 * cl.w;
    d.diagonal() += sigma_eps2 * cl.v_eps;
    Eigen::LLT<Matrix> llt(d);
    if (llt.info() != Eigen::Success)
      throw NumericalError("NoiseModel: noise block not positive definite (sigma_xi2=" +
                           std::to_string(sigma_xi2) + ", sigma_eps2=" +
                           std::to_string(sigma_eps2) + ")");
    for (int i = 0; i < d.rows(); ++i)
      f.log_det_ += 2.0 * std::log(llt.matrixLLT()(i, i));
    f.llts_.push_back(std::move(llt));
  }
  return f;
}

Matrix NoiseModel::dense(double sigma_xi2, double sigma_eps2) const {
  Matrix d = Matrix::Zero(rows_, rows_);
  for (const NoiseCluster& cl : clusters_) {
    const int k = static_cast<int>(cl.rows.size());
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        d(cl.rows[i], cl.rows[j]) = sigma_xi2 * cl.w(i, j);
    for (int i = 0; i < k; ++i)
      d(cl.rows[i], cl.rows[i]) += sigma_eps2 * cl.v_eps[i];
  }
  return d;
}

Vector NoiseFactor::solve(const Vector& rhs) const {
  Vector out(rhs.size());
  const auto& clusters = model_->clusters();
  for (size_t ci = 0; ci < clusters.size(); ++ci) {
    const auto& rows = clusters[ci].rows;
    Vector slice(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) slice[static_cast<Eigen::Index>(i)] = rhs[rows[i]];
    slice = llts_[ci].solve(slice);
    for (size_t i = 0; i < rows.size(); ++i) out[rows[i]] = slice[static_cast<Eigen::Index>(i)];
  }
  return out;
}

Matrix NoiseFactor::solve(const Matrix& rhs) const {
  Matrix out(rhs.rows(), rhs.cols());
  const auto& clusters = model_->clusters();
  for (size_t ci = 0; ci < clusters.size(); ++ci) {
    const auto& rows = clusters[ci].rows;
    Matrix slice(rows.size(), rhs.cols());
    for (size_t i = 0; i < rows.size(); ++i) slice.row(static_cast<Eigen::Index>(i)) = rhs.row(rows[i]);
    slice = llts_[ci].solve(slice);
    for (size_t i = 0; i < rows.size(); ++i) out.row(rows[i]) = slice.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

Matrix NoiseFactor::solve_cluster(size_t ci, const Matrix& rhs) const {
  return llts_[ci].solve(rhs);
}

}  // namespace cofrk
