#include "cofrk/predict.hpp"

namespace cofrk {

PredictionResult posterior_bau(const SpMat& phi, const Matrix& f_bau,
                               const ModelParams& params, const PosteriorState& post,
                               const std::vector<Vector>& v_xi) {
  const int n_bau = static_cast<int>(phi.rows());
  const int big_r = static_cast<int>(phi.cols());
  PredictionResult result;
  for (int j = 0; j < params.p; ++j) {
    Vector mean = phi * post.mu.segment(j * big_r, big_r);
    if (params.q > 0) mean += f_bau * params.beta.row(j).transpose();

    // Row-wise quadratic forms against the process block of Sigma_c; the
    // B x B smooth covariance is never formed.
    const Matrix y = phi * post.sigma.block(j * big_r, j * big_r, big_r, big_r);
    Vector var = (Matrix(phi).array() * y.array()).rowwise().sum();
    const Vector& weights = (j < static_cast<int>(v_xi.size()) && v_xi[j].size() == n_bau)
                                ? v_xi[j]
                                : Vector::Ones(n_bau);
    var += params.sigma2_xi[j] * weights;
    var = var.cwiseMax(0.0);

    result.bau_mean.push_back(std::move(mean));
    result.bau_variance.push_back(std::move(var));
  }
  return result;
}

void aggregate_predictions(PredictionResult& result, const SpMat& phi,
                           const AggregationMatrix& c_pred, const ModelParams& params,
                           const PosteriorState& post, const std::vector<Vector>& v_xi) {
  const int n_bau = static_cast<int>(phi.rows());
  const int big_r = static_cast<int>(phi.cols());
  if (c_pred.cols() != n_bau)
    throw std::invalid_argument("aggregate_predictions: C_P column count must equal the BAU count");
  const int n_regions = static_cast<int>(c_pred.rows());

  result.region_mean.clear();
  result.region_variance.clear();
  const Matrix g = c_pred.weights * phi;  // rows are Phi^T w_k per region
  for (int j = 0; j < params.p; ++j) {
    Vector mean = c_pred.weights * result.bau_mean[j];

    const Matrix sigma_jj = post.sigma.block(j * big_r, j * big_r, big_r, big_r);
    const Vector& weights = (j < static_cast<int>(v_xi.size()) && v_xi[j].size() == n_bau)
                                ? v_xi[j]
                                : Vector::Ones(n_bau);
    Vector var(n_regions);
    for (int k = 0; k < n_regions; ++k) {
      const Vector gk = g.row(k).transpose();
      var[k] = gk.dot(sigma_jj * gk);
    }
    // Fine-scale variation is independent across BAUs, so region weights
    // enter squared.
    for (int outer = 0; outer < c_pred.weights.outerSize(); ++outer)
      for (SpMat::InnerIterator it(c_pred.weights, outer); it; ++it)
        var[it.row()] += params.sigma2_xi[j] * it.value() * it.value() * weights[it.col()];
    var = var.cwiseMax(0.0);

    result.region_mean.push_back(std::move(mean));
    result.region_variance.push_back(std::move(var));
  }
}

}  // namespace cofrk
