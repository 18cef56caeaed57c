#pragma once

#include "cofrk/em.hpp"
#include "cofrk/geometry.hpp"

namespace cofrk {

/// Plug-in posterior predictions of the smooth component per process:
/// BAU-level means F beta + Phi mu and variances from the posterior
/// coefficient covariance plus the fine-scale prior term.
struct PredictionResult {
  std::vector<Vector> bau_mean;      // per process, length B
  std::vector<Vector> bau_variance;  // per process, length B
  std::vector<Vector> region_mean;       // per process, one entry per region
  std::vector<Vector> region_variance;   // per process
};

PredictionResult posterior_bau(const SpMat& phi, const Matrix& f_bau,
                               const ModelParams& params, const PosteriorState& post,
                               const std::vector<Vector>& v_xi);

/// Aggregates BAU predictions to the supports in c_pred; region variances use
/// the quadratic form of the weight rows plus independent fine-scale terms.
void aggregate_predictions(PredictionResult& result, const SpMat& phi,
                           const AggregationMatrix& c_pred, const ModelParams& params,
                           const PosteriorState& post, const std::vector<Vector>& v_xi);

}  // namespace cofrk
