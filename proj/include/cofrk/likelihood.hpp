#pragma once

#include "cofrk/coregionalization.hpp"
#include "cofrk/stacked_model.hpp"

namespace cofrk {

/// Shared pieces of the fixed-rank likelihood and the E-step:
/// capacity = Q + Phi^T D^-1 Phi, rhs = Phi^T D^-1 (z - F beta).
struct CapacityParts {
  Matrix capacity;     // pR x pR
  Vector rhs;          // pR
  double quad0 = 0.0;  // e^T D^-1 e
  double log_det_d = 0.0;
};

CapacityParts assemble_capacity(const StackedModel& model, const LatentPrecision& prec,
                                const ModelParams& params);

/// Marginal Gaussian log-likelihood of the stacked data via the
/// Sherman-Morrison-Woodbury identity and the matrix determinant lemma;
/// no N x N matrix is ever formed.
double marginal_loglik(const StackedModel& model, const LatentPrecision& prec,
                       const ModelParams& params);

/// Direct dense evaluation with Sigma_Z = Phi K Phi^T + D; testing oracle,
/// N <= 500.
double dense_loglik_oracle(const StackedModel& model, const Matrix& k_dense,
                           const ModelParams& params);

}  // namespace cofrk
