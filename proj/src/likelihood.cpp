#include "cofrk/likelihood.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

namespace cofrk {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

std::string param_context(const ModelParams& params) {
  std::ostringstream os;
  os << "sigma2_s=[" << params.sigma2_s.transpose() << "] sigma2_xi=["
     << params.sigma2_xi.transpose() << "] kappa0=" << params.kappa0
     << " r0=" << params.r0 << " r1=" << params.r1;
  return os.str();
}

double sparse_log_det(const SpMat& q, const ModelParams& params) {
  Eigen::SimplicialLDLT<SpMat> ldlt(q);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any())
    throw NumericalError("marginal_loglik: Cholesky of Q failed; " + param_context(params));
  return ldlt.vectorD().array().log().sum();
}

}  // namespace

CapacityParts assemble_capacity(const StackedModel& model, const LatentPrecision& prec,
                                const ModelParams& params) {
  if (prec.q.rows() != model.phi_design.cols())
    throw std::invalid_argument("assemble_capacity: Q and basis design dimensions differ");
  const StackedNoiseFactor noise = factor_noise(model, params);
  const Vector e = model.residual(params.beta);
  const Vector u = noise.solve(e);
  const Matrix y = noise.solve_dense(Matrix(model.phi_design));

  CapacityParts parts;
  parts.capacity = Matrix(prec.q) + model.phi_design.transpose() * y;
  parts.rhs = model.phi_design.transpose() * u;
  parts.quad0 = e.dot(u);
  parts.log_det_d = noise.log_det();
  return parts;
}

double marginal_loglik(const StackedModel& model, const LatentPrecision& prec,
                       const ModelParams& params) {
  const CapacityParts parts = assemble_capacity(model, prec, params);
  Eigen::LLT<Matrix> llt(parts.capacity);
  if (llt.info() != Eigen::Success)
    throw NumericalError("marginal_loglik: capacity matrix not positive definite; " +
                         param_context(params));
  double log_det_cap = 0.0;
  for (int i = 0; i < parts.capacity.rows(); ++i)
    log_det_cap += 2.0 * std::log(llt.matrixLLT()(i, i));

  const double log_det_q = sparse_log_det(prec.q, params);
  const double quad = parts.quad0 - parts.rhs.dot(llt.solve(parts.rhs));
  const double log_det_sigma = parts.log_det_d - log_det_q + log_det_cap;
  return -0.5 * (model.n_total() * kLog2Pi + log_det_sigma + quad);
}

double dense_loglik_oracle(const StackedModel& model, const Matrix& k_dense,
                           const ModelParams& params) {
  const int n = model.n_total();
  if (n > 500)
    throw std::invalid_argument("dense_loglik_oracle: refusing instance with N > 500");
  const Matrix phi = Matrix(model.phi_design);
  Matrix sigma_z = phi * k_dense * phi.transpose() + dense_noise(model, params);
  Eigen::LLT<Matrix> llt(sigma_z);
  if (llt.info() != Eigen::Success)
    throw NumericalError("dense_loglik_oracle: Sigma_Z not positive definite; " +
                         param_context(params));
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixLLT()(i, i));
  const Vector e = model.residual(params.beta);
  const double quad = e.dot(llt.solve(e));
  return -0.5 * (n * kLog2Pi + log_det + quad);
}

}  // namespace cofrk
