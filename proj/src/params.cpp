#include "cofrk/params.hpp"

#include <cmath>
#include <limits>

namespace cofrk {

ModelParams ModelParams::make(int p, int q) {
  ModelParams params;
  params.p = p;
  params.q = q;
  params.beta = Matrix::Zero(p, q);
  params.sigma2_s = Vector::Constant(p, 1.0);
  params.nu = Vector::Constant(p, 0.5);
  params.sigma2_xi = Vector::Constant(p, 0.1);
  params.sigma2_eps = Vector::Constant(p, 1e-4);
  return params;
}

double rho_lower_bound(int p) {
  if (p <= 1) return -std::numeric_limits<double>::infinity();
  return -1.0 / (p - 1);
}

bool rho_is_valid(double rho, int p) {
  if (p <= 1) return true;
  return rho >= rho_lower_bound(p) + kRhoMargin && rho <= 1.0 - kRhoMargin;
}

void ModelParams::validate() const {
  if (p < 1) throw std::invalid_argument("ModelParams: p must be >= 1");
  if (q < 0) throw std::invalid_argument("ModelParams: q must be >= 0");
  auto check_positive = [&](const Vector& v, const char* name) {
    if (v.size() != p)
      throw std::invalid_argument(std::string("ModelParams: ") + name +
                                  " must have one entry per process");
    for (int j = 0; j < p; ++j)
      if (!(v[j] > 0.0) || !std::isfinite(v[j]))
        throw std::invalid_argument(std::string("ModelParams: ") + name +
                                    " must be strictly positive (process " +
                                    std::to_string(j) + ")");
  };
  check_positive(sigma2_s, "sigma2_s");
  check_positive(sigma2_xi, "sigma2_xi");
  check_positive(sigma2_eps, "sigma2_eps");
  check_positive(nu, "nu");
  if (beta.rows() != p || beta.cols() != q)
    throw std::invalid_argument("ModelParams: beta must be p x q");
  if (p >= 2 && !rho_is_valid(r0, p))
    throw std::invalid_argument("ModelParams: r0 outside the equicorrelation validity interval");
  if (r1 < 0.0) throw std::invalid_argument("ModelParams: r1 must be nonnegative");
}

}  // namespace cofrk
