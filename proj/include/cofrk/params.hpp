#pragma once

#include <vector>

#include "cofrk/types.hpp"

namespace cofrk {

/// All estimable and fixed model parameters for p processes and q covariates.
/// Measurement-error scales sigma2_eps and the smoothness constants nu stay
/// fixed during estimation; heteroscedasticity weights default to ones when
/// the vectors are left empty.
struct ModelParams {
  int p = 1;
  int q = 0;
  Matrix beta;               // p x q regression coefficients
  Vector sigma2_s;           // p spatial-scale variances
  Vector nu;                 // p smoothness constants (default 0.5 each)
  double r0 = 0.0;           // cross-correlation at the coarsest level
  double r1 = 0.0;           // nonnegative decay rate across levels
  double kappa0 = 0.0;       // SAR range-decay parameter
  Vector sigma2_xi;          // p fine-scale variances
  Vector sigma2_eps;         // p measurement-error variances (fixed)
  std::vector<Vector> v_xi;  // per-process BAU weights (empty = ones)
  std::vector<Vector> v_eps; // per-process footprint weights (empty = ones)

  static ModelParams make(int p, int q = 0);

  /// Checks positivity and the equicorrelation validity interval for r0.
  void validate() const;
};

/// Margin kept from the equicorrelation validity boundaries.
inline constexpr double kRhoMargin = 1e-6;

/// Lower bound of the validity interval (-1/(p-1), 1); -inf when p == 1.
double rho_lower_bound(int p);

bool rho_is_valid(double rho, int p);

}  // namespace cofrk
