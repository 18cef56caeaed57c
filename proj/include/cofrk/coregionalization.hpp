#pragma once

#include <vector>

#include "cofrk/basis.hpp"
#include "cofrk/params.hpp"
#include "cofrk/types.hpp"

namespace cofrk {

/// Proportions of process variance per level, alpha_l proportional to
/// 2^(-2*nu*l) and normalized to sum to one.
Vector alpha_weights(double nu, int n_levels);

/// Cross-process correlation at level l (1-based): r0 * exp(-r1*(l-1)).
double rho_at_level(double r0, double r1, int level);

/// SAR stiffness at level l (1-based): exp(kappa0 * l).
double kappa2_at_level(double kappa0, int level);

/// SAR matrix on an nrows x ncols lattice: diagonal 4 + kappa2, -1 on rook
/// neighbor links, no wraparound. Nodes are row-major.
SpMat build_sar(int nrows, int ncols, double kappa2);

/// Cross-process covariance at one level: Sigma_l = D R(rho) D with
/// D = diag(sqrt(alpha_i * sigma2_s_i)).
Matrix build_sigma_level(const Vector& sigma2_s, const Vector& alpha_l, double rho_l);

/// Closed-form inverse of the p x p equicorrelation matrix:
/// (1/(1-rho)) * (I - rho/(1+(p-1)rho) * J).
Matrix equicorrelation_inverse(double rho, int p);

/// log det of the equicorrelation matrix: (p-1)log(1-rho) + log(1+(p-1)rho).
double equicorrelation_logdet(double rho, int p);

/// Fixed per-level lattice operator M = 4I - Adj, so that B(kappa2) =
/// M + kappa2*I and B*B^T = M^2 + 2*kappa2*M + kappa2^2*I.
struct LatticeOps {
  int size = 0;       // R_l
  SpMat m;            // 4I - Adj
  SpMat m2;           // M^2

  SpMat sar(double kappa2) const;          // B = M + kappa2*I
  SpMat sar_gram(double kappa2) const;     // B B^T
  double log_det_sar(double kappa2) const; // log|B| via sparse Cholesky
};

LatticeOps build_lattice_ops(int lattice);

/// Full latent precision Q = P^T (oplus_l Sigma_l^{-1} (x) B_l B_l^T) P in
/// process-major order, with the permutation kept as an index map.
struct LatentPrecision {
  SpMat q;                     // pR x pR, process-major
  std::vector<int> perm;       // process-major index -> level-major position
  std::vector<int> level_size; // R_l per level
  int p = 1;

  /// The block-diagonal level-major matrix P Q P^T.
  SpMat level_major() const;
};

/// Process-major flat index of coefficient (process j, level l, node r).
int coef_index(const BasisSystem& basis, int j, int l, int r);

/// Level-major position of the same coefficient: p*sum_{m<l} R_m + j*R_l + r.
int level_major_index(const BasisSystem& basis, int p, int j, int l, int r);

LatentPrecision build_precision(const ModelParams& params, const BasisSystem& basis);

/// Dense process-major covariance K with level blocks
/// K_{ij,l} = (Sigma_l)_{ij} (B_l B_l^T)^{-1}; testing oracle, pR <= 2000.
Matrix build_k_dense(const ModelParams& params, const BasisSystem& basis);

}  // namespace cofrk
