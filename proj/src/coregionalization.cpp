#include "cofrk/coregionalization.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

namespace cofrk {

Vector alpha_weights(double nu, int n_levels) {
  if (nu <= 0.0) throw std::invalid_argument("alpha_weights: nu must be positive");
  if (n_levels < 1) throw std::invalid_argument("alpha_weights: need at least one level");
  Vector alpha(n_levels);
  for (int l = 0; l < n_levels; ++l) alpha[l] = std::pow(2.0, -2.0 * nu * (l + 1));
  alpha /= alpha.sum();
  return alpha;
}

double rho_at_level(double r0, double r1, int level) {
  if (level < 1) throw std::invalid_argument("rho_at_level: levels are 1-based");
  return r0 * std::exp(-r1 * (level - 1));
}

double kappa2_at_level(double kappa0, int level) {
  if (level < 1) throw std::invalid_argument("kappa2_at_level: levels are 1-based");
  return std::exp(kappa0 * level);
}

SpMat build_sar(int nrows, int ncols, double kappa2) {
  if (nrows < 1 || ncols < 1)
    throw std::invalid_argument("build_sar: lattice dimensions must be positive");
  if (kappa2 < 0.0) throw std::invalid_argument("build_sar: kappa2 must be nonnegative");
  const int n = nrows * ncols;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(5) * n);
  for (int r = 0; r < nrows; ++r) {
    for (int c = 0; c < ncols; ++c) {
      const int i = r * ncols + c;
      trips.emplace_back(i, i, 4.0 + kappa2);
      if (r > 0) trips.emplace_back(i, i - ncols, -1.0);
      if (r + 1 < nrows) trips.emplace_back(i, i + ncols, -1.0);
      if (c > 0) trips.emplace_back(i, i - 1, -1.0);
      if (c + 1 < ncols) trips.emplace_back(i, i + 1, -1.0);
    }
  }
  SpMat b(n, n);
  b.setFromTriplets(trips.begin(), trips.end());
  b.makeCompressed();
  return b;
}

Matrix build_sigma_level(const Vector& sigma2_s, const Vector& alpha_l, double rho_l) {
  const int p = static_cast<int>(sigma2_s.size());
  if (alpha_l.size() != p)
    throw std::invalid_argument("build_sigma_level: alpha and sigma2_s sizes differ");
  for (int i = 0; i < p; ++i) {
    if (!(sigma2_s[i] > 0.0))
      throw std::invalid_argument("build_sigma_level: sigma2_s must be positive");
    if (!(alpha_l[i] > 0.0) || alpha_l[i] > 1.0)
      throw std::invalid_argument("build_sigma_level: alpha must lie in (0, 1]");
  }
  if (!rho_is_valid(rho_l, p))
    throw std::invalid_argument("build_sigma_level: rho outside the validity interval");
  Matrix sigma(p, p);
  for (int i = 0; i < p; ++i) {
    const double di = std::sqrt(alpha_l[i] * sigma2_s[i]);
    for (int j = 0; j < p; ++j) {
      const double dj = std::sqrt(alpha_l[j] * sigma2_s[j]);
      sigma(i, j) = (i == j) ? di * di : rho_l * di * dj;
    }
  }
  return sigma;
}

Matrix equicorrelation_inverse(double rho, int p) {
  if (p < 1) throw std::invalid_argument("equicorrelation_inverse: p must be >= 1");
  if (p == 1) return Matrix::Identity(1, 1);
  if (!rho_is_valid(rho, p))
    throw std::invalid_argument("equicorrelation_inverse: rho outside the validity interval");
  const double a = 1.0 / (1.0 - rho);
  const double b = rho / (1.0 + (p - 1) * rho);
  Matrix c = Matrix::Constant(p, p, -a * b);
  c.diagonal().array() += a;
  return c;
}

double equicorrelation_logdet(double rho, int p) {
  if (p == 1) return 0.0;
  return (p - 1) * std::log1p(-rho) + std::log1p((p - 1) * rho);
}

SpMat LatticeOps::sar(double kappa2) const {
  SpMat b = m;
  for (int i = 0; i < size; ++i) b.coeffRef(i, i) += kappa2;
  return b;
}

SpMat LatticeOps::sar_gram(double kappa2) const {
  SpMat b = sar(kappa2);
  SpMat gram = (b * SpMat(b.transpose())).pruned();
  gram.makeCompressed();
  return gram;
}

double LatticeOps::log_det_sar(double kappa2) const {
  Eigen::SimplicialLDLT<SpMat> ldlt(sar(kappa2));
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("LatticeOps: SAR Cholesky failed at kappa2=" + std::to_string(kappa2));
  return ldlt.vectorD().array().log().sum();
}

LatticeOps build_lattice_ops(int lattice) {
  LatticeOps ops;
  ops.size = lattice * lattice;
  ops.m = build_sar(lattice, lattice, 0.0);
  ops.m2 = (ops.m * ops.m).pruned();
  ops.m2.makeCompressed();
  return ops;
}

int coef_index(const BasisSystem& basis, int j, int l, int r) {
  return j * basis.total_size() + basis.level_offset(l) + r;
}

int level_major_index(const BasisSystem& basis, int p, int j, int l, int r) {
  return p * basis.level_offset(l) + j * basis.level_size(l) + r;
}

SpMat LatentPrecision::level_major() const {
  const int n = static_cast<int>(perm.size());
  std::vector<Triplet> trips;
  trips.reserve(q.nonZeros());
  for (int k = 0; k < q.outerSize(); ++k)
    for (SpMat::InnerIterator it(q, k); it; ++it)
      trips.emplace_back(perm[it.row()], perm[it.col()], it.value());
  SpMat lm(n, n);
  lm.setFromTriplets(trips.begin(), trips.end());
  lm.makeCompressed();
  return lm;
}

LatentPrecision build_precision(const ModelParams& params, const BasisSystem& basis) {
  params.validate();
  const int p = params.p;
  const int big_r = basis.total_size();
  const int n = p * big_r;

  LatentPrecision prec;
  prec.p = p;
  prec.perm.resize(n);
  for (int l = 0; l < basis.n_levels(); ++l) {
    prec.level_size.push_back(basis.level_size(l));
    for (int j = 0; j < p; ++j)
      for (int r = 0; r < basis.level_size(l); ++r)
        prec.perm[coef_index(basis, j, l, r)] = level_major_index(basis, p, j, l, r);
  }

  // Per-process alpha weights may differ through nu, so Sigma_l is assembled
  // from the per-process columns of the alpha table.
  Matrix alpha(p, basis.n_levels());
  for (int j = 0; j < p; ++j)
    alpha.row(j) = alpha_weights(params.nu[j], basis.n_levels()).transpose();

  std::vector<Triplet> trips;
  for (int l = 0; l < basis.n_levels(); ++l) {
    const double rho = rho_at_level(params.r0, params.r1, l + 1);
    const double kappa2 = kappa2_at_level(params.kappa0, l + 1);
    const Matrix sigma = build_sigma_level(params.sigma2_s, alpha.col(l), rho);
    const Matrix sigma_inv = sigma.llt().solve(Matrix::Identity(p, p));
    const SpMat gram = build_lattice_ops(basis.levels[l].lattice).sar_gram(kappa2);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        const double s = sigma_inv(i, j);
        if (s == 0.0) continue;
        for (int k = 0; k < gram.outerSize(); ++k)
          for (SpMat::InnerIterator it(gram, k); it; ++it)
            trips.emplace_back(coef_index(basis, i, l, static_cast<int>(it.row())),
                               coef_index(basis, j, l, static_cast<int>(it.col())),
                               s * it.value());
      }
    }
  }
  prec.q = SpMat(n, n);
  prec.q.setFromTriplets(trips.begin(), trips.end());
  prec.q.makeCompressed();
  return prec;
}

Matrix build_k_dense(const ModelParams& params, const BasisSystem& basis) {
  params.validate();
  const int p = params.p;
  const int big_r = basis.total_size();
  const int n = p * big_r;
  if (n > 2000)
    throw std::invalid_argument("build_k_dense: refusing instance with pR > 2000");

  Matrix alpha(p, basis.n_levels());
  for (int j = 0; j < p; ++j)
    alpha.row(j) = alpha_weights(params.nu[j], basis.n_levels()).transpose();

  Matrix k = Matrix::Zero(n, n);
  for (int l = 0; l < basis.n_levels(); ++l) {
    const int r_l = basis.level_size(l);
    const int off = basis.level_offset(l);
    const double rho = rho_at_level(params.r0, params.r1, l + 1);
    const double kappa2 = kappa2_at_level(params.kappa0, l + 1);
    const Matrix sigma = build_sigma_level(params.sigma2_s, alpha.col(l), rho);
    const Matrix gram = Matrix(build_lattice_ops(basis.levels[l].lattice).sar_gram(kappa2));
    const Matrix gram_inv = gram.llt().solve(Matrix::Identity(r_l, r_l));
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        k.block(i * big_r + off, j * big_r + off, r_l, r_l) = sigma(i, j) * gram_inv;
  }
  return k;
}

}  // namespace cofrk
