#include <doctest.h>

#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SparseCholesky>

#include "cofrk/coregionalization.hpp"

using namespace cofrk;

TEST_CASE("alpha_weights") {
  const Vector a = alpha_weights(0.5, 2);
  CHECK(a[0] == doctest::Approx(2.0 / 3.0));
  CHECK(a[1] == doctest::Approx(1.0 / 3.0));
  CHECK(alpha_weights(0.7, 1)[0] == doctest::Approx(1.0));
  const Vector b = alpha_weights(1.0, 2);
  CHECK(b[0] == doctest::Approx(0.8));
  CHECK(b[1] == doctest::Approx(0.2));
  CHECK(alpha_weights(0.5, 4).sum() == doctest::Approx(1.0));
  CHECK_THROWS_AS(alpha_weights(0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(alpha_weights(0.5, 0), std::invalid_argument);
}

TEST_CASE("rho_at_level and kappa2_at_level") {
  CHECK(rho_at_level(0.9, 0.5, 1) == doctest::Approx(0.9));
  CHECK(rho_at_level(0.9, 0.5, 2) == doctest::Approx(0.9 * std::exp(-0.5)).epsilon(1e-12));
  CHECK(rho_at_level(0.6, 0.0, 1) == doctest::Approx(0.6));
  CHECK(rho_at_level(0.6, 0.0, 5) == doctest::Approx(0.6));
  CHECK(kappa2_at_level(0.0, 3) == doctest::Approx(1.0));
  CHECK(kappa2_at_level(0.4, 1) == doctest::Approx(1.49182).epsilon(1e-5));
  CHECK(kappa2_at_level(0.05, 2) == doctest::Approx(1.10517).epsilon(1e-5));
  // rho is non-increasing in level for nonnegative r0, r1.
  for (int l = 1; l < 5; ++l)
    CHECK(rho_at_level(0.8, 0.3, l + 1) <= rho_at_level(0.8, 0.3, l));
}

TEST_CASE("build_sar") {
  SUBCASE("1x2 lattice") {
    const Matrix b(build_sar(1, 2, 1.0));
    CHECK(b(0, 0) == doctest::Approx(5.0));
    CHECK(b(1, 1) == doctest::Approx(5.0));
    CHECK(b(0, 1) == doctest::Approx(-1.0));
    CHECK(b(1, 0) == doctest::Approx(-1.0));
  }
  SUBCASE("1x1 lattice") {
    const Matrix b(build_sar(1, 1, 0.25));
    CHECK(b(0, 0) == doctest::Approx(4.25));
  }
  SUBCASE("2x2 lattice rook adjacency") {
    const Matrix b(build_sar(2, 2, 0.0));
    for (int i = 0; i < 4; ++i) CHECK(b(i, i) == doctest::Approx(4.0));
    // Each corner node of the 2x2 lattice has exactly two rook neighbors.
    for (int i = 0; i < 4; ++i) {
      int neighbors = 0;
      for (int j = 0; j < 4; ++j)
        if (i != j && b(i, j) != 0.0) {
          CHECK(b(i, j) == doctest::Approx(-1.0));
          ++neighbors;
        }
      CHECK(neighbors == 2);
    }
    // Diagonal pairs (0,3) and (1,2) are not neighbors.
    CHECK(b(0, 3) == 0.0);
    CHECK(b(1, 2) == 0.0);
  }
  SUBCASE("symmetry and diagonal dominance on a larger lattice") {
    const SpMat b = build_sar(4, 5, 0.3);
    const Matrix bd(b);
    CHECK((bd - bd.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    for (int i = 0; i < bd.rows(); ++i) {
      double off = 0.0;
      for (int j = 0; j < bd.cols(); ++j)
        if (i != j) off += std::abs(bd(i, j));
      CHECK(bd(i, i) > off);
    }
  }
}

TEST_CASE("build_sigma_level") {
  SUBCASE("bivariate example") {
    Vector s2(2), alpha(2);
    s2 << 1.0, 1.0;
    alpha << 0.5, 0.5;
    const Matrix sigma = build_sigma_level(s2, alpha, 0.8);
    CHECK(sigma(0, 0) == doctest::Approx(0.5));
    CHECK(sigma(1, 1) == doctest::Approx(0.5));
    CHECK(sigma(0, 1) == doctest::Approx(0.4));
    CHECK(sigma(1, 0) == doctest::Approx(0.4));
  }
  SUBCASE("independence gives a diagonal matrix") {
    Vector s2(2), alpha(2);
    s2 << 2.0, 3.0;
    alpha << 0.25, 0.5;
    const Matrix sigma = build_sigma_level(s2, alpha, 0.0);
    CHECK(sigma(0, 0) == doctest::Approx(0.5));
    CHECK(sigma(1, 1) == doctest::Approx(1.5));
    CHECK(sigma(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("univariate reduction") {
    const Matrix sigma = build_sigma_level(Vector::Constant(1, 0.7),
                                           Vector::Constant(1, 2.0 / 3.0), 0.0);
    CHECK(sigma(0, 0) == doctest::Approx(0.7 * 2.0 / 3.0));
  }
  SUBCASE("invalid rho") {
    Vector s2 = Vector::Ones(2), alpha = Vector::Constant(2, 0.5);
    CHECK_THROWS_AS(build_sigma_level(s2, alpha, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_sigma_level(s2, alpha, -1.0), std::invalid_argument);
  }
}

TEST_CASE("equicorrelation inverse and determinant") {
  SUBCASE("p=2 rho=0.5") {
    const Matrix c = equicorrelation_inverse(0.5, 2);
    CHECK(c(0, 0) == doctest::Approx(4.0 / 3.0));
    CHECK(c(0, 1) == doctest::Approx(-2.0 / 3.0));
  }
  SUBCASE("rho=0 is the identity") {
    const Matrix c = equicorrelation_inverse(0.0, 4);
    CHECK((c - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("inverse property for p=3") {
    const double rho = 0.5;
    Matrix r = Matrix::Constant(3, 3, rho);
    r.diagonal().setOnes();
    const Matrix c = equicorrelation_inverse(rho, 3);
    CHECK(((c * r) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("closed-form determinant matches the dense determinant") {
    for (int p : {2, 3, 5}) {
      for (double rho : {-0.2, 0.0, 0.5, 0.9}) {
        if (!rho_is_valid(rho, p)) continue;
        Matrix r = Matrix::Constant(p, p, rho);
        r.diagonal().setOnes();
        const double dense = std::log(r.determinant());
        CHECK(equicorrelation_logdet(rho, p) == doctest::Approx(dense).epsilon(1e-10));
      }
    }
  }
}

namespace {

ModelParams tiny_params(int p, double r0 = 0.0, double r1 = 0.0, double kappa0 = 0.0) {
  ModelParams params = ModelParams::make(p, 0);
  params.sigma2_s.setConstant(1.0);
  params.r0 = r0;
  params.r1 = r1;
  params.kappa0 = kappa0;
  return params;
}

}  // namespace

TEST_CASE("build_precision scalar composition") {
  const BasisSystem basis = build_basis({0, 1, 0, 1}, {{1, 0.5}});
  const LatentPrecision prec = build_precision(tiny_params(1), basis);
  REQUIRE(prec.q.rows() == 1);
  // Sigma^-1 = 1 (alpha = 1 with one level) and B B^T = (4+1)^2 = 25.
  CHECK(prec.q.coeff(0, 0) == doctest::Approx(25.0));
}

TEST_CASE("build_precision independence block structure") {
  const BasisSystem basis = build_basis({0, 1, 0, 1}, {{2, 0.5}});
  const LatentPrecision prec = build_precision(tiny_params(2, 0.0), basis);
  const SpMat gram = build_lattice_ops(2).sar_gram(kappa2_at_level(0.0, 1));
  const Matrix q(prec.q);
  const Matrix g(gram);
  CHECK((q.block(0, 0, 4, 4) - g).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((q.block(4, 4, 4, 4) - g).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(q.block(0, 4, 4, 4).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("K_dense scalar case and independence") {
  const BasisSystem basis = build_basis({0, 1, 0, 1}, {{1, 0.5}});
  const Matrix k = build_k_dense(tiny_params(1), basis);
  CHECK(k(0, 0) == doctest::Approx(0.04));

  const BasisSystem basis2 = build_basis({0, 1, 0, 1}, {{2, 0.8}, {3, 0.4}});
  const Matrix k2 = build_k_dense(tiny_params(2, 0.0, 0.3, 0.1), basis2);
  const int big_r = basis2.total_size();
  CHECK(k2.block(0, big_r, big_r, big_r).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("K_dense inverts Q on small instances") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u_sigma(0.3, 2.0);
  std::uniform_real_distribution<double> u_rho(-0.5, 0.9);
  for (int trial = 0; trial < 8; ++trial) {
    const int p = (trial % 2) ? 1 : 2;
    const BasisSystem basis = build_basis({0, 1, 0, 1}, {{2, 0.8}, {2, 0.35}});
    ModelParams params = ModelParams::make(p, 0);
    for (int j = 0; j < p; ++j) params.sigma2_s[j] = u_sigma(rng);
    if (p >= 2) params.r0 = u_rho(rng);
    params.r1 = 0.25;
    params.kappa0 = 0.15;
    const LatentPrecision prec = build_precision(params, basis);
    const Matrix k = build_k_dense(params, basis);
    const int n = static_cast<int>(k.rows());
    CHECK((k * Matrix(prec.q) - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("precision/covariance equivalence on the two-level bivariate case") {
  const BasisSystem basis = build_basis({0, 1, 0, 1}, {{2, 0.8}, {2, 0.35}});
  const LatentPrecision prec = build_precision(tiny_params(2, 0.7, 0.4, 0.2), basis);
  const Matrix k = build_k_dense(tiny_params(2, 0.7, 0.4, 0.2), basis);
  const int n = static_cast<int>(k.rows());
  const Matrix q_inv = Matrix(prec.q).llt().solve(Matrix::Identity(n, n));
  CHECK((q_inv - k).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("permutation is a bijection matching the level-major layout") {
  const BasisSystem basis = build_basis({0, 1, 0, 1}, {{2, 0.8}, {3, 0.35}});
  const int p = 2;
  const LatentPrecision prec = build_precision(tiny_params(p, 0.5, 0.1, 0.1), basis);
  std::vector<int> seen(prec.perm.size(), 0);
  for (int v : prec.perm) {
    REQUIRE(v >= 0);
    REQUIRE(v < static_cast<int>(prec.perm.size()));
    seen[v] += 1;
  }
  for (int count : seen) CHECK(count == 1);

  // Spot-check the formula p*sum_{m<l} R_m + j*R_l + r.
  CHECK(prec.perm[coef_index(basis, 0, 0, 0)] == 0);
  CHECK(prec.perm[coef_index(basis, 1, 0, 0)] == 4);
  CHECK(prec.perm[coef_index(basis, 0, 1, 0)] == 8);
  CHECK(prec.perm[coef_index(basis, 1, 1, 2)] == 8 + 9 + 2);

  // The level-major image is block-diagonal across levels.
  const Matrix lm(prec.level_major());
  CHECK(lm.block(0, 8, 8, 18).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(lm.block(8, 0, 18, 8).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("Q stays positive definite over random valid parameters") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u_sigma(0.05, 5.0);
  std::uniform_real_distribution<double> u_r1(0.0, 2.0);
  std::uniform_real_distribution<double> u_kappa(-1.0, 1.0);
  const BasisSystem basis = build_basis({0, 1, 0, 1}, {{2, 0.8}, {3, 0.35}});
  for (int trial = 0; trial < 10; ++trial) {
    const int p = 1 + trial % 3;
    ModelParams params = ModelParams::make(p, 0);
    for (int j = 0; j < p; ++j) params.sigma2_s[j] = u_sigma(rng);
    if (p >= 2) {
      std::uniform_real_distribution<double> u_rho(rho_lower_bound(p) + 0.05, 0.95);
      params.r0 = u_rho(rng);
    }
    params.r1 = u_r1(rng);
    params.kappa0 = u_kappa(rng);
    const LatentPrecision prec = build_precision(params, basis);
    Eigen::SimplicialLLT<SpMat> llt(prec.q);
    CHECK(llt.info() == Eigen::Success);

    // Cross-process blocks are symmetric images of each other.
    const Matrix q(prec.q);
    CHECK((q - q.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}
