#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cofrk/likelihood.hpp"
#include "cofrk/optim.hpp"

namespace cofrk {

/// Conditional moments of the latent coefficients given the data, with the
/// second moment S = Sigma + mu mu^T cached for the M-step trace terms.
struct PosteriorState {
  Vector mu;     // pR
  Matrix sigma;  // pR x pR
  Matrix s;      // sigma + mu mu^T
};

struct FitConfig {
  double rel_tol = 1e-4;
  int max_iter = 200;
  double inner_tol = 1e-6;
  int inner_max_evals = 200;
  double sigma2_s_lo = 1e-8, sigma2_s_hi = 1e3;
  double sigma2_xi_lo = 1e-10, sigma2_xi_hi = 1e2;
  double xi_root_tol = 1e-8;
  double kappa0_lo = -10.0, kappa0_hi = 10.0;
  double r0_abs_max = 0.99;  // r0 bounds are [-0.99/(p-1), 0.99]
  double r1_lo = 0.0, r1_hi = 10.0;
  double lambda = 0.0;  // ridge weight on sigma2_s
  std::uint64_t seed = 0;
};

struct FitReport {
  std::vector<double> loglik_trace;  // initial value plus one entry per iteration
  std::vector<std::string> warnings;
  int iterations = 0;
  bool converged = false;
  bool aborted = false;
  std::string abort_reason;
  double wall_seconds = 0.0;
};

struct FitResult {
  ModelParams params;
  PosteriorState posterior;
  FitReport report;
};

PosteriorState e_step(const StackedModel& model, const LatentPrecision& prec,
                      const ModelParams& params);

/// Generalized least-squares update of the regression coefficients.
Matrix update_beta(const StackedModel& model, const ModelParams& params,
                   const PosteriorState& post);

/// Per-level trace contractions of the posterior second moment against the
/// lattice operators, computed once per M-step. With B = M + kappa2*I the
/// kernel traces at any kappa2 follow from t2 + 2*kappa2*t1 + kappa2^2*t0.
struct MStepTraces {
  int p = 1;
  std::vector<int> level_size;
  std::vector<LatticeOps> ops;       // per level
  std::vector<Matrix> t0, t1, t2;    // per level, p x p

  Matrix kernel_traces(int level, double kappa2) const {
    return t2[level] + 2.0 * kappa2 * t1[level] + kappa2 * kappa2 * t0[level];
  }
};

MStepTraces compute_mstep_traces(const PosteriorState& post, const BasisSystem& basis, int p);

/// M-step objectives, exposed so ascent can be asserted externally.
double sigma_s_objective(const Vector& sigma2_s, const ModelParams& params,
                         const BasisSystem& basis, const MStepTraces& traces,
                         double lambda);
double kappa0_objective(double kappa0, const ModelParams& params,
                        const BasisSystem& basis, const MStepTraces& traces);
double r_objective(double r0, double r1, const ModelParams& params,
                   const BasisSystem& basis, const MStepTraces& traces);

/// Cluster blocks of Omega restricted to one process, from which both the
/// stationarity residual and the noise part of the EM objective follow.
std::vector<Matrix> xi_omega_blocks(const StackedModel& model, int process,
                                    const PosteriorState& post, const Vector& residual);
double xi_stationarity_residual(const NoiseModel& noise, const std::vector<Matrix>& omega,
                                double sigma_xi2, double sigma_eps2);
double xi_objective(const NoiseModel& noise, const std::vector<Matrix>& omega,
                    double sigma_xi2, double sigma_eps2);

Vector update_sigma_xi(const StackedModel& model, const ModelParams& params,
                       const PosteriorState& post, const FitConfig& cfg,
                       std::vector<std::string>* warnings);
Vector update_sigma_s(const ModelParams& params, const BasisSystem& basis,
                      const MStepTraces& traces, const FitConfig& cfg, double lambda,
                      std::vector<std::string>* warnings);
double update_kappa0(const ModelParams& params, const BasisSystem& basis,
                     const MStepTraces& traces, const FitConfig& cfg,
                     std::vector<std::string>* warnings);
std::pair<double, double> update_r0_r1(const ModelParams& params, const BasisSystem& basis,
                                       const MStepTraces& traces, const FitConfig& cfg,
                                       std::vector<std::string>* warnings);

/// Data-driven starting point: per-process OLS, residual-variance scale,
/// kappa0 = 0.1 and a residual-correlation sign for r0.
ModelParams default_init(const StackedModel& model, const Vector& sigma2_eps,
                         const Vector& nu);

FitResult fit(const StackedModel& model, const BasisSystem& basis,
              const ModelParams& init, const FitConfig& config);

/// Ridge-weight selection by repeated 5-fold refits: minimizes
/// B(lambda) = mean + sd of sigma2_s estimates plus the absolute
/// correlation between sigma2_s and sigma2_xi estimates.
struct RidgeSelection {
  double lambda = 0.0;
  std::vector<double> lambdas;
  std::vector<double> scores;  // B + C per grid value
  std::vector<std::string> flags;
};

RidgeSelection select_ridge_lambda(const BauGrid& grid, const SpMat& phi,
                                   const Matrix& f_bau, const BasisSystem& basis,
                                   const std::vector<std::vector<Footprint>>& footprints,
                                   const std::vector<Vector>& values,
                                   const ModelParams& fixed, const FitConfig& config,
                                   const std::vector<double>& lambda_grid,
                                   int repetitions, std::uint64_t seed);

}  // namespace cofrk
