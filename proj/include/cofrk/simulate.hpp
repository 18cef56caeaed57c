#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cofrk/em.hpp"
#include "cofrk/predict.hpp"

namespace cofrk {

/// Generative setup for one Monte Carlo scenario. Locations and the
/// train/test split come from the scenario seed and stay fixed across
/// replications; noise draws and sampling masks use per-replication streams
/// derived as seed xor replication id (1-based).
struct ScenarioConfig {
  Rect domain{0.0, 1.0, 0.0, 1.0};
  int grid_nx = 32, grid_ny = 32;
  std::vector<BasisLevelSpec> basis_spec;  // empty = two-level default
  int n_total = 1000;
  int n_train = 800;
  ModelParams truth;
  Vector sample_fraction;            // per process, empty = all ones
  std::vector<double> missing_proportions{0.05, 0.10, 0.25, 0.50};
  double missing_low = 0.02, missing_high = 0.75;  // random-missing range
  std::uint64_t seed = 1;
  FitConfig fit;
  bool zero_noise = false;  // test hook: force c, xi, eps to zero
};

struct SimulatedData {
  std::vector<std::pair<double, double>> locations;  // n_total
  Matrix values;                                     // n_total x p
  std::vector<int> train_idx, test_idx;
  std::vector<std::vector<std::uint8_t>> observed;   // per process, train mask
  std::optional<Rect> missing_rect;
};

/// Prebuilt geometry shared by all replications of one scenario.
struct ScenarioWorkspace {
  BauGrid grid;
  BasisSystem basis;
  SpMat phi;
  Matrix f_bau;  // B x q covariates (empty for zero-mean scenarios)
};

ScenarioWorkspace build_workspace(const ScenarioConfig& config);

/// Draws one replication from the generative model. The missing rectangle,
/// when requested, removes process-0 training observations only.
SimulatedData simulate_dataset(const ScenarioConfig& config, int replication,
                               const ScenarioWorkspace& ws,
                               std::optional<double> missing_proportion = std::nullopt,
                               bool missing_random_placement = false);

/// Sample from N(0, Q^{-1}) through the permuted sparse Cholesky factor.
Vector sample_coefficients(const LatentPrecision& prec, std::mt19937_64& rng);

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  double r2 = 0.0;  // NaN when the truth is constant
};

Metrics compute_metrics(const Vector& predicted, const Vector& truth);

struct MetricsRow {
  std::string experiment;
  double param = std::numeric_limits<double>::quiet_NaN();
  int replication = 0;
  std::string model;  // "cofrk" or "independent"
  int process = 0;
  double rmse = std::numeric_limits<double>::quiet_NaN();
  double mae = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  double in_region_rmse = std::numeric_limits<double>::quiet_NaN();
  double rel_improvement = std::numeric_limits<double>::quiet_NaN();
};

enum class RecoveryScenario { SlowDecay, NoDecay, FastDecay };

RecoveryScenario recovery_scenario_from_name(const std::string& name);
std::string recovery_scenario_name(RecoveryScenario sc);

struct RecoveryRow {
  int replication = 0;
  bool ok = false;
  bool converged = false;
  int iterations = 0;
  double r0 = 0.0, r1 = 0.0;
  std::vector<double> rho_hat;  // per level
  double loglik = 0.0;
  std::string error;
};

struct RecoveryResult {
  std::string scenario;
  std::vector<RecoveryRow> rows;
  double mean_r0 = 0.0, sd_r0 = 0.0;
  double mean_r1 = 0.0, sd_r1 = 0.0;
  int n_failed = 0;
};

/// Fits the bivariate model from the default initialization for each
/// replication; throws when more than 20% of the replications fail.
RecoveryResult run_recovery_scenario(RecoveryScenario scenario, int reps,
                                     const ScenarioConfig& base, int threads);

enum class GainKind { Imbalance, MissingFixed, MissingRandom, CorrelationSweep };

GainKind gain_kind_from_name(const std::string& name);

struct GainResult {
  std::vector<MetricsRow> rows;
  int n_failed = 0;
  std::vector<std::string> errors;
};

/// Joint fit versus per-process independent fits on the held-out test set.
GainResult run_gain_experiment(GainKind kind, const ScenarioConfig& config, int reps,
                               int threads);

/// Single-process predictive check on the default configuration.
GainResult run_univariate_experiment(const ScenarioConfig& config, int reps, int threads);

struct RidgeRow {
  int replication = 0;
  double sigma2_s_unpenalized = 0.0;
  double sigma2_s_penalized = 0.0;
  double sigma2_xi_unpenalized = 0.0;
  double sigma2_xi_penalized = 0.0;
};

struct RidgeResult {
  double lambda_star = 0.0;
  std::vector<double> lambdas, scores;
  std::vector<RidgeRow> rows;
  std::vector<std::string> flags;
};

/// Selects the ridge weight on the first replication's dataset and refits
/// every replication with and without it.
RidgeResult run_ridge_experiment(const ScenarioConfig& config, int reps,
                                 const std::vector<double>& lambda_grid,
                                 int selection_reps, int threads);

/// Section-4.1 presets.
ScenarioConfig default_bivariate_config();
ScenarioConfig recovery_config(RecoveryScenario scenario);
ScenarioConfig imbalance_config();
ScenarioConfig univariate_config();

/// Train-side observation set of one simulated replication.
void training_observations(const SimulatedData& data, int process,
                           std::vector<Footprint>* footprints, Vector* values);

}  // namespace cofrk
