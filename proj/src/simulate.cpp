#include "cofrk/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include <Eigen/SparseCholesky>

namespace cofrk {

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (std::thread& th : pool) th.join();
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

ScenarioWorkspace build_workspace(const ScenarioConfig& config) {
  ScenarioWorkspace ws;
  ws.grid = build_bau_grid(config.domain, config.grid_nx, config.grid_ny);
  ws.basis = config.basis_spec.empty() ? build_default_basis(config.domain)
                                       : build_basis(config.domain, config.basis_spec);
  ws.phi = build_phi(ws.grid, ws.basis);
  if (config.truth.q == 1) {
    ws.f_bau = Matrix::Ones(ws.grid.size(), 1);  // intercept-only design
  } else if (config.truth.q > 1) {
    throw std::invalid_argument("build_workspace: only intercept covariates are generated");
  } else {
    ws.f_bau = Matrix(ws.grid.size(), 0);
  }
  return ws;
}

Vector sample_coefficients(const LatentPrecision& prec, std::mt19937_64& rng) {
  Eigen::SimplicialLLT<SpMat> llt(prec.q);
  if (llt.info() != Eigen::Success)
    throw NumericalError("sample_coefficients: Cholesky of Q failed");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector white(prec.q.rows());
  for (Eigen::Index i = 0; i < white.size(); ++i) white[i] = normal(rng);
  return llt.permutationPinv() * Vector(llt.matrixU().solve(white));
}

SimulatedData simulate_dataset(const ScenarioConfig& config, int replication,
                               const ScenarioWorkspace& ws,
                               std::optional<double> missing_proportion,
                               bool missing_random_placement) {
  const int p = config.truth.p;
  if (config.n_train < 1 || config.n_train >= config.n_total)
    throw std::invalid_argument("simulate_dataset: need 0 < n_train < n_total");

  SimulatedData data;

  // Locations and the train/test split are shared by all replications.
  std::mt19937_64 scenario_rng(config.seed);
  std::uniform_real_distribution<double> ux(config.domain.x_min, config.domain.x_max);
  std::uniform_real_distribution<double> uy(config.domain.y_min, config.domain.y_max);
  data.locations.reserve(config.n_total);
  for (int i = 0; i < config.n_total; ++i) {
    const double x = ux(scenario_rng);
    const double y = uy(scenario_rng);
    data.locations.emplace_back(x, y);
  }
  std::vector<int> order(config.n_total);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), scenario_rng);
  data.train_idx.assign(order.begin(), order.begin() + config.n_train);
  data.test_idx.assign(order.begin() + config.n_train, order.end());

  std::mt19937_64 rng(config.seed ^ static_cast<std::uint64_t>(replication));
  std::normal_distribution<double> normal(0.0, 1.0);

  const int big_r = ws.basis.total_size();
  Vector coef = Vector::Zero(static_cast<Eigen::Index>(p) * big_r);
  Matrix xi = Matrix::Zero(ws.grid.size(), p);
  Matrix eps = Matrix::Zero(config.n_total, p);
  if (!config.zero_noise) {
    const LatentPrecision prec = build_precision(config.truth, ws.basis);
    coef = sample_coefficients(prec, rng);
    for (int j = 0; j < p; ++j) {
      const Vector& w = (j < static_cast<int>(config.truth.v_xi.size()) &&
                         config.truth.v_xi[j].size() == ws.grid.size())
                            ? config.truth.v_xi[j]
                            : Vector::Ones(ws.grid.size());
      for (int b = 0; b < ws.grid.size(); ++b)
        xi(b, j) = std::sqrt(config.truth.sigma2_xi[j] * w[b]) * normal(rng);
    }
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < config.n_total; ++i)
        eps(i, j) = std::sqrt(config.truth.sigma2_eps[j]) * normal(rng);
  }

  data.values = Matrix::Zero(config.n_total, p);
  for (int i = 0; i < config.n_total; ++i) {
    const auto [x, y] = data.locations[i];
    const int b = ws.grid.cell_containing(x, y);
    for (int j = 0; j < p; ++j) {
      double v = ws.phi.row(b) * coef.segment(j * big_r, big_r);
      if (config.truth.q > 0)
        v += ws.f_bau.row(b).dot(config.truth.beta.row(j));
      data.values(i, j) = v + xi(b, j) + eps(i, j);
    }
  }

  // Sampling masks over the training set, one per process.
  data.observed.assign(p, std::vector<std::uint8_t>(config.n_train, 1));
  for (int j = 0; j < p; ++j) {
    const double frac = (config.sample_fraction.size() == p) ? config.sample_fraction[j] : 1.0;
    if (frac <= 0.0 || frac > 1.0)
      throw std::invalid_argument("simulate_dataset: sample fractions must lie in (0, 1]");
    if (frac < 1.0) {
      const int count = static_cast<int>(std::lround(frac * config.n_train));
      if (count < 1)
        throw std::invalid_argument("simulate_dataset: sampling fraction leaves process " +
                                    std::to_string(j) + " unobserved");
      std::vector<int> pos(config.n_train);
      std::iota(pos.begin(), pos.end(), 0);
      std::shuffle(pos.begin(), pos.end(), rng);
      std::fill(data.observed[j].begin(), data.observed[j].end(), 0);
      for (int k = 0; k < count; ++k) data.observed[j][pos[k]] = 1;
    }
  }

  if (missing_proportion.has_value()) {
    const double prop = *missing_proportion;
    if (prop <= 0.0 || prop >= 1.0)
      throw std::invalid_argument("simulate_dataset: missing proportion must lie in (0, 1)");
    const double side = std::sqrt(prop * config.domain.area());
    Rect rect;
    if (missing_random_placement) {
      std::uniform_real_distribution<double> cx(config.domain.x_min,
                                                config.domain.x_max - side);
      std::uniform_real_distribution<double> cy(config.domain.y_min,
                                                config.domain.y_max - side);
      rect.x_min = cx(rng);
      rect.y_min = cy(rng);
    } else {
      rect.x_min = config.domain.x_min;
      rect.y_min = config.domain.y_min;
    }
    rect.x_max = rect.x_min + side;
    rect.y_max = rect.y_min + side;
    data.missing_rect = rect;
    int left = 0;
    for (int k = 0; k < config.n_train; ++k) {
      const auto [x, y] = data.locations[data.train_idx[k]];
      if (rect.contains(x, y)) data.observed[0][k] = 0;
      left += data.observed[0][k];
    }
    if (left < 1)
      throw std::invalid_argument("simulate_dataset: missing region removed every process-0 observation");
  }
  return data;
}

void training_observations(const SimulatedData& data, int process,
                           std::vector<Footprint>* footprints, Vector* values) {
  footprints->clear();
  std::vector<double> vals;
  for (size_t k = 0; k < data.train_idx.size(); ++k) {
    if (!data.observed[process][k]) continue;
    const int idx = data.train_idx[k];
    const auto [x, y] = data.locations[idx];
    footprints->push_back(Footprint::point(static_cast<int>(footprints->size()), x, y, process));
    vals.push_back(data.values(idx, process));
  }
  *values = Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Metrics compute_metrics(const Vector& predicted, const Vector& truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("compute_metrics: length mismatch");
  if (truth.size() < 1) throw std::invalid_argument("compute_metrics: empty input");
  Metrics m;
  const Vector err = predicted - truth;
  m.rmse = std::sqrt(err.squaredNorm() / static_cast<double>(err.size()));
  m.mae = err.cwiseAbs().mean();
  if (truth.size() < 2) {
    m.r2 = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  const double sst = (truth.array() - truth.mean()).square().sum();
  m.r2 = (sst > 0.0) ? 1.0 - err.squaredNorm() / sst
                     : std::numeric_limits<double>::quiet_NaN();
  return m;
}

RecoveryScenario recovery_scenario_from_name(const std::string& name) {
  if (name == "slow_decay") return RecoveryScenario::SlowDecay;
  if (name == "no_decay") return RecoveryScenario::NoDecay;
  if (name == "fast_decay") return RecoveryScenario::FastDecay;
  throw std::invalid_argument("unknown recovery scenario: " + name);
}

std::string recovery_scenario_name(RecoveryScenario sc) {
  switch (sc) {
    case RecoveryScenario::SlowDecay: return "slow_decay";
    case RecoveryScenario::NoDecay: return "no_decay";
    case RecoveryScenario::FastDecay: return "fast_decay";
  }
  return "";
}

GainKind gain_kind_from_name(const std::string& name) {
  if (name == "imbalance") return GainKind::Imbalance;
  if (name == "missing_fixed") return GainKind::MissingFixed;
  if (name == "missing_random") return GainKind::MissingRandom;
  if (name == "correlation_sweep") return GainKind::CorrelationSweep;
  throw std::invalid_argument("unknown gain experiment: " + name);
}

ScenarioConfig default_bivariate_config() {
  ScenarioConfig config;
  config.truth = ModelParams::make(2, 0);
  config.truth.sigma2_s = Vector::Constant(2, 0.7);
  config.truth.sigma2_xi = Vector::Constant(2, 0.01);
  config.truth.sigma2_eps = Vector::Constant(2, 1e-4);
  config.truth.kappa0 = 0.05;
  config.truth.r0 = 0.9;
  config.truth.r1 = 0.5;
  return config;
}

ScenarioConfig recovery_config(RecoveryScenario scenario) {
  ScenarioConfig config = default_bivariate_config();
  switch (scenario) {
    case RecoveryScenario::SlowDecay:
      config.truth.r0 = 0.9;
      config.truth.r1 = 0.5;
      break;
    case RecoveryScenario::NoDecay:
      config.truth.r0 = 0.6;
      config.truth.r1 = 0.0;
      break;
    case RecoveryScenario::FastDecay:
      config.truth.r0 = 0.9;
      config.truth.r1 = 2.0;
      break;
  }
  return config;
}

ScenarioConfig imbalance_config() {
  ScenarioConfig config = default_bivariate_config();
  config.truth.kappa0 = 0.4;
  config.truth.sigma2_xi = Vector::Constant(2, 0.001);
  config.truth.sigma2_eps = Vector(2);
  config.truth.sigma2_eps << 2e-4, 8e-4;
  config.truth.r0 = 0.9;
  config.truth.r1 = 0.5;
  config.sample_fraction = Vector(2);
  config.sample_fraction << 0.05, 0.80;
  return config;
}

ScenarioConfig univariate_config() {
  ScenarioConfig config;
  config.truth = ModelParams::make(1, 0);
  config.truth.sigma2_s = Vector::Constant(1, 0.7);
  config.truth.sigma2_xi = Vector::Constant(1, 0.01);
  config.truth.sigma2_eps = Vector::Constant(1, 1e-4);
  config.truth.kappa0 = 0.05;
  return config;
}

namespace {

struct RepFits {
  FitResult joint;
  std::vector<FitResult> indep;
};

StackedModel model_for(const ScenarioWorkspace& ws, const SimulatedData& data,
                       const std::vector<int>& processes, const ModelParams& params) {
  std::vector<std::vector<Footprint>> footprints(processes.size());
  std::vector<Vector> values(processes.size());
  for (size_t k = 0; k < processes.size(); ++k)
    training_observations(data, processes[k], &footprints[k], &values[k]);
  return build_stacked_model(ws.grid, ws.phi, ws.f_bau, footprints, values, params);
}

ModelParams subset_params_template(const ModelParams& truth, const std::vector<int>& procs) {
  ModelParams sub = ModelParams::make(static_cast<int>(procs.size()), truth.q);
  for (size_t k = 0; k < procs.size(); ++k) {
    sub.sigma2_eps[static_cast<Eigen::Index>(k)] = truth.sigma2_eps[procs[k]];
    sub.nu[static_cast<Eigen::Index>(k)] = truth.nu[procs[k]];
  }
  return sub;
}

FitResult fit_processes(const ScenarioWorkspace& ws, const SimulatedData& data,
                        const std::vector<int>& procs, const ScenarioConfig& config,
                        StackedModel* model_out) {
  const ModelParams tmpl = subset_params_template(config.truth, procs);
  StackedModel model = model_for(ws, data, procs, tmpl);
  const ModelParams init = default_init(model, tmpl.sigma2_eps, tmpl.nu);
  FitResult res = fit(model, ws.basis, init, config.fit);
  if (model_out) *model_out = std::move(model);
  return res;
}

/// Prediction means at the test locations for every process of a fit.
Matrix predict_at_test(const ScenarioWorkspace& ws, const SimulatedData& data,
                       const FitResult& fit_res) {
  std::vector<Footprint> points;
  points.reserve(data.test_idx.size());
  for (size_t k = 0; k < data.test_idx.size(); ++k) {
    const auto [x, y] = data.locations[data.test_idx[k]];
    points.push_back(Footprint::point(static_cast<int>(k), x, y));
  }
  const AggregationMatrix c_pred = build_pred_aggregation(ws.grid, points);
  PredictionResult pred = posterior_bau(ws.phi, ws.f_bau, fit_res.params, fit_res.posterior,
                                        fit_res.params.v_xi);
  aggregate_predictions(pred, ws.phi, c_pred, fit_res.params, fit_res.posterior,
                        fit_res.params.v_xi);
  Matrix means(static_cast<int>(data.test_idx.size()), fit_res.params.p);
  for (int j = 0; j < fit_res.params.p; ++j) means.col(j) = pred.region_mean[j];
  return means;
}

}  // namespace

RecoveryResult run_recovery_scenario(RecoveryScenario scenario, int reps,
                                     const ScenarioConfig& base, int threads) {
  ScenarioConfig config = base;
  const ScenarioConfig preset = recovery_config(scenario);
  config.truth.r0 = preset.truth.r0;
  config.truth.r1 = preset.truth.r1;

  const ScenarioWorkspace ws = build_workspace(config);
  RecoveryResult result;
  result.scenario = recovery_scenario_name(scenario);
  result.rows.resize(reps);

  parallel_for(reps, threads, [&](int i) {
    RecoveryRow row;
    row.replication = i + 1;
    try {
      const SimulatedData data = simulate_dataset(config, row.replication, ws);
      StackedModel model;
      const FitResult fit_res = fit_processes(ws, data, {0, 1}, config, &model);
      row.ok = true;
      row.converged = fit_res.report.converged;
      row.iterations = fit_res.report.iterations;
      row.r0 = fit_res.params.r0;
      row.r1 = fit_res.params.r1;
      for (int l = 1; l <= ws.basis.n_levels(); ++l)
        row.rho_hat.push_back(rho_at_level(row.r0, row.r1, l));
      row.loglik = fit_res.report.loglik_trace.back();
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    result.rows[i] = std::move(row);
  });

  std::vector<double> r0s, r1s;
  for (const RecoveryRow& row : result.rows) {
    if (!row.ok) {
      ++result.n_failed;
      continue;
    }
    r0s.push_back(row.r0);
    r1s.push_back(row.r1);
  }
  if (result.n_failed * 5 > reps)
    throw std::runtime_error("run_recovery_scenario: more than 20% of replications failed");
  result.mean_r0 = mean_of(r0s);
  result.sd_r0 = sd_of(r0s);
  result.mean_r1 = mean_of(r1s);
  result.sd_r1 = sd_of(r1s);
  return result;
}

namespace {

struct GainTask {
  double param = std::numeric_limits<double>::quiet_NaN();
  int replication = 0;
  std::optional<double> missing_proportion;
  bool missing_random = false;
  double truth_r0 = std::numeric_limits<double>::quiet_NaN();  // NaN = keep config
};

}  // namespace

GainResult run_gain_experiment(GainKind kind, const ScenarioConfig& config, int reps,
                               int threads) {
  std::vector<GainTask> tasks;
  switch (kind) {
    case GainKind::Imbalance:
      for (int r = 1; r <= reps; ++r) tasks.push_back({.param = std::numeric_limits<double>::quiet_NaN(), .replication = r, .missing_proportion = std::nullopt, .missing_random = false, .truth_r0 = std::numeric_limits<double>::quiet_NaN()});
      break;
    case GainKind::MissingFixed:
      for (double prop : config.missing_proportions)
        for (int r = 1; r <= reps; ++r)
          tasks.push_back({.param = prop, .replication = r, .missing_proportion = prop});
      break;
    case GainKind::MissingRandom:
      for (int r = 1; r <= reps; ++r)
        tasks.push_back({.replication = r, .missing_proportion = -1.0, .missing_random = true});
      break;
    case GainKind::CorrelationSweep:
      for (double r0 : {0.2, 0.5, 0.75, 0.9})
        for (int r = 1; r <= reps; ++r)
          tasks.push_back({.param = r0,
                           .replication = r,
                           .missing_proportion = std::nullopt,
                           .missing_random = false,
                           .truth_r0 = r0});
      break;
  }

  const ScenarioWorkspace ws = build_workspace(config);
  const bool in_region = (kind == GainKind::MissingFixed || kind == GainKind::MissingRandom);
  std::vector<std::vector<MetricsRow>> rows(tasks.size());
  std::vector<std::string> errors(tasks.size());

  parallel_for(static_cast<int>(tasks.size()), threads, [&](int ti) {
    GainTask task = tasks[ti];
    ScenarioConfig local = config;
    if (std::isfinite(task.truth_r0)) local.truth.r0 = task.truth_r0;
    try {
      std::optional<double> prop = task.missing_proportion;
      if (task.missing_random) {
        // The proportion itself is part of the replication stream.
        std::mt19937_64 prop_rng(local.seed ^ static_cast<std::uint64_t>(task.replication) ^
                                 0x9e3779b97f4a7c15ULL);
        std::uniform_real_distribution<double> u(local.missing_low, local.missing_high);
        prop = u(prop_rng);
        task.param = *prop;
      }
      const SimulatedData data =
          simulate_dataset(local, task.replication, ws, prop, task.missing_random);

      const FitResult joint = fit_processes(ws, data, {0, 1}, local, nullptr);
      const Matrix joint_pred = predict_at_test(ws, data, joint);

      std::vector<FitResult> indep;
      std::vector<Matrix> indep_pred;
      for (int j = 0; j < local.truth.p; ++j) {
        indep.push_back(fit_processes(ws, data, {j}, local, nullptr));
        indep_pred.push_back(predict_at_test(ws, data, indep.back()));
      }

      std::vector<int> region_rows;
      if (data.missing_rect) {
        for (size_t k = 0; k < data.test_idx.size(); ++k) {
          const auto [x, y] = data.locations[data.test_idx[k]];
          if (data.missing_rect->contains(x, y)) region_rows.push_back(static_cast<int>(k));
        }
      }
      auto subset = [&](const Vector& v) {
        Vector out(region_rows.size());
        for (size_t k = 0; k < region_rows.size(); ++k)
          out[static_cast<Eigen::Index>(k)] = v[region_rows[k]];
        return out;
      };

      for (int j = 0; j < local.truth.p; ++j) {
        Vector truth(data.test_idx.size());
        for (size_t k = 0; k < data.test_idx.size(); ++k)
          truth[static_cast<Eigen::Index>(k)] = data.values(data.test_idx[k], j);

        const Metrics mj = compute_metrics(joint_pred.col(j), truth);
        const Metrics mi = compute_metrics(indep_pred[j].col(0), truth);

        MetricsRow row_joint, row_indep;
        row_joint.param = row_indep.param = task.param;
        row_joint.replication = row_indep.replication = task.replication;
        row_joint.model = "cofrk";
        row_indep.model = "independent";
        row_joint.process = row_indep.process = j;
        row_joint.rmse = mj.rmse;
        row_joint.mae = mj.mae;
        row_joint.r2 = mj.r2;
        row_indep.rmse = mi.rmse;
        row_indep.mae = mi.mae;
        row_indep.r2 = mi.r2;

        if (in_region && region_rows.size() >= 1) {
          const Vector truth_in = subset(truth);
          const Metrics mj_in = compute_metrics(subset(joint_pred.col(j)), truth_in);
          const Metrics mi_in = compute_metrics(subset(indep_pred[j].col(0)), truth_in);
          row_joint.in_region_rmse = mj_in.rmse;
          row_indep.in_region_rmse = mi_in.rmse;
          if (mi_in.rmse > 0.0)
            row_joint.rel_improvement = (mi_in.rmse - mj_in.rmse) / mi_in.rmse;
        } else if (!in_region && mi.rmse > 0.0) {
          row_joint.rel_improvement = (mi.rmse - mj.rmse) / mi.rmse;
        }
        rows[ti].push_back(row_joint);
        rows[ti].push_back(row_indep);
      }
    } catch (const std::exception& e) {
      errors[ti] = e.what();
    }
  });

  GainResult result;
  const char* kind_name = in_region
                              ? (kind == GainKind::MissingFixed ? "missing_fixed" : "missing_random")
                              : (kind == GainKind::Imbalance ? "imbalance" : "correlation_sweep");
  for (size_t ti = 0; ti < tasks.size(); ++ti) {
    if (!errors[ti].empty()) {
      ++result.n_failed;
      result.errors.push_back(errors[ti]);
      continue;
    }
    for (MetricsRow row : rows[ti]) {
      row.experiment = kind_name;
      result.rows.push_back(std::move(row));
    }
  }
  if (result.n_failed * 5 > static_cast<int>(tasks.size()))
    throw std::runtime_error("run_gain_experiment: more than 20% of replications failed");
  return result;
}

GainResult run_univariate_experiment(const ScenarioConfig& config, int reps, int threads) {
  const ScenarioWorkspace ws = build_workspace(config);
  std::vector<std::vector<MetricsRow>> rows(reps);
  std::vector<std::string> errors(reps);
  parallel_for(reps, threads, [&](int i) {
    const int rep = i + 1;
    try {
      const SimulatedData data = simulate_dataset(config, rep, ws);
      const FitResult fit_res = fit_processes(ws, data, {0}, config, nullptr);
      const Matrix pred = predict_at_test(ws, data, fit_res);
      Vector truth(data.test_idx.size());
      for (size_t k = 0; k < data.test_idx.size(); ++k)
        truth[static_cast<Eigen::Index>(k)] = data.values(data.test_idx[k], 0);
      const Metrics m = compute_metrics(pred.col(0), truth);
      MetricsRow row;
      row.experiment = "univariate";
      row.replication = rep;
      row.model = "cofrk";
      row.process = 0;
      row.rmse = m.rmse;
      row.mae = m.mae;
      row.r2 = m.r2;
      rows[i].push_back(row);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  GainResult result;
  for (int i = 0; i < reps; ++i) {
    if (!errors[i].empty()) {
      ++result.n_failed;
      result.errors.push_back(errors[i]);
      continue;
    }
    for (MetricsRow& row : rows[i]) result.rows.push_back(std::move(row));
  }
  if (result.n_failed * 5 > reps)
    throw std::runtime_error("run_univariate_experiment: more than 20% of replications failed");
  return result;
}

RidgeResult run_ridge_experiment(const ScenarioConfig& config, int reps,
                                 const std::vector<double>& lambda_grid,
                                 int selection_reps, int threads) {
  if (config.truth.p != 1)
    throw std::invalid_argument("run_ridge_experiment: configured for a single process");
  const ScenarioWorkspace ws = build_workspace(config);

  RidgeResult result;
  {
    const SimulatedData first = simulate_dataset(config, 1, ws);
    std::vector<std::vector<Footprint>> footprints(1);
    std::vector<Vector> values(1);
    training_observations(first, 0, &footprints[0], &values[0]);
    const ModelParams tmpl = subset_params_template(config.truth, {0});
    const RidgeSelection sel =
        select_ridge_lambda(ws.grid, ws.phi, ws.f_bau, ws.basis, footprints, values, tmpl,
                            config.fit, lambda_grid, selection_reps, config.seed);
    result.lambda_star = sel.lambda;
    result.lambdas = sel.lambdas;
    result.scores = sel.scores;
    result.flags = sel.flags;
  }

  result.rows.resize(reps);
  std::vector<std::string> errors(reps);
  parallel_for(reps, threads, [&](int i) {
    const int rep = i + 1;
    try {
      const SimulatedData data = simulate_dataset(config, rep, ws);
      ScenarioConfig plain = config;
      plain.fit.lambda = 0.0;
      ScenarioConfig ridged = config;
      ridged.fit.lambda = result.lambda_star;
      const FitResult unpen = fit_processes(ws, data, {0}, plain, nullptr);
      const FitResult pen = fit_processes(ws, data, {0}, ridged, nullptr);
      RidgeRow row;
      row.replication = rep;
      row.sigma2_s_unpenalized = unpen.params.sigma2_s[0];
      row.sigma2_s_penalized = pen.params.sigma2_s[0];
      row.sigma2_xi_unpenalized = unpen.params.sigma2_xi[0];
      row.sigma2_xi_penalized = pen.params.sigma2_xi[0];
      result.rows[i] = row;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  int failed = 0;
  for (const std::string& e : errors)
    if (!e.empty()) {
      ++failed;
      result.flags.push_back(e);
    }
  if (failed * 5 > reps)
    throw std::runtime_error("run_ridge_experiment: more than 20% of replications failed");
  return result;
}

}  // namespace cofrk
