#include "cofrk/em.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace cofrk {

namespace {

Matrix alpha_table(const ModelParams& params, int n_levels) {
  Matrix alpha(params.p, n_levels);
  for (int j = 0; j < params.p; ++j)
    alpha.row(j) = alpha_weights(params.nu[j], n_levels).transpose();
  return alpha;
}

double sparse_kernel_trace(const SpMat& kernel, const Eigen::Block<const Matrix>& block) {
  double t = 0.0;
  for (int k = 0; k < kernel.outerSize(); ++k)
    for (SpMat::InnerIterator it(kernel, k); it; ++it)
      t += it.value() * block(it.col(), it.row());
  return t;
}

void add_warning(std::vector<std::string>* warnings, const std::string& msg) {
  if (!warnings) return;
  if (std::find(warnings->begin(), warnings->end(), msg) == warnings->end())
    warnings->push_back(msg);
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (size_t i = 0; i < n; ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

PosteriorState e_step(const StackedModel& model, const LatentPrecision& prec,
                      const ModelParams& params) {
  const CapacityParts parts = assemble_capacity(model, prec, params);
  Eigen::LLT<Matrix> llt(parts.capacity);
  if (llt.info() != Eigen::Success)
    throw NumericalError("e_step: posterior precision not positive definite");
  PosteriorState post;
  post.sigma = llt.solve(Matrix::Identity(parts.capacity.rows(), parts.capacity.cols()));
  post.mu = llt.solve(parts.rhs);
  post.s = post.sigma + post.mu * post.mu.transpose();
  return post;
}

Matrix update_beta(const StackedModel& model, const ModelParams& params,
                   const PosteriorState& post) {
  if (model.q == 0) return params.beta;
  Matrix beta = params.beta;
  const int big_r = model.n_basis;
  for (int j = 0; j < model.p; ++j) {
    const int nj = model.n_obs(j);
    if (nj == 0) continue;
    const Matrix f_j =
        Matrix(model.f_design.middleRows(model.offset[j], nj)).middleCols(j * model.q, model.q);
    const Vector target = model.z.segment(model.offset[j], nj) -
                          model.x_block[j] * post.mu.segment(j * big_r, big_r);
    const NoiseFactor noise = model.noise[j].factor(params.sigma2_xi[j], params.sigma2_eps[j]);
    const Matrix fdf = f_j.transpose() * noise.solve(f_j);
    Eigen::LLT<Matrix> llt(fdf);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("update_beta: singular design for process " + std::to_string(j));
    beta.row(j) = llt.solve(f_j.transpose() * noise.solve(target)).transpose();
  }
  return beta;
}

MStepTraces compute_mstep_traces(const PosteriorState& post, const BasisSystem& basis, int p) {
  MStepTraces traces;
  traces.p = p;
  const int big_r = basis.total_size();
  for (int l = 0; l < basis.n_levels(); ++l) {
    const int r_l = basis.level_size(l);
    const int off = basis.level_offset(l);
    traces.level_size.push_back(r_l);
    traces.ops.push_back(build_lattice_ops(basis.levels[l].lattice));
    Matrix t0(p, p), t1(p, p), t2(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        const auto block = post.s.block(i * big_r + off, j * big_r + off, r_l, r_l);
        t0(i, j) = block.trace();
        t1(i, j) = sparse_kernel_trace(traces.ops[l].m, block);
        t2(i, j) = sparse_kernel_trace(traces.ops[l].m2, block);
      }
    }
    traces.t0.push_back(t0);
    traces.t1.push_back(t1);
    traces.t2.push_back(t2);
  }
  return traces;
}

double sigma_s_objective(const Vector& sigma2_s, const ModelParams& params,
                         const BasisSystem& basis, const MStepTraces& traces,
                         double lambda) {
  const int p = params.p;
  for (int i = 0; i < p; ++i)
    if (!(sigma2_s[i] > 0.0)) return -std::numeric_limits<double>::infinity();
  const Matrix alpha = alpha_table(params, basis.n_levels());
  double obj = 0.0;
  for (int l = 0; l < basis.n_levels(); ++l) {
    const double rho = (p >= 2) ? rho_at_level(params.r0, params.r1, l + 1) : 0.0;
    const double kappa2 = kappa2_at_level(params.kappa0, l + 1);
    const Matrix c = equicorrelation_inverse(rho, p);
    const Matrix g = traces.kernel_traces(l, kappa2);
    Vector d(p);
    double log_d_sum = 0.0;
    for (int i = 0; i < p; ++i) {
      d[i] = std::sqrt(alpha(i, l) * sigma2_s[i]);
      log_d_sum += std::log(d[i]);
    }
    double trace_term = 0.0;
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) trace_term += c(i, j) * g(i, j) / (d[i] * d[j]);
    obj += -2.0 * traces.level_size[l] * log_d_sum - trace_term;
  }
  return obj - lambda * sigma2_s.squaredNorm();
}

double kappa0_objective(double kappa0, const ModelParams& params,
                        const BasisSystem& basis, const MStepTraces& traces) {
  const int p = params.p;
  const Matrix alpha = alpha_table(params, basis.n_levels());
  double obj = 0.0;
  for (int l = 0; l < basis.n_levels(); ++l) {
    const double rho = (p >= 2) ? rho_at_level(params.r0, params.r1, l + 1) : 0.0;
    const double kappa2 = kappa2_at_level(kappa0, l + 1);
    const Matrix sigma = build_sigma_level(params.sigma2_s, alpha.col(l), rho);
    const Matrix sigma_inv = sigma.llt().solve(Matrix::Identity(p, p));
    const Matrix t = traces.kernel_traces(l, kappa2);
    obj += 2.0 * p * traces.ops[l].log_det_sar(kappa2) - sigma_inv.cwiseProduct(t).sum();
  }
  return obj;
}

double r_objective(double r0, double r1, const ModelParams& params,
                   const BasisSystem& basis, const MStepTraces& traces) {
  const int p = params.p;
  const Matrix alpha = alpha_table(params, basis.n_levels());
  double obj = 0.0;
  for (int l = 0; l < basis.n_levels(); ++l) {
    const double rho = rho_at_level(r0, r1, l + 1);
    if (!rho_is_valid(rho, p)) return -std::numeric_limits<double>::infinity();
    const double kappa2 = kappa2_at_level(params.kappa0, l + 1);
    const Matrix c = equicorrelation_inverse(rho, p);
    const Matrix t = traces.kernel_traces(l, kappa2);
    Vector d(p);
    for (int i = 0; i < p; ++i) d[i] = std::sqrt(alpha(i, l) * params.sigma2_s[i]);
    const Matrix m = d.cwiseInverse().asDiagonal() * t * d.cwiseInverse().asDiagonal();
    obj += -traces.level_size[l] * equicorrelation_logdet(rho, p) - c.cwiseProduct(m).sum();
  }
  return obj;
}

std::vector<Matrix> xi_omega_blocks(const StackedModel& model, int process,
                                    const PosteriorState& post, const Vector& residual) {
  const int big_r = model.n_basis;
  const int nj = model.n_obs(process);
  const Matrix x = Matrix(model.x_block[process]);
  const Matrix xs = x * post.s.block(process * big_r, process * big_r, big_r, big_r);
  const Vector xu = x * post.mu.segment(process * big_r, big_r);
  const Vector e = residual.segment(model.offset[process], nj);

  std::vector<Matrix> blocks;
  for (const NoiseCluster& cl : model.noise[process].clusters()) {
    const int k = static_cast<int>(cl.rows.size());
    Matrix omega(k, k);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        const int ra = cl.rows[a], rb = cl.rows[b];
        omega(a, b) = xs.row(ra).dot(x.row(rb)) - xu[ra] * e[rb] - e[ra] * xu[rb] + e[ra] * e[rb];
      }
    }
    blocks.push_back(std::move(omega));
  }
  return blocks;
}

double xi_stationarity_residual(const NoiseModel& noise, const std::vector<Matrix>& omega,
                                double sigma_xi2, double sigma_eps2) {
  const NoiseFactor f = noise.factor(sigma_xi2, sigma_eps2);
  const auto& clusters = noise.clusters();
  double lhs = 0.0, rhs = 0.0;
  for (size_t ci = 0; ci < clusters.size(); ++ci) {
    const Matrix dinv_w = f.solve_cluster(ci, clusters[ci].w);
    lhs += dinv_w.trace();
    rhs += (dinv_w * f.solve_cluster(ci, omega[ci])).trace();
  }
  return rhs - lhs;
}

double xi_objective(const NoiseModel& noise, const std::vector<Matrix>& omega,
                    double sigma_xi2, double sigma_eps2) {
  const NoiseFactor f = noise.factor(sigma_xi2, sigma_eps2);
  double trace_term = 0.0;
  for (size_t ci = 0; ci < noise.clusters().size(); ++ci)
    trace_term += f.solve_cluster(ci, omega[ci]).trace();
  return -f.log_det() - trace_term;
}

Vector update_sigma_xi(const StackedModel& model, const ModelParams& params,
                       const PosteriorState& post, const FitConfig& cfg,
                       std::vector<std::string>* warnings) {
  Vector sigma2_xi = params.sigma2_xi;
  const Vector residual = model.residual(params.beta);
  for (int j = 0; j < model.p; ++j) {
    if (model.n_obs(j) == 0) {
      add_warning(warnings, "sigma2_xi[" + std::to_string(j) + "]: process unobserved, kept");
      continue;
    }
    const std::vector<Matrix> omega = xi_omega_blocks(model, j, post, residual);
    const double eps2 = params.sigma2_eps[j];
    auto g = [&](double s) { return xi_stationarity_residual(model.noise[j], omega, s, eps2); };
    const RootResult root = bisect_root(g, cfg.sigma2_xi_lo, cfg.sigma2_xi_hi,
                                        cfg.xi_root_tol, cfg.inner_max_evals);
    if (!root.bracketed)
      add_warning(warnings, "sigma2_xi[" + std::to_string(j) + "] at bound " +
                                std::to_string(root.x));
    const double current = sigma2_xi[j];
    if (xi_objective(model.noise[j], omega, root.x, eps2) >=
        xi_objective(model.noise[j], omega, current, eps2))
      sigma2_xi[j] = root.x;
  }
  return sigma2_xi;
}

Vector update_sigma_s(const ModelParams& params, const BasisSystem& basis,
                      const MStepTraces& traces, const FitConfig& cfg, double lambda,
                      std::vector<std::string>* warnings) {
  Vector sigma2_s = params.sigma2_s;
  double best = sigma_s_objective(sigma2_s, params, basis, traces, lambda);
  const double t_lo = std::log(cfg.sigma2_s_lo), t_hi = std::log(cfg.sigma2_s_hi);
  for (int cycle = 0; cycle < 2; ++cycle) {
    for (int i = 0; i < params.p; ++i) {
      Vector trial = sigma2_s;
      auto f = [&](double t) {
        trial[i] = std::exp(t);
        return sigma_s_objective(trial, params, basis, traces, lambda);
      };
      const ScalarResult res = golden_section_max(f, t_lo, t_hi, cfg.inner_tol,
                                                  cfg.inner_max_evals);
      if (res.value > best) {
        best = res.value;
        sigma2_s[i] = std::exp(res.x);
      }
    }
  }
  bool all_bound = true;
  for (int i = 0; i < params.p; ++i) {
    const bool at_bound = sigma2_s[i] <= cfg.sigma2_s_lo * 1.001 ||
                          sigma2_s[i] >= cfg.sigma2_s_hi * 0.999;
    all_bound = all_bound && at_bound;
  }
  if (all_bound) add_warning(warnings, "sigma2_s: all coordinates at bounds");
  return sigma2_s;
}

double update_kappa0(const ModelParams& params, const BasisSystem& basis,
                     const MStepTraces& traces, const FitConfig& cfg,
                     std::vector<std::string>* warnings) {
  auto f = [&](double k) { return kappa0_objective(k, params, basis, traces); };
  const ScalarResult res = golden_section_max(f, cfg.kappa0_lo, cfg.kappa0_hi,
                                              cfg.inner_tol, cfg.inner_max_evals);
  const double incumbent = kappa0_objective(params.kappa0, params, basis, traces);
  if (res.value <= incumbent) return params.kappa0;
  if (res.x <= cfg.kappa0_lo + cfg.inner_tol || res.x >= cfg.kappa0_hi - cfg.inner_tol)
    add_warning(warnings, "kappa0 at bound " + std::to_string(res.x));
  return res.x;
}

std::pair<double, double> update_r0_r1(const ModelParams& params, const BasisSystem& basis,
                                       const MStepTraces& traces, const FitConfig& cfg,
                                       std::vector<std::string>* warnings) {
  const int p = params.p;
  if (p < 2)
    throw std::invalid_argument("update_r0_r1: not applicable with a single process");
  const double r0_lo = -cfg.r0_abs_max / (p - 1);
  const double r0_hi = cfg.r0_abs_max;

  if (basis.n_levels() == 1) {
    // Only rho_1 = r0 is identified; r1 never enters the objective.
    auto f = [&](double r0) { return r_objective(r0, 0.0, params, basis, traces); };
    const ScalarResult res = golden_section_max(f, r0_lo, r0_hi, cfg.inner_tol,
                                                cfg.inner_max_evals);
    add_warning(warnings, "r1 unidentified with a single level; pinned to 0");
    const double incumbent = r_objective(params.r0, 0.0, params, basis, traces);
    return {res.value > incumbent ? res.x : params.r0, 0.0};
  }

  double r0 = std::clamp(params.r0, r0_lo, r0_hi);
  double r1 = std::clamp(params.r1, cfg.r1_lo, cfg.r1_hi);
  double best = r_objective(r0, r1, params, basis, traces);
  for (int sweep = 0; sweep < 3; ++sweep) {
    auto f0 = [&](double x) { return r_objective(x, r1, params, basis, traces); };
    ScalarResult res = golden_section_max(f0, r0_lo, r0_hi, cfg.inner_tol, cfg.inner_max_evals);
    if (res.value > best) {
      best = res.value;
      r0 = res.x;
    }
    auto f1 = [&](double x) { return r_objective(r0, x, params, basis, traces); };
    res = golden_section_max(f1, cfg.r1_lo, cfg.r1_hi, cfg.inner_tol, cfg.inner_max_evals);
    if (res.value > best) {
      best = res.value;
      r1 = res.x;
    }
  }
  const double incumbent = r_objective(params.r0, params.r1, params, basis, traces);
  if (best <= incumbent) return {params.r0, params.r1};
  return {r0, r1};
}

ModelParams default_init(const StackedModel& model, const Vector& sigma2_eps,
                         const Vector& nu) {
  ModelParams params = ModelParams::make(model.p, model.q);
  if (sigma2_eps.size() != model.p || nu.size() != model.p)
    throw std::invalid_argument("default_init: sigma2_eps and nu must have one entry per process");
  params.sigma2_eps = sigma2_eps;
  params.nu = nu;

  Matrix bau_mean = Matrix::Zero(model.n_bau, model.p);
  Matrix bau_count = Matrix::Zero(model.n_bau, model.p);
  for (int j = 0; j < model.p; ++j) {
    const int nj = model.n_obs(j);
    Vector resid;
    if (nj == 0) {
      params.sigma2_s[j] = 1.0;
      params.sigma2_xi[j] = 0.1;
      continue;
    }
    const Vector z_j = model.z.segment(model.offset[j], nj);
    if (model.q > 0 && nj >= model.q) {
      const Matrix f_j = Matrix(model.f_design.middleRows(model.offset[j], nj))
                             .middleCols(j * model.q, model.q);
      const Vector beta_j = f_j.colPivHouseholderQr().solve(z_j);
      params.beta.row(j) = beta_j.transpose();
      resid = z_j - f_j * beta_j;
    } else {
      resid = z_j;
    }
    double var = 1.0;
    if (nj > 1) {
      const double mean = resid.mean();
      var = (resid.array() - mean).square().sum() / (nj - 1);
    }
    var = std::clamp(var, 1e-6, 1e3);
    params.sigma2_s[j] = var;
    params.sigma2_xi[j] = std::clamp(0.1 * var, 1e-8, 1e2);

    const Vector sums = model.c_obs[j].transpose() * resid;
    const Vector counts = model.c_obs[j].transpose() * Vector::Ones(nj);
    bau_mean.col(j) = sums;
    bau_count.col(j) = counts;
  }

  params.kappa0 = 0.1;
  if (model.p >= 2) {
    double corr_sum = 0.0;
    int corr_n = 0;
    for (int i = 0; i < model.p; ++i) {
      for (int j = i + 1; j < model.p; ++j) {
        std::vector<double> a, b;
        for (int bau = 0; bau < model.n_bau; ++bau) {
          if (bau_count(bau, i) > 1e-12 && bau_count(bau, j) > 1e-12) {
            a.push_back(bau_mean(bau, i) / bau_count(bau, i));
            b.push_back(bau_mean(bau, j) / bau_count(bau, j));
          }
        }
        if (a.size() >= 3) {
          const double c = pearson(a, b);
          if (std::isfinite(c)) {
            corr_sum += c;
            ++corr_n;
          }
        }
      }
    }
    const double sign = (corr_n > 0 && corr_sum < 0.0) ? -1.0 : 1.0;
    params.r0 = 0.5 * sign;
    params.r1 = 0.5;
  }
  return params;
}

FitResult fit(const StackedModel& model, const BasisSystem& basis,
              const ModelParams& init, const FitConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  FitResult result;
  result.params = init;
  result.params.validate();
  if (model.n_total() == 0)
    throw std::invalid_argument("fit: dataset is empty for every process");

  LatentPrecision prec = build_precision(result.params, basis);
  double ll_prev = marginal_loglik(model, prec, result.params);
  result.report.loglik_trace.push_back(ll_prev);
  result.posterior = e_step(model, prec, result.params);

  ModelParams last_params = result.params;
  PosteriorState last_post = result.posterior;

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    last_params = result.params;
    last_post = result.posterior;

    result.posterior = e_step(model, prec, result.params);
    result.params.beta = update_beta(model, result.params, result.posterior);
    result.params.sigma2_xi = update_sigma_xi(model, result.params, result.posterior, config,
                                              &result.report.warnings);
    const MStepTraces traces = compute_mstep_traces(result.posterior, basis, model.p);
    result.params.sigma2_s = update_sigma_s(result.params, basis, traces, config,
                                            config.lambda, &result.report.warnings);
    result.params.kappa0 =
        update_kappa0(result.params, basis, traces, config, &result.report.warnings);
    if (model.p >= 2) {
      const auto [r0, r1] =
          update_r0_r1(result.params, basis, traces, config, &result.report.warnings);
      result.params.r0 = r0;
      result.params.r1 = r1;
    }

    prec = build_precision(result.params, basis);
    const double ll = marginal_loglik(model, prec, result.params);
    result.report.iterations = iter;
    result.report.loglik_trace.push_back(ll);
    if (!std::isfinite(ll)) {
      result.params = last_params;
      result.posterior = last_post;
      result.report.aborted = true;
      result.report.abort_reason = "non-finite log-likelihood at iteration " +
                                   std::to_string(iter);
      break;
    }
    const double denom = std::max(std::abs(ll_prev), 1e-12);
    if (std::abs(ll - ll_prev) / denom < config.rel_tol) {
      result.report.converged = true;
      ll_prev = ll;
      break;
    }
    ll_prev = ll;
  }

  if (!result.report.aborted) result.posterior = e_step(model, prec, result.params);
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

RidgeSelection select_ridge_lambda(const BauGrid& grid, const SpMat& phi,
                                   const Matrix& f_bau, const BasisSystem& basis,
                                   const std::vector<std::vector<Footprint>>& footprints,
                                   const std::vector<Vector>& values,
                                   const ModelParams& fixed, const FitConfig& config,
                                   const std::vector<double>& lambda_grid,
                                   int repetitions, std::uint64_t seed) {
  if (lambda_grid.empty())
    throw std::invalid_argument("select_ridge_lambda: empty lambda grid");
  std::vector<double> grid_sorted = lambda_grid;
  std::sort(grid_sorted.begin(), grid_sorted.end());

  RidgeSelection sel;
  sel.lambdas = grid_sorted;
  if (grid_sorted.size() == 1) {
    sel.lambda = grid_sorted[0];
    sel.scores.assign(1, 0.0);
    return sel;
  }
  if (repetitions < 2)
    throw std::invalid_argument("select_ridge_lambda: need at least 2 repetitions");

  // Fold labels are drawn per repetition and shared by all lambda values,
  // so the grids compete on identical splits.
  std::vector<std::vector<std::vector<int>>> keep(repetitions);
  for (int rep = 0; rep < repetitions; ++rep) {
    std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(rep + 1));
    std::uniform_int_distribution<int> fold(0, 4);
    keep[rep].resize(footprints.size());
    for (size_t j = 0; j < footprints.size(); ++j)
      for (size_t m = 0; m < footprints[j].size(); ++m)
        if (fold(rng) != rep % 5) keep[rep][j].push_back(static_cast<int>(m));
  }

  double best_score = std::numeric_limits<double>::infinity();
  for (size_t li = 0; li < grid_sorted.size(); ++li) {
    const double lambda = grid_sorted[li];
    std::vector<double> s_hats, xi_hats;
    for (int rep = 0; rep < repetitions; ++rep) {
      std::vector<std::vector<Footprint>> sub_fp(footprints.size());
      std::vector<Vector> sub_val(footprints.size());
      for (size_t j = 0; j < footprints.size(); ++j) {
        const auto& idx = keep[rep][j];
        sub_val[j] = Vector(idx.size());
        for (size_t m = 0; m < idx.size(); ++m) {
          sub_fp[j].push_back(footprints[j][idx[m]]);
          sub_val[j][static_cast<Eigen::Index>(m)] = values[j][idx[m]];
        }
      }
      try {
        ModelParams sub = fixed;
        sub.v_eps.clear();  // footprint weights do not survive subsetting
        const StackedModel sub_model =
            build_stacked_model(grid, phi, f_bau, sub_fp, sub_val, sub);
        FitConfig cfg = config;
        cfg.lambda = lambda;
        const ModelParams start = default_init(sub_model, fixed.sigma2_eps, fixed.nu);
        const FitResult fit_res = fit(sub_model, basis, start, cfg);
        s_hats.push_back(fit_res.params.sigma2_s.mean());
        xi_hats.push_back(fit_res.params.sigma2_xi.mean());
      } catch (const std::exception& e) {
        sel.flags.push_back("fit failed at lambda=" + std::to_string(lambda) + " rep=" +
                            std::to_string(rep) + ": " + e.what());
      }
    }
    double score = std::numeric_limits<double>::infinity();
    if (s_hats.size() >= 2) {
      double mean = 0.0;
      for (double v : s_hats) mean += v;
      mean /= static_cast<double>(s_hats.size());
      const double b_score = mean + sample_sd(s_hats);
      double c_score = pearson(s_hats, xi_hats);
      if (!std::isfinite(c_score)) {
        sel.flags.push_back("degenerate correlation at lambda=" + std::to_string(lambda));
        c_score = 0.0;
      }
      score = b_score + std::abs(c_score);
    } else {
      sel.flags.push_back("too few successful fits at lambda=" + std::to_string(lambda));
    }
    sel.scores.push_back(score);
    if (score <= best_score) {  // ties break toward the larger lambda
      best_score = score;
      sel.lambda = lambda;
    }
  }
  return sel;
}

}  // namespace cofrk
