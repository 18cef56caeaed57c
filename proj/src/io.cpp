#include "cofrk/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cofrk::io {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(context + ": cannot parse number '" + s + "'");
  }
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

/// Broadcasts a one-element list across p processes.
Vector per_process(const std::vector<double>& v, int p, const std::string& key) {
  if (v.empty()) throw std::invalid_argument("config: empty list for " + key);
  if (static_cast<int>(v.size()) == p) return to_vector(v);
  if (v.size() == 1) return Vector::Constant(p, v[0]);
  throw std::invalid_argument("config: " + key + " needs 1 or " + std::to_string(p) + " values");
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto sit = sections.find(section);
  if (sit == sections.end()) return false;
  return sit->second.find(key) != sit->second.end();
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const auto sit = sections.find(section);
  if (sit == sections.end()) return fallback;
  const auto kit = sit->second.find(key);
  return kit == sit->second.end() ? fallback : kit->second;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  if (!has(section, key)) return fallback;
  return parse_double(get_string(section, key, ""), "config [" + section + "] " + key);
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  if (!has(section, key)) return fallback;
  return static_cast<int>(get_double(section, key, fallback));
}

std::vector<double> Config::get_doubles(const std::string& section,
                                        const std::string& key) const {
  std::vector<double> out;
  if (!has(section, key)) return out;
  std::stringstream ss(get_string(section, key, ""));
  std::string token;
  while (ss >> token)
    out.push_back(parse_double(token, "config [" + section + "] " + key));
  return out;
}

Config parse_config_text(const std::string& text) {
  Config config;
  std::string section = "";
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    config.sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return config;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

BauGrid grid_from_config(const Config& config) {
  Rect bounds;
  bounds.x_min = config.get_double("domain", "x_min", 0.0);
  bounds.x_max = config.get_double("domain", "x_max", 1.0);
  bounds.y_min = config.get_double("domain", "y_min", 0.0);
  bounds.y_max = config.get_double("domain", "y_max", 1.0);
  return build_bau_grid(bounds, config.get_int("domain", "nx", 32),
                        config.get_int("domain", "ny", 32));
}

std::vector<BasisLevelSpec> basis_spec_from_config(const Config& config) {
  std::vector<BasisLevelSpec> spec;
  const std::vector<double> lattice = config.get_doubles("basis", "lattice");
  const std::vector<double> scales = config.get_doubles("basis", "scales");
  if (lattice.empty() && scales.empty()) return spec;
  if (lattice.size() != scales.size())
    throw std::invalid_argument("config [basis]: lattice and scales lengths differ");
  for (size_t l = 0; l < lattice.size(); ++l)
    spec.push_back({static_cast<int>(lattice[l]), scales[l]});
  return spec;
}

FitConfig fit_config_from_config(const Config& config) {
  FitConfig fit;
  fit.rel_tol = config.get_double("fit", "rel_tol", fit.rel_tol);
  fit.max_iter = config.get_int("fit", "max_iter", fit.max_iter);
  fit.inner_tol = config.get_double("fit", "inner_tol", fit.inner_tol);
  fit.inner_max_evals = config.get_int("fit", "inner_max_evals", fit.inner_max_evals);
  fit.lambda = config.get_double("fit", "lambda", fit.lambda);
  fit.sigma2_s_lo = config.get_double("fit", "sigma2_s_lo", fit.sigma2_s_lo);
  fit.sigma2_s_hi = config.get_double("fit", "sigma2_s_hi", fit.sigma2_s_hi);
  fit.sigma2_xi_lo = config.get_double("fit", "sigma2_xi_lo", fit.sigma2_xi_lo);
  fit.sigma2_xi_hi = config.get_double("fit", "sigma2_xi_hi", fit.sigma2_xi_hi);
  fit.kappa0_lo = config.get_double("fit", "kappa0_lo", fit.kappa0_lo);
  fit.kappa0_hi = config.get_double("fit", "kappa0_hi", fit.kappa0_hi);
  fit.r1_hi = config.get_double("fit", "r1_hi", fit.r1_hi);
  return fit;
}

ScenarioConfig scenario_from_config(const Config& config) {
  ScenarioConfig sc = default_bivariate_config();
  const BauGrid grid = grid_from_config(config);
  sc.domain = grid.bounds;
  sc.grid_nx = grid.nx;
  sc.grid_ny = grid.ny;
  sc.basis_spec = basis_spec_from_config(config);
  sc.fit = fit_config_from_config(config);

  const int p = config.get_int("model", "processes", 2);
  const std::string covariates = config.get_string("model", "covariates", "none");
  const int q = (covariates == "intercept") ? 1 : 0;
  ModelParams truth = ModelParams::make(p, q);
  auto load = [&](const char* key, Vector* dst, double fallback) {
    const std::vector<double> v = config.get_doubles("true", key);
    *dst = v.empty() ? Vector::Constant(p, fallback) : per_process(v, p, key);
  };
  load("sigma2_s", &truth.sigma2_s, 0.7);
  load("sigma2_xi", &truth.sigma2_xi, 0.01);
  load("sigma2_eps", &truth.sigma2_eps, 1e-4);
  {
    const std::vector<double> v = config.get_doubles("model", "nu");
    truth.nu = v.empty() ? Vector::Constant(p, 0.5) : per_process(v, p, "nu");
  }
  truth.r0 = config.get_double("true", "r0", p >= 2 ? 0.9 : 0.0);
  truth.r1 = config.get_double("true", "r1", p >= 2 ? 0.5 : 0.0);
  truth.kappa0 = config.get_double("true", "kappa0", 0.05);
  if (q == 1) {
    const std::vector<double> b = config.get_doubles("true", "beta");
    truth.beta = b.empty() ? Matrix::Zero(p, 1) : Matrix(per_process(b, p, "beta"));
  }
  sc.truth = truth;

  sc.n_total = config.get_int("scenario", "n_total", 1000);
  sc.n_train = config.get_int("scenario", "n_train", 800);
  sc.seed = static_cast<std::uint64_t>(config.get_double("scenario", "seed", 1));
  {
    const std::vector<double> f = config.get_doubles("scenario", "sample_fraction");
    if (!f.empty()) sc.sample_fraction = per_process(f, p, "sample_fraction");
  }
  {
    const std::vector<double> m = config.get_doubles("scenario", "missing_proportions");
    if (!m.empty()) sc.missing_proportions = m;
  }
  return sc;
}

std::vector<DatasetRow> read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dataset file: " + path);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty file");
  ++lineno;
  const std::vector<std::string> header = split_csv_line(line);
  auto col = [&](const std::string& name) -> int {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  };
  const int c_proc = col("process_id"), c_x = col("x"), c_y = col("y"), c_val = col("value");
  const int c_xmin = col("xmin"), c_xmax = col("xmax"), c_ymin = col("ymin"), c_ymax = col("ymax");
  if (c_proc < 0 || c_val < 0 || (c_x < 0 && c_xmin < 0))
    throw std::invalid_argument(path + " line 1: need process_id,value and x,y or xmin..ymax columns");

  std::vector<DatasetRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    const std::string ctx = path + " line " + std::to_string(lineno);
    auto field = [&](int c) -> const std::string& {
      if (c < 0 || c >= static_cast<int>(f.size()))
        throw std::invalid_argument(ctx + ": missing column");
      return f[c];
    };
    DatasetRow row;
    row.process_id = static_cast<int>(parse_double(field(c_proc), ctx));
    row.value = parse_double(field(c_val), ctx);
    const bool has_rect = c_xmin >= 0 && c_xmin < static_cast<int>(f.size()) &&
                          !f[c_xmin].empty();
    if (has_rect) {
      row.is_rect = true;
      row.rect.x_min = parse_double(field(c_xmin), ctx);
      row.rect.x_max = parse_double(field(c_xmax), ctx);
      row.rect.y_min = parse_double(field(c_ymin), ctx);
      row.rect.y_max = parse_double(field(c_ymax), ctx);
    } else {
      row.x = parse_double(field(c_x), ctx);
      row.y = parse_double(field(c_y), ctx);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_dataset_csv(const std::string& path, const std::vector<DatasetRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write dataset file: " + path);
  bool any_rect = false;
  for (const DatasetRow& r : rows) any_rect = any_rect || r.is_rect;
  out << (any_rect ? "process_id,x,y,value,xmin,xmax,ymin,ymax\n" : "process_id,x,y,value\n");
  for (const DatasetRow& r : rows) {
    out << r.process_id << ',' << format_double(r.x) << ',' << format_double(r.y) << ','
        << format_double(r.value);
    if (any_rect) {
      if (r.is_rect)
        out << ',' << format_double(r.rect.x_min) << ',' << format_double(r.rect.x_max) << ','
            << format_double(r.rect.y_min) << ',' << format_double(r.rect.y_max);
      else
        out << ",,,,";
    }
    out << '\n';
  }
}

LoadedData group_dataset(const std::vector<DatasetRow>& rows, int expected_p) {
  LoadedData data;
  for (const DatasetRow& r : rows) data.p = std::max(data.p, r.process_id + 1);
  data.p = std::max(data.p, expected_p);
  if (data.p == 0) throw std::invalid_argument("group_dataset: no observations");
  data.footprints.resize(data.p);
  std::vector<std::vector<double>> vals(data.p);
  for (const DatasetRow& r : rows) {
    if (r.process_id < 0)
      throw std::invalid_argument("group_dataset: negative process_id");
    const int id = static_cast<int>(data.footprints[r.process_id].size());
    data.footprints[r.process_id].push_back(
        r.is_rect ? Footprint::rectangle(id, r.rect, r.process_id)
                  : Footprint::point(id, r.x, r.y, r.process_id));
    vals[r.process_id].push_back(r.value);
  }
  for (int j = 0; j < data.p; ++j) data.values.push_back(to_vector(vals[j]));
  return data;
}

void write_params_json(const std::string& path, const ModelParams& params) {
  nlohmann::json j;
  j["version"] = 1;
  j["p"] = params.p;
  j["q"] = params.q;
  j["beta"] = std::vector<std::vector<double>>();
  for (int r = 0; r < params.p; ++r) {
    std::vector<double> row;
    for (int c = 0; c < params.q; ++c) row.push_back(params.beta(r, c));
    j["beta"].push_back(row);
  }
  auto vec = [](const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  j["sigma2_s"] = vec(params.sigma2_s);
  j["nu"] = vec(params.nu);
  j["r0"] = params.r0;
  j["r1"] = params.r1;
  j["kappa0"] = params.kappa0;
  j["sigma2_xi"] = vec(params.sigma2_xi);
  j["sigma2_eps"] = vec(params.sigma2_eps);
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write params file: " + path);
  out << j.dump(2) << '\n';
}

ModelParams read_params_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open params file: " + path);
  nlohmann::json j;
  in >> j;
  ModelParams params = ModelParams::make(j.at("p").get<int>(), j.at("q").get<int>());
  auto vec = [&](const char* key) {
    const std::vector<double> v = j.at(key).get<std::vector<double>>();
    return to_vector(v);
  };
  params.sigma2_s = vec("sigma2_s");
  params.nu = vec("nu");
  params.sigma2_xi = vec("sigma2_xi");
  params.sigma2_eps = vec("sigma2_eps");
  params.r0 = j.at("r0").get<double>();
  params.r1 = j.at("r1").get<double>();
  params.kappa0 = j.at("kappa0").get<double>();
  const auto beta = j.at("beta").get<std::vector<std::vector<double>>>();
  for (int r = 0; r < params.p; ++r)
    for (int c = 0; c < params.q; ++c) params.beta(r, c) = beta.at(r).at(c);
  params.validate();
  return params;
}

void write_fit_report_json(const std::string& path, const FitReport& report) {
  nlohmann::json j;
  j["loglik_trace"] = report.loglik_trace;
  j["warnings"] = report.warnings;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["aborted"] = report.aborted;
  j["abort_reason"] = report.abort_reason;
  j["wall_seconds"] = report.wall_seconds;
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write report file: " + path);
  out << j.dump(2) << '\n';
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write metrics file: " + path);
  out << "experiment,param,replication,model,process,rmse,mae,r2,in_region_rmse,rel_improvement\n";
  for (const MetricsRow& r : rows)
    out << r.experiment << ',' << format_double(r.param) << ',' << r.replication << ','
        << r.model << ',' << r.process << ',' << format_double(r.rmse) << ','
        << format_double(r.mae) << ',' << format_double(r.r2) << ','
        << format_double(r.in_region_rmse) << ',' << format_double(r.rel_improvement) << '\n';
}

void write_recovery_csv(const std::string& path, const RecoveryResult& result) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write recovery file: " + path);
  out << "scenario,replication,ok,converged,iterations,r0_hat,r1_hat,loglik\n";
  for (const RecoveryRow& r : result.rows)
    out << result.scenario << ',' << r.replication << ',' << (r.ok ? 1 : 0) << ','
        << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << format_double(r.r0) << ','
        << format_double(r.r1) << ',' << format_double(r.loglik) << '\n';
}

void write_recovery_summary_csv(const std::string& path, const RecoveryResult& result) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write summary file: " + path);
  out << "scenario,n_ok,n_failed,mean_r0,sd_r0,mean_r1,sd_r1\n";
  out << result.scenario << ',' << (result.rows.size() - result.n_failed) << ','
      << result.n_failed << ',' << format_double(result.mean_r0) << ','
      << format_double(result.sd_r0) << ',' << format_double(result.mean_r1) << ','
      << format_double(result.sd_r1) << '\n';
}

void write_rho_curves_csv(const std::string& path, const RecoveryResult& result) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write curves file: " + path);
  out << "replication,level,rho_hat\n";
  for (const RecoveryRow& r : result.rows) {
    if (!r.ok) continue;
    for (size_t l = 0; l < r.rho_hat.size(); ++l)
      out << r.replication << ',' << (l + 1) << ',' << format_double(r.rho_hat[l]) << '\n';
  }
}

void write_ridge_csv(const std::string& path, const RidgeResult& result) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write ridge file: " + path);
  out << "replication,lambda_star,sigma2_s_unpenalized,sigma2_s_penalized,"
         "sigma2_xi_unpenalized,sigma2_xi_penalized\n";
  for (const RidgeRow& r : result.rows)
    out << r.replication << ',' << format_double(result.lambda_star) << ','
        << format_double(r.sigma2_s_unpenalized) << ',' << format_double(r.sigma2_s_penalized)
        << ',' << format_double(r.sigma2_xi_unpenalized) << ','
        << format_double(r.sigma2_xi_penalized) << '\n';
}

void write_predictions_csv(const std::string& path, const PredictionResult& result,
                           bool include_bau, int n_regions) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write predictions file: " + path);
  out << "process_id,target_id,target_kind,mean,variance\n";
  for (size_t j = 0; j < result.bau_mean.size(); ++j) {
    if (include_bau)
      for (Eigen::Index b = 0; b < result.bau_mean[j].size(); ++b)
        out << j << ',' << b << ",bau," << format_double(result.bau_mean[j][b]) << ','
            << format_double(result.bau_variance[j][b]) << '\n';
    if (n_regions > 0 && j < result.region_mean.size())
      for (int k = 0; k < n_regions; ++k)
        out << j << ',' << k << ",region," << format_double(result.region_mean[j][k]) << ','
            << format_double(result.region_variance[j][k]) << '\n';
  }
}

}  // namespace cofrk::io
