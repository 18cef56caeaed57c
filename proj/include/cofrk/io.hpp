#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cofrk/em.hpp"
#include "cofrk/simulate.hpp"

namespace cofrk::io {

/// Sectioned key-value configuration ([section] headers, key = value lines,
/// '#' comments, space-separated lists).
struct Config {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

BauGrid grid_from_config(const Config& config);
std::vector<BasisLevelSpec> basis_spec_from_config(const Config& config);
FitConfig fit_config_from_config(const Config& config);

/// Full scenario assembly; [true] holds the generative parameters and
/// [scenario] the sampling design. Missing keys fall back to the
/// two-process defaults.
ScenarioConfig scenario_from_config(const Config& config);

/// Point observation rows of the dataset CSV
/// (process_id,x,y,value[,footprint_id,xmin,xmax,ymin,ymax]).
struct DatasetRow {
  int process_id = 0;
  bool is_rect = false;
  double x = 0.0, y = 0.0;
  Rect rect;
  double value = 0.0;
};

std::vector<DatasetRow> read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const std::vector<DatasetRow>& rows);

struct LoadedData {
  int p = 0;
  std::vector<std::vector<Footprint>> footprints;
  std::vector<Vector> values;
};

LoadedData group_dataset(const std::vector<DatasetRow>& rows, int expected_p = 0);

void write_params_json(const std::string& path, const ModelParams& params);
ModelParams read_params_json(const std::string& path);
void write_fit_report_json(const std::string& path, const FitReport& report);

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);
void write_recovery_csv(const std::string& path, const RecoveryResult& result);
void write_recovery_summary_csv(const std::string& path, const RecoveryResult& result);
void write_rho_curves_csv(const std::string& path, const RecoveryResult& result);
void write_ridge_csv(const std::string& path, const RidgeResult& result);

/// Predictions CSV with columns process_id,target_id,target_kind,mean,variance.
void write_predictions_csv(const std::string& path, const PredictionResult& result,
                           bool include_bau, int n_regions);

/// Shortest round-trippable decimal representation; keeps data files
/// byte-stable across runs.
std::string format_double(double value);

}  // namespace cofrk::io
