#pragma once

#include "fnmr/common.hpp"
#include "fnmr/distance.hpp"
#include "fnmr/embed.hpp"
#include "fnmr/quality.hpp"
#include "fnmr/tune.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fnmr {

std::string_view software_version();

struct ExperimentConfig {
  std::vector<std::string> settings = {"a3-hx"};
  Index n = 300;
  Index m = 100;
  Seed seed = 1;
  std::vector<Method> methods = {Method::mds};
  std::vector<Objective> objectives = {Objective::auc};
  std::vector<Metric> metrics = {Metric::direct, Metric::geodesic};
  std::vector<Space> spaces = {Space::function, Space::parameter};
  GridPreset grid = GridPreset::desk;
  int geodesic_k = 10;
  std::filesystem::path output_dir = "out";
  int workers = 1;  // never affects results
  std::map<Method, std::map<std::string, std::vector<double>>> grid_overrides;

  /// Throws Error for unknown settings, empty lists or bad sizes.
  void validate() const;
};

/// Recognized keys: settings, n, m, seed, methods, objectives, metrics,
/// spaces, grid, geodesic_k, output_dir, workers, and grids (an object of
/// method -> axis -> value list). Unknown keys throw.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

/// Everything except `workers` and `output_dir`, so artifacts depend on
/// neither the worker count nor their location.
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

/// One protocol cell: (setting, method, objective, metric, space).
struct ExperimentRecord {
  std::string setting;
  Method method = Method::mds;
  Objective objective = Objective::auc;
  Metric metric = Metric::direct;
  Space space = Space::function;

  bool ok = false;
  std::string error;

  TuningResult tuning;               // trace is empty when read back from JSON
  std::optional<Embedding> best;     // absent when read back or failed
  std::vector<QualityReport> reports;  // fs-dir, fs-geo, ps-dir, ps-geo
  std::map<std::string, std::string> artifacts;  // relative to the output directory

  /// Report for the given reference, if present.
  const QualityReport* report(Space s, Metric m) const;
};

/// Directory of a cell below the output root.
std::filesystem::path cell_dir(const std::string& setting, Method method, Objective o, Metric m, Space s);

/// Runs every requested cell, writes artifacts below `cfg.output_dir` and
/// a summary `experiment.json`. Failures are recorded, never thrown.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg);

nlohmann::ordered_json to_json(const ExperimentRecord& r);
ExperimentRecord record_from_json(const nlohmann::json& j);

/// Reads `experiment.json` written by run_experiment.
std::vector<ExperimentRecord> load_experiment(const std::filesystem::path& dir);

/// Settings whose parameter- and function-space tuning results are compared.
const std::vector<std::string>& delta_settings();

struct DeltaRow {
  Method method = Method::mds;
  Metric metric = Metric::direct;
  double mean_ps = 0.0;
  double mean_fs = 0.0;
  std::optional<double> delta;        // absent when cells are missing
  std::vector<std::string> missing;   // "setting/space" of missing or failed cells
};

/// |mean best AUC tuned on parameter space - mean tuned on function space|
/// over delta_settings(), per method, using AUC-objective records.
std::vector<DeltaRow> delta_report(const std::vector<ExperimentRecord>& records, Metric metric);

}  // namespace fnmr
