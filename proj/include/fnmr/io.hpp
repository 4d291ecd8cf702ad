#pragma once

#include "fnmr/common.hpp"
#include "fnmr/distance.hpp"
#include "fnmr/embed.hpp"
#include "fnmr/quality.hpp"
#include "fnmr/synthdata.hpp"
#include "fnmr/tune.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace fnmr {

/// Shortest decimal text that round-trips the value exactly.
std::string format_double(double v);

/// Parsed numeric CSV with optional header row of names.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

/// Reads a comma-separated numeric table. With `header` set, the first
/// non-empty line is kept as column names. Errors name the line and column.
CsvTable read_csv(const std::filesystem::path& path, bool header = false);

void write_csv(const std::filesystem::path& path, const Matrix& m,
               const std::vector<std::string>& header = {});

/// First row is the grid unless `has_grid` is false, in which case an
/// equispaced grid on [0,1] is assumed.
FunctionalDataset load_dataset_csv(const std::filesystem::path& path, bool has_grid = true);
void save_dataset_csv(const std::filesystem::path& path, const FunctionalDataset& data);

/// Header names the active parameters; one row per observation.
ParamSample load_params_csv(const std::filesystem::path& path);
void save_params_csv(const std::filesystem::path& path, const ParamSample& params);

/// Square, header-free.
DistanceMatrix load_distance_csv(const std::filesystem::path& path);
void save_distance_csv(const std::filesystem::path& path, const DistanceMatrix& d);

/// Coordinates only, one row per point, no header.
Matrix load_embedding_csv(const std::filesystem::path& path);
void save_embedding(const std::filesystem::path& csv_path, const Embedding& emb);

/// `emb.csv` -> `emb.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Quality curve as rows (g, Q_RX, R_NX); R_NX is empty at g = n-1.
void save_curve_csv(const std::filesystem::path& path, const QualityCurve& curve);

/// One row per configuration: ordinal, axis values, seed, score, status.
void save_trace_csv(const std::filesystem::path& path, const GridSpec& grid, const TuningResult& r);

nlohmann::ordered_json to_json(const HyperParams& h);
HyperParams hyper_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const Embedding& emb);  // sidecar, no coordinates
nlohmann::ordered_json to_json(const QualityReport& r);
nlohmann::ordered_json to_json(const TuningResult& r);  // summary, no trace
nlohmann::ordered_json to_json(const GridSpec& g);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace fnmr
