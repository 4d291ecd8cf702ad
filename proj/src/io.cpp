#include "fnmr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fnmr {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, const fs::path& path, std::size_t line, std::size_t col) {
  double v = 0.0;
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    throw Error(path.string() + ": line " + std::to_string(line) + ", column " + std::to_string(col) +
                ": non-numeric value '" + std::string(cell) + "'");
  }
  return v;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_row(std::ostream& os, const auto& row) {
  for (Index j = 0; j < row.size(); ++j) {
    if (j) os << ',';
    os << format_double(row(j));
  }
  os << '\n';
}

// Whole numbers print without a fractional part.
nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v) && std::floor(v) == v && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  return v;
}

}  // namespace

CsvTable read_csv(const fs::path& path, bool header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool header_done = !header;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!header_done) {
      for (auto c : cells) table.header.emplace_back(c);
      width = cells.size();
      header_done = true;
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw Error(path.string() + ": line " + std::to_string(lineno) + ": expected " +
                  std::to_string(width) + " columns, found " + std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_cell(cells[c], path, lineno, c + 1);
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) table.values(r, c) = rows[r][c];
  return table;
}

void write_csv(const fs::path& path, const Matrix& m, const std::vector<std::string>& header) {
  auto out = open_out(path);
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
  }
  for (Index i = 0; i < m.rows(); ++i) write_row(out, m.row(i));
}

FunctionalDataset load_dataset_csv(const fs::path& path, bool has_grid) {
  const CsvTable t = read_csv(path);
  FunctionalDataset data;
  data.provenance = "external";
  if (has_grid) {
    require(t.values.rows() >= 1, path.string() + ": empty file");
    data.grid = t.values.row(0).transpose();
    for (Index j = 1; j < data.grid.size(); ++j) {
      if (!(data.grid(j) > data.grid(j - 1)))
        throw Error(path.string() + ": line 1, column " + std::to_string(j + 1) +
                    ": grid values must be strictly increasing (duplicate or out of order)");
    }
    data.values = t.values.bottomRows(t.values.rows() - 1);
  } else {
    data.values = t.values;
    data.grid = equispaced_grid(std::max<Index>(t.values.cols(), 2));
  }
  data.validate();
  return data;
}

void save_dataset_csv(const fs::path& path, const FunctionalDataset& data) {
  auto out = open_out(path);
  write_row(out, data.grid);
  for (Index i = 0; i < data.values.rows(); ++i) write_row(out, data.values.row(i));
}

ParamSample load_params_csv(const fs::path& path) {
  CsvTable t = read_csv(path, true);
  ParamSample p;
  p.values = std::move(t.values);
  p.active_params = std::move(t.header);
  p.intrinsic = p.values;
  return p;
}

void save_params_csv(const fs::path& path, const ParamSample& params) {
  write_csv(path, params.values, params.active_params);
}

DistanceMatrix load_distance_csv(const fs::path& path) {
  DistanceMatrix d;
  d.d = read_csv(path).values;
  require(d.d.rows() == d.d.cols(), path.string() + ": distance matrix must be square");
  d.validate(1e-9 * std::max(1.0, d.d.cwiseAbs().maxCoeff()));
  d.d = 0.5 * (d.d + d.d.transpose());
  return d;
}

void save_distance_csv(const fs::path& path, const DistanceMatrix& d) { write_csv(path, d.d); }

Matrix load_embedding_csv(const fs::path& path) { return read_csv(path).values; }

fs::path sidecar_path(const fs::path& csv_path) {
  fs::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

void save_embedding(const fs::path& csv_path, const Embedding& emb) {
  write_csv(csv_path, emb.coords);
  write_json(sidecar_path(csv_path), to_json(emb));
}

void save_curve_csv(const fs::path& path, const QualityCurve& curve) {
  auto out = open_out(path);
  out << "g,qrx,rnx\n";
  for (Index g = 1; g <= curve.qrx.size(); ++g) {
    out << g << ',' << format_double(curve.qrx(g - 1)) << ',';
    if (g <= curve.rnx.size()) out << format_double(curve.rnx(g - 1));
    out << '\n';
  }
}

void save_trace_csv(const fs::path& path, const GridSpec& grid, const TuningResult& r) {
  auto out = open_out(path);
  out << "ordinal";
  for (const auto& a : grid.axes) out << ',' << a.name;
  out << ",seed,score,status\n";
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const TraceEntry& e = r.trace[i];
    out << i;
    for (const auto& a : grid.axes) out << ',' << format_double(get_hyper(e.hyper, a.name));
    out << ',' << e.seed << ',' << format_double(e.score) << ',';
    if (e.ok) {
      out << "ok";
    } else {
      std::string msg = e.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << "error: " << msg;
    }
    out << '\n';
  }
}

nlohmann::ordered_json to_json(const HyperParams& h) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(h.method));
  for (const auto& name : axis_names(h.method)) {
    if (h.method == Method::umap && name == "init")
      j[name] = std::string(to_string(h.init));
    else
      j[name] = json_number(get_hyper(h, name));
  }
  return j;
}

HyperParams hyper_from_json(const nlohmann::json& j) {
  HyperParams h;
  h.method = parse_method(j.at("method").get<std::string>());
  for (const auto& name : axis_names(h.method)) {
    if (!j.contains(name)) continue;
    if (h.method == Method::umap && name == "init")
      h.init = parse_umap_init(j.at(name).get<std::string>());
    else
      set_hyper(h, name, j.at(name).get<double>());
  }
  return h;
}

nlohmann::ordered_json to_json(const Embedding& emb) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(emb.method));
  j["hyper"] = to_json(emb.hyper);
  j["seed"] = emb.seed;
  j["n"] = emb.size();
  j["dim"] = emb.dim();
  nlohmann::ordered_json diag = nlohmann::ordered_json::object();
  for (const auto& [k, v] : emb.diagnostics) diag[k] = v;
  j["diagnostics"] = diag;
  j["warnings"] = emb.warnings;
  return j;
}

nlohmann::ordered_json to_json(const QualityReport& r) {
  nlohmann::ordered_json j;
  j["auc"] = r.auc;
  j["q_local"] = r.q_local;
  j["q_global"] = r.q_global;
  j["g_max"] = r.curve.g_max;
  j["m"] = std::string(to_string(r.metric));
  j["space"] = std::string(to_string(r.space));
  j["geodesic_k"] = r.geodesic_k;
  if (!r.embedding_id.empty()) j["embedding"] = r.embedding_id;
  return j;
}

nlohmann::ordered_json to_json(const TuningResult& r) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(r.method));
  j["objective"] = std::string(to_string(r.objective));
  j["m"] = std::string(to_string(r.metric));
  j["space"] = std::string(to_string(r.space));
  j["geodesic_k"] = r.geodesic_k;
  j["seed"] = r.seed;
  j["best_ordinal"] = r.best_ordinal;
  j["best_score"] = r.best_score;
  j["best_hyper"] = to_json(r.best_hyper);
  j["configurations"] = r.trace.size();
  std::size_t failed = 0;
  for (const auto& e : r.trace) failed += e.ok ? 0 : 1;
  j["failed"] = failed;
  return j;
}

nlohmann::ordered_json to_json(const GridSpec& g) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(g.method));
  j["size"] = g.size();
  nlohmann::ordered_json axes = nlohmann::ordered_json::object();
  for (const auto& a : g.axes) axes[a.name] = a.values;
  j["axes"] = axes;
  j["notes"] = g.notes;
  return j;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace fnmr
