#include "fnmr/experiment.hpp"

#include "fnmr/io.hpp"
#include "fnmr/svg.hpp"
#include "fnmr/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#ifndef FNMR_VERSION
#define FNMR_VERSION "unknown"
#endif

namespace fnmr {

namespace fs = std::filesystem;

std::string_view software_version() { return FNMR_VERSION; }

void ExperimentConfig::validate() const {
  require(!settings.empty(), "config: no settings");
  for (const auto& s : settings) find_setting(s);
  require(!methods.empty(), "config: no methods");
  require(!objectives.empty() && !metrics.empty() && !spaces.empty(),
          "config: objectives, metrics and spaces must be non-empty");
  for (Space s : spaces)
    require(s == Space::function || s == Space::parameter, "config: spaces must be function or parameter");
  require(n >= 3, "config: n must be at least 3");
  require(m >= 2, "config: m must be at least 2");
  require(geodesic_k >= 1 && geodesic_k <= n - 1, "config: geodesic_k must lie in [1, n-1]");
  require(workers >= 1, "config: workers must be positive");
  require(!output_dir.empty(), "config: output_dir is empty");
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const nlohmann::json& j, Parse parse) {
  std::vector<T> out;
  if (j.is_string()) {
    out.push_back(parse(j.get<std::string>()));
    return out;
  }
  for (const auto& v : j) out.push_back(parse(v.get<std::string>()));
  return out;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig cfg) {
  require(j.is_object(), "config: expected a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "settings") {
        cfg.settings = parse_list<std::string>(v, [](const std::string& s) { return s; });
      } else if (key == "n") {
        cfg.n = v.get<Index>();
      } else if (key == "m") {
        cfg.m = v.get<Index>();
      } else if (key == "seed") {
        cfg.seed = v.get<Seed>();
      } else if (key == "methods") {
        cfg.methods = parse_list<Method>(v, [](const std::string& s) { return parse_method(s); });
      } else if (key == "objectives") {
        cfg.objectives = parse_list<Objective>(v, [](const std::string& s) { return parse_objective(s); });
      } else if (key == "metrics") {
        cfg.metrics = parse_list<Metric>(v, [](const std::string& s) { return parse_metric(s); });
      } else if (key == "spaces") {
        cfg.spaces = parse_list<Space>(v, [](const std::string& s) { return parse_space(s); });
      } else if (key == "grid") {
        cfg.grid = parse_grid_preset(v.get<std::string>());
      } else if (key == "geodesic_k") {
        cfg.geodesic_k = v.get<int>();
      } else if (key == "output_dir") {
        cfg.output_dir = v.get<std::string>();
      } else if (key == "workers") {
        cfg.workers = v.get<int>();
      } else if (key == "grids") {
        for (const auto& [method, axes] : v.items()) {
          auto& target = cfg.grid_overrides[parse_method(method)];
          for (const auto& [axis, values] : axes.items()) target[axis] = values.get<std::vector<double>>();
        }
      } else {
        throw Error("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return cfg;
}

nlohmann::ordered_json to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["settings"] = cfg.settings;
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["seed"] = cfg.seed;
  auto names = [](const auto& items) {
    std::vector<std::string> out;
    for (const auto& x : items) out.emplace_back(to_string(x));
    return out;
  };
  j["methods"] = names(cfg.methods);
  j["objectives"] = names(cfg.objectives);
  j["metrics"] = names(cfg.metrics);
  j["spaces"] = names(cfg.spaces);
  j["grid"] = std::string(to_string(cfg.grid));
  j["geodesic_k"] = cfg.geodesic_k;
  nlohmann::ordered_json grids = nlohmann::ordered_json::object();
  for (const auto& [method, axes] : cfg.grid_overrides) {
    nlohmann::ordered_json a = nlohmann::ordered_json::object();
    for (const auto& [axis, values] : axes) a[axis] = values;
    grids[std::string(to_string(method))] = a;
  }
  j["grids"] = grids;
  return j;
}

const QualityReport* ExperimentRecord::report(Space s, Metric m) const {
  for (const auto& r : reports)
    if (r.space == s && r.metric == m) return &r;
  return nullptr;
}

fs::path cell_dir(const std::string& setting, Method method, Objective o, Metric m, Space s) {
  const std::string space = s == Space::function ? "fs" : s == Space::parameter ? "ps" : "es";
  return fs::path(setting) / std::string(to_string(method)) /
         (std::string(to_string(o)) + "_" + std::string(to_string(m)) + "_" + space);
}

namespace {

std::string space_tag(Space s) { return s == Space::function ? "fs" : s == Space::parameter ? "ps" : "es"; }

struct Cell {
  Objective objective;
  Metric metric;
  Space space;
};

std::vector<Cell> protocol_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  for (Objective o : cfg.objectives)
    for (Metric m : cfg.metrics)
      for (Space s : cfg.spaces) cells.push_back({o, m, s});
  return cells;
}

ExperimentRecord blank_record(const std::string& setting, Method method, const Cell& c) {
  ExperimentRecord r;
  r.setting = setting;
  r.method = method;
  r.objective = c.objective;
  r.metric = c.metric;
  r.space = c.space;
  r.tuning.method = method;
  r.tuning.objective = c.objective;
  r.tuning.metric = c.metric;
  r.tuning.space = c.space;
  return r;
}

// Fits the winning configuration again and writes the cell's artifacts.
void finish_cell(ExperimentRecord& rec, const ExperimentConfig& cfg, const DistanceMatrix& input_d,
                 const std::vector<std::shared_ptr<const ReferenceRanks>>& refs, const GridSpec& grid,
                 const Vector& color) {
  const fs::path rel = cell_dir(rec.setting, rec.method, rec.objective, rec.metric, rec.space);
  const fs::path dir = cfg.output_dir / rel;
  fs::create_directories(dir);
  save_trace_csv(dir / "trace.csv", grid, rec.tuning);
  rec.artifacts["trace"] = (rel / "trace.csv").generic_string();
  write_json(dir / "tuning.json", to_json(rec.tuning));
  rec.artifacts["tuning"] = (rel / "tuning.json").generic_string();
  if (!rec.tuning.any_ok()) {
    const auto& first = rec.tuning.trace.front();
    throw Error("every configuration failed; first error: " + first.error);
  }

  const TraceEntry& winner = rec.tuning.trace[static_cast<std::size_t>(rec.tuning.best_ordinal)];
  Embedding emb = fit_embedding(input_d, winner.hyper, winner.seed, cfg.workers);
  const RankTable emb_ranks = embedding_ranks(emb);
  const std::string id = std::string(to_string(emb.method)) + " " + describe(emb.hyper);
  for (const auto& ref : refs) {
    QualityReport rep = evaluate_ranks(*ref, emb_ranks);
    rep.embedding_id = id;
    rec.reports.push_back(std::move(rep));
  }

  save_embedding(dir / "embedding.csv", emb);
  rec.artifacts["embedding"] = (rel / "embedding.csv").generic_string();
  rec.artifacts["embedding_meta"] = (rel / "embedding.json").generic_string();
  nlohmann::ordered_json reps = nlohmann::ordered_json::array();
  for (const auto& r : rec.reports) reps.push_back(to_json(r));
  write_json(dir / "reports.json", reps);
  rec.artifacts["reports"] = (rel / "reports.json").generic_string();
  if (const QualityReport* own = rec.report(rec.space, rec.metric)) {
    save_curve_csv(dir / "curve.csv", own->curve);
    rec.artifacts["curve"] = (rel / "curve.csv").generic_string();
  }
  if (emb.dim() >= 2) {
    const auto files = render_scatter_svg(emb, color, dir / "scatter.svg");
    for (std::size_t i = 0; i < files.size(); ++i)
      rec.artifacts[i == 0 ? "scatter" : "scatter_13"] = (rel / files[i].filename()).generic_string();
  }
  rec.best = std::move(emb);
  rec.ok = true;
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  const std::vector<Cell> cells = protocol_cells(cfg);
  std::vector<ExperimentRecord> records;

  for (const auto& setting_name : cfg.settings) {
    const SettingSpec& setting = find_setting(setting_name);
    const std::size_t setting_begin = records.size();
    try {
      const GeneratedData gen = generate_setting(setting, cfg.n, cfg.m, cfg.seed);
      save_dataset_csv(cfg.output_dir / setting_name / "data.csv", gen.data);
      save_params_csv(cfg.output_dir / setting_name / "params.csv", gen.params);

      const DistanceMatrix fs_d = pairwise_direct(gen.data.values, std::nullopt, Space::function);
      const DistanceMatrix ps_d = pairwise_direct(gen.params.values, std::nullopt, Space::parameter);
      const double eps_s = epsilon_compute(fs_d);
      const Vector color = gen.params.values.col(0);

      // Fixed order fs-dir, fs-geo, ps-dir, ps-geo for every record.
      std::vector<std::shared_ptr<const ReferenceRanks>> refs;
      for (const DistanceMatrix* d : {&fs_d, &ps_d})
        for (Metric m : {Metric::direct, Metric::geodesic})
          refs.push_back(
              std::make_shared<const ReferenceRanks>(reference_ranks(*d, m, cfg.geodesic_k, cfg.workers)));
      auto ref_for = [&](Space s, Metric m) {
        return refs[(s == Space::function ? 0 : 2) + (m == Metric::direct ? 0 : 1)];
      };

      for (Method method : cfg.methods) {
        std::vector<ExperimentRecord> cell_records;
        for (const Cell& c : cells) cell_records.push_back(blank_record(setting_name, method, c));
        try {
          GridSpec grid = default_grid(method, cfg.n, eps_s, cfg.grid);
          if (auto it = cfg.grid_overrides.find(method); it != cfg.grid_overrides.end())
            grid = override_grid(std::move(grid), it->second);
          write_json(cfg.output_dir / setting_name / std::string(to_string(method)) / "grid.json",
                     to_json(grid));
          std::vector<TuningTarget> targets;
          for (const Cell& c : cells) targets.push_back({ref_for(c.space, c.metric), c.objective});
          std::vector<TuningResult> results = grid_search_multi(fs_d, targets, grid, cfg.seed, cfg.workers);
          for (std::size_t i = 0; i < cells.size(); ++i) {
            ExperimentRecord& rec = cell_records[i];
            rec.tuning = std::move(results[i]);
            try {
              finish_cell(rec, cfg, fs_d, refs, grid, color);
            } catch (const std::exception& e) {
              rec.ok = false;
              rec.error = e.what();
            }
          }
        } catch (const std::exception& e) {
          for (auto& rec : cell_records) {
            rec.ok = false;
            rec.error = e.what();
          }
        }
        for (auto& rec : cell_records) records.push_back(std::move(rec));
      }
    } catch (const std::exception& e) {
      records.resize(setting_begin);
      for (Method method : cfg.methods) {
        for (const Cell& c : cells) {
          ExperimentRecord rec = blank_record(setting_name, method, c);
          rec.error = e.what();
          records.push_back(std::move(rec));
        }
      }
    }
  }

  nlohmann::ordered_json summary;
  summary["software"] = {{"name", "fnmr"}, {"version", std::string(software_version())}};
  summary["config"] = to_json(cfg);
  nlohmann::ordered_json recs = nlohmann::ordered_json::array();
  std::size_t failed = 0;
  for (const auto& r : records) {
    recs.push_back(to_json(r));
    failed += r.ok ? 0 : 1;
  }
  summary["failed_cells"] = failed;
  summary["records"] = recs;
  write_json(cfg.output_dir / "experiment.json", summary);
  return records;
}

nlohmann::ordered_json to_json(const ExperimentRecord& r) {
  nlohmann::ordered_json j;
  j["setting"] = r.setting;
  j["method"] = std::string(to_string(r.method));
  j["objective"] = std::string(to_string(r.objective));
  j["m"] = std::string(to_string(r.metric));
  j["space"] = std::string(to_string(r.space));
  j["ok"] = r.ok;
  if (!r.error.empty()) j["error"] = r.error;
  j["tuning"] = to_json(r.tuning);
  nlohmann::ordered_json reps = nlohmann::ordered_json::array();
  for (const auto& rep : r.reports) reps.push_back(to_json(rep));
  j["reports"] = reps;
  nlohmann::ordered_json arts = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.artifacts) arts[k] = v;
  j["artifacts"] = arts;
  return j;
}

namespace {

// JSON has no infinities; failed searches serialize their score as null.
double number_or_neg_inf(const nlohmann::json& v) {
  return v.is_number() ? v.get<double>() : -std::numeric_limits<double>::infinity();
}

}  // namespace

ExperimentRecord record_from_json(const nlohmann::json& j) {
  try {
    ExperimentRecord r;
    r.setting = j.at("setting").get<std::string>();
    r.method = parse_method(j.at("method").get<std::string>());
    r.objective = parse_objective(j.at("objective").get<std::string>());
    r.metric = parse_metric(j.at("m").get<std::string>());
    r.space = parse_space(j.at("space").get<std::string>());
    r.ok = j.at("ok").get<bool>();
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    const auto& t = j.at("tuning");
    r.tuning.method = r.method;
    r.tuning.objective = r.objective;
    r.tuning.metric = r.metric;
    r.tuning.space = r.space;
    r.tuning.geodesic_k = t.at("geodesic_k").get<int>();
    r.tuning.seed = t.at("seed").get<Seed>();
    r.tuning.best_ordinal = t.at("best_ordinal").get<Index>();
    r.tuning.best_score = number_or_neg_inf(t.at("best_score"));
    r.tuning.best_hyper = hyper_from_json(t.at("best_hyper"));
    for (const auto& rj : j.at("reports")) {
      QualityReport rep;
      rep.auc = rj.at("auc").get<double>();
      rep.q_local = rj.at("q_local").get<double>();
      rep.q_global = rj.at("q_global").get<double>();
      rep.curve.g_max = rj.at("g_max").get<int>();
      rep.metric = parse_metric(rj.at("m").get<std::string>());
      rep.space = parse_space(rj.at("space").get<std::string>());
      rep.geodesic_k = rj.at("geodesic_k").get<int>();
      if (rj.contains("embedding")) rep.embedding_id = rj.at("embedding").get<std::string>();
      r.reports.push_back(std::move(rep));
    }
    for (const auto& [k, v] : j.at("artifacts").items()) r.artifacts[k] = v.get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("experiment record: ") + e.what());
  }
}

std::vector<ExperimentRecord> load_experiment(const fs::path& dir) {
  const nlohmann::json j = read_json(dir / "experiment.json");
  std::vector<ExperimentRecord> out;
  try {
    for (const auto& r : j.at("records")) out.push_back(record_from_json(r));
  } catch (const nlohmann::json::exception& e) {
    throw Error((dir / "experiment.json").string() + ": " + e.what());
  }
  return out;
}

const std::vector<std::string>& delta_settings() {
  static const std::vector<std::string> names = {"a2-sr", "a3-hx", "a3-sc", "a3-tp"};
  return names;
}

std::vector<DeltaRow> delta_report(const std::vector<ExperimentRecord>& records, Metric metric) {
  std::vector<Method> methods;
  for (const auto& r : records)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  std::sort(methods.begin(), methods.end());

  std::vector<DeltaRow> rows;
  for (Method method : methods) {
    DeltaRow row;
    row.method = method;
    row.metric = metric;
    double sum[2] = {0.0, 0.0};
    for (const auto& setting : delta_settings()) {
      for (Space s : {Space::parameter, Space::function}) {
        const ExperimentRecord* hit = nullptr;
        for (const auto& r : records) {
          if (r.method == method && r.setting == setting && r.metric == metric && r.space == s &&
              r.objective == Objective::auc) {
            hit = &r;
            break;
          }
        }
        if (hit == nullptr || !hit->ok || !std::isfinite(hit->tuning.best_score)) {
          row.missing.push_back(setting + "/" + space_tag(s));
          continue;
        }
        sum[s == Space::parameter ? 0 : 1] += hit->tuning.best_score;
      }
    }
    const double count = static_cast<double>(delta_settings().size());
    row.mean_ps = sum[0] / count;
    row.mean_fs = sum[1] / count;
    if (row.missing.empty()) row.delta = std::abs(row.mean_ps - row.mean_fs);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fnmr
