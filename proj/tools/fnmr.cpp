// Command-line front end: data generation, distances, embeddings,
// evaluation, tuning and full experiments.

#include "fnmr/distance.hpp"
#include "fnmr/embed.hpp"
#include "fnmr/experiment.hpp"
#include "fnmr/io.hpp"
#include "fnmr/quality.hpp"
#include "fnmr/svg.hpp"
#include "fnmr/synthdata.hpp"
#include "fnmr/tune.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace fnmr;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// "axis=v1,v2,..." -> (axis, values)
std::pair<std::string, std::vector<double>> parse_axis_override(const std::string& s) {
  const auto eq = s.find('=');
  require(eq != std::string::npos && eq > 0, "grid override must look like axis=v1,v2: '" + s + "'");
  std::vector<double> values;
  for (const auto& v : split_list(s.substr(eq + 1))) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(v, &used));
      require(used == v.size(), "");
    } catch (const std::exception&) {
      throw Error("grid override '" + s + "': bad number '" + v + "'");
    }
  }
  require(!values.empty(), "grid override '" + s + "' lists no values");
  return {s.substr(0, eq), values};
}

DistanceMatrix direct_from_csv(const fs::path& path, bool params, bool has_grid, bool quadrature) {
  if (params) {
    const ParamSample p = load_params_csv(path);
    return pairwise_direct(p.values, std::nullopt, Space::parameter);
  }
  const FunctionalDataset data = load_dataset_csv(path, has_grid);
  std::optional<Vector> w;
  if (quadrature) w = trapezoid_weights(data.grid);
  return pairwise_direct(data.values, w, Space::function);
}

struct HyperFlags {
  std::string method = "mds";
  int dim = 2;
  int k = 10;
  double eps = 1.0;
  int t = 1;
  double perplexity = 30.0;
  double theta = 0.0;
  int max_iter = 1000;
  double eta = 200.0;
  double exaggeration = 12.0;
  int n_neighbors = 15;
  double min_dist = 0.1;
  int n_epochs = 200;
  std::string init = "spectral";

  void add(CLI::App* app) {
    app->add_option("--method", method, "mds, isomap, diffmap, tsne or umap")->required();
    app->add_option("--dim", dim, "Embedding dimension")->capture_default_str();
    app->add_option("--k", k, "ISOMAP neighbors")->capture_default_str();
    app->add_option("--eps", eps, "DIFFMAP kernel width")->capture_default_str();
    app->add_option("--t", t, "DIFFMAP diffusion time")->capture_default_str();
    app->add_option("--perplexity", perplexity)->capture_default_str();
    app->add_option("--theta", theta, "Accepted for compatibility; gradients are exact")->capture_default_str();
    app->add_option("--max-iter", max_iter)->capture_default_str();
    app->add_option("--eta", eta)->capture_default_str();
    app->add_option("--exaggeration", exaggeration)->capture_default_str();
    app->add_option("--n-neighbors", n_neighbors)->capture_default_str();
    app->add_option("--min-dist", min_dist)->capture_default_str();
    app->add_option("--n-epochs", n_epochs)->capture_default_str();
    app->add_option("--init", init, "spectral or random")->capture_default_str();
  }

  HyperParams to_hyper() const {
    HyperParams h;
    h.method = parse_method(method);
    h.dim = dim;
    h.k = k;
    h.eps_val = eps;
    h.t = t;
    h.perplexity = perplexity;
    h.theta = theta;
    h.max_iter = max_iter;
    h.eta = eta;
    h.exaggeration = exaggeration;
    h.n_neighbors = n_neighbors;
    h.min_dist = min_dist;
    h.n_epochs = n_epochs;
    h.init = parse_umap_init(init);
    return h;
  }
};

void print_report(const QualityReport& r) {
  std::cout << "auc " << format_double(r.auc) << "\nq_local " << format_double(r.q_local) << "\nq_global "
            << format_double(r.q_global) << "\ng_max " << r.curve.g_max << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional-data manifold learning benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(software_version()));

  // generate
  auto* gen = app.add_subcommand("generate", "Simulate a named setting");
  std::string g_setting, g_out, g_params_out;
  Index g_n = 1000, g_m = 200;
  Seed g_seed = 1;
  gen->add_option("--setting", g_setting, "Setting name, e.g. a3-hx")->required();
  gen->add_option("--n", g_n, "Observations")->capture_default_str();
  gen->add_option("--m", g_m, "Grid points")->capture_default_str();
  gen->add_option("--seed", g_seed)->capture_default_str();
  gen->add_option("--out", g_out, "Dataset CSV (grid row first)")->required();
  gen->add_option("--params-out", g_params_out, "Ground-truth parameter CSV");

  // dist
  auto* dist = app.add_subcommand("dist", "Direct or geodesic distance matrix");
  std::string d_input, d_out, d_metric = "dir";
  int d_k = 10, d_workers = 1;
  bool d_params = false, d_no_grid = false, d_quadrature = false;
  dist->add_option("--input", d_input, "Dataset CSV, or parameter CSV with --params")->required();
  dist->add_flag("--params", d_params, "Input is a parameter CSV with a header row");
  dist->add_flag("--no-grid", d_no_grid, "Dataset has no grid row");
  dist->add_flag("--quadrature", d_quadrature, "Weight columns by trapezoid rule on the grid");
  dist->add_option("--metric", d_metric, "dir or geo")->capture_default_str();
  dist->add_option("--k", d_k, "Neighbors for geodesic distances")->capture_default_str();
  dist->add_option("--workers", d_workers)->capture_default_str();
  dist->add_option("--out", d_out, "Distance CSV")->required();

  // embed
  auto* embed = app.add_subcommand("embed", "Embed a distance matrix");
  HyperFlags e_flags;
  std::string e_dist, e_out, e_svg, e_color;
  Seed e_seed = 1;
  int e_workers = 1;
  e_flags.add(embed);
  embed->add_option("--dist", e_dist, "Distance CSV")->required();
  embed->add_option("--seed", e_seed)->capture_default_str();
  embed->add_option("--workers", e_workers)->capture_default_str();
  embed->add_option("--out", e_out, "Embedding CSV; a JSON sidecar is written next to it")->required();
  embed->add_option("--svg", e_svg, "Scatter plot path");
  embed->add_option("--color", e_color, "Parameter CSV whose first column colors the plot");

  // eval
  auto* eval = app.add_subcommand("eval", "Quality of an embedding against reference distances");
  std::string v_ref, v_emb, v_out, v_curve, v_metric = "dir";
  int v_k = 10, v_workers = 1;
  eval->add_option("--ref", v_ref, "Direct reference distance CSV")->required();
  eval->add_option("--emb", v_emb, "Embedding CSV")->required();
  eval->add_option("--metric", v_metric, "dir or geo")->capture_default_str();
  eval->add_option("--k", v_k, "Neighbors for geodesic reference")->capture_default_str();
  eval->add_option("--workers", v_workers)->capture_default_str();
  eval->add_option("--out", v_out, "Report JSON");
  eval->add_option("--curve", v_curve, "Curve CSV (g, Q_RX, R_NX)");

  // tune
  auto* tune = app.add_subcommand("tune", "Grid search for one method");
  std::string t_method, t_data, t_params, t_out, t_objective = "auc", t_metric = "dir", t_ref = "function",
                                                  t_grid = "desk";
  std::vector<std::string> t_set;
  Seed t_seed = 1;
  int t_k = 10, t_workers = 1;
  bool t_no_grid = false;
  tune->add_option("--method", t_method)->required();
  tune->add_option("--data", t_data, "Dataset CSV")->required();
  tune->add_flag("--no-grid", t_no_grid, "Dataset has no grid row");
  tune->add_option("--objective", t_objective, "auc or qlocal")->capture_default_str();
  tune->add_option("--metric", t_metric, "dir or geo")->capture_default_str();
  tune->add_option("--ref", t_ref, "function or parameter")->capture_default_str();
  tune->add_option("--params", t_params, "Parameter CSV, required with --ref parameter");
  tune->add_option("--grid", t_grid, "desk or full")->capture_default_str();
  tune->add_option("--set", t_set, "Replace an axis: name=v1,v2,...");
  tune->add_option("--k", t_k, "Neighbors for geodesic reference")->capture_default_str();
  tune->add_option("--seed", t_seed)->capture_default_str();
  tune->add_option("--workers", t_workers)->capture_default_str();
  tune->add_option("--out", t_out, "Output directory")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run the tuning protocol over settings and methods");
  std::string x_config, x_settings, x_methods, x_objectives, x_metrics, x_spaces, x_grid, x_out;
  std::optional<Index> x_n, x_m;
  std::optional<Seed> x_seed;
  std::optional<int> x_k, x_workers;
  exp->add_option("--config", x_config, "JSON configuration file");
  exp->add_option("--settings", x_settings, "Comma-separated setting names");
  exp->add_option("--methods", x_methods, "Comma-separated methods");
  exp->add_option("--objectives", x_objectives, "Comma-separated objectives");
  exp->add_option("--metrics", x_metrics, "Comma-separated metrics");
  exp->add_option("--spaces", x_spaces, "Comma-separated reference spaces");
  exp->add_option("--grid", x_grid, "desk or full");
  exp->add_option("--n", x_n);
  exp->add_option("--m", x_m);
  exp->add_option("--seed", x_seed);
  exp->add_option("--geodesic-k", x_k);
  exp->add_option("--workers", x_workers);
  exp->add_option("--out", x_out, "Output directory");

  // report
  auto* rep = app.add_subcommand("report", "Differences between parameter- and function-space tuning");
  std::string r_dir, r_metric = "both";
  rep->add_option("--dir", r_dir, "Experiment output directory")->required();
  rep->add_option("--metric", r_metric, "dir, geo or both")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const GeneratedData g = generate_setting(find_setting(g_setting), g_n, g_m, g_seed);
      save_dataset_csv(g_out, g.data);
      if (!g_params_out.empty()) save_params_csv(g_params_out, g.params);
    } else if (dist->parsed()) {
      const DistanceMatrix direct = direct_from_csv(d_input, d_params, !d_no_grid, d_quadrature);
      const Metric m = parse_metric(d_metric);
      save_distance_csv(d_out, m == Metric::direct ? direct : geodesic_from_direct(direct, d_k, d_workers));
    } else if (embed->parsed()) {
      const DistanceMatrix d = load_distance_csv(e_dist);
      const Embedding emb = fit_embedding(d, e_flags.to_hyper(), e_seed, e_workers);
      save_embedding(e_out, emb);
      for (const auto& w : emb.warnings) std::cerr << "warning: " << w << '\n';
      if (!e_svg.empty()) {
        Vector color = Vector::Zero(emb.size());
        if (!e_color.empty()) {
          const ParamSample p = load_params_csv(e_color);
          require(p.size() == emb.size(), "--color: row count does not match the embedding");
          color = p.values.col(0);
        }
        render_scatter_svg(emb, color, e_svg);
      }
    } else if (eval->parsed()) {
      const DistanceMatrix ref = load_distance_csv(v_ref);
      Embedding emb;
      emb.coords = load_embedding_csv(v_emb);
      const ReferenceRanks rr = reference_ranks(ref, parse_metric(v_metric), v_k, v_workers);
      const QualityReport r = evaluate_ranks(rr, embedding_ranks(emb));
      print_report(r);
      if (!v_out.empty()) write_json(v_out, to_json(r));
      if (!v_curve.empty()) save_curve_csv(v_curve, r.curve);
    } else if (tune->parsed()) {
      const FunctionalDataset data = load_dataset_csv(t_data, !t_no_grid);
      const DistanceMatrix input = pairwise_direct(data.values, std::nullopt, Space::function);
      DistanceMatrix ref = input;
      if (parse_space(t_ref) == Space::parameter) {
        require(!t_params.empty(), "--ref parameter needs --params");
        const ParamSample p = load_params_csv(t_params);
        require(p.size() == data.size(), "--params: row count does not match the dataset");
        ref = pairwise_direct(p.values, std::nullopt, Space::parameter);
      }
      const Method method = parse_method(t_method);
      GridSpec grid = default_grid(method, data.size(), epsilon_compute(input), parse_grid_preset(t_grid));
      std::map<std::string, std::vector<double>> overrides;
      for (const auto& s : t_set) overrides.insert(parse_axis_override(s));
      grid = override_grid(std::move(grid), overrides);
      const TuningResult r = grid_search(input, ref, parse_objective(t_objective), parse_metric(t_metric), grid,
                                         t_k, t_seed, t_workers);
      const fs::path out = t_out;
      save_trace_csv(out / "trace.csv", grid, r);
      write_json(out / "grid.json", to_json(grid));
      write_json(out / "tuning.json", to_json(r));
      if (!r.any_ok()) throw Error("every configuration failed: " + r.trace.front().error);
      const TraceEntry& best = r.trace[static_cast<std::size_t>(r.best_ordinal)];
      save_embedding(out / "embedding.csv", fit_embedding(input, best.hyper, best.seed, t_workers));
      std::cout << "best " << describe(r.best_hyper) << "\nscore " << format_double(r.best_score) << '\n';
    } else if (exp->parsed()) {
      ExperimentConfig cfg;
      if (!x_config.empty()) cfg = config_from_json(read_json(x_config));
      if (!x_settings.empty()) cfg.settings = split_list(x_settings);
      if (!x_methods.empty()) {
        cfg.methods.clear();
        for (const auto& s : split_list(x_methods)) cfg.methods.push_back(parse_method(s));
      }
      if (!x_objectives.empty()) {
        cfg.objectives.clear();
        for (const auto& s : split_list(x_objectives)) cfg.objectives.push_back(parse_objective(s));
      }
      if (!x_metrics.empty()) {
        cfg.metrics.clear();
        for (const auto& s : split_list(x_metrics)) cfg.metrics.push_back(parse_metric(s));
      }
      if (!x_spaces.empty()) {
        cfg.spaces.clear();
        for (const auto& s : split_list(x_spaces)) cfg.spaces.push_back(parse_space(s));
      }
      if (!x_grid.empty()) cfg.grid = parse_grid_preset(x_grid);
      if (x_n) cfg.n = *x_n;
      if (x_m) cfg.m = *x_m;
      if (x_seed) cfg.seed = *x_seed;
      if (x_k) cfg.geodesic_k = *x_k;
      if (x_workers) cfg.workers = *x_workers;
      if (!x_out.empty()) cfg.output_dir = x_out;
      const auto records = run_experiment(cfg);
      std::size_t failed = 0;
      for (const auto& r : records) {
        if (r.ok) continue;
        ++failed;
        std::cerr << "failed: " << cell_dir(r.setting, r.method, r.objective, r.metric, r.space).generic_string()
                  << ": " << r.error << '\n';
      }
      std::cout << records.size() - failed << " of " << records.size() << " cells completed\n";
      return failed == 0 ? 0 : 1;
    } else if (rep->parsed()) {
      const auto records = load_experiment(r_dir);
      std::vector<Metric> metrics;
      if (r_metric == "both")
        metrics = {Metric::direct, Metric::geodesic};
      else
        metrics = {parse_metric(r_metric)};
      std::printf("%-8s %-4s %8s %8s %8s\n", "method", "m", "mean_ps", "mean_fs", "delta");
      bool complete = true;
      for (Metric m : metrics) {
        for (const auto& row : delta_report(records, m)) {
          if (row.delta) {
            std::printf("%-8s %-4s %8.3f %8.3f %8.3f\n", std::string(to_string(row.method)).c_str(),
                        std::string(to_string(m)).c_str(), row.mean_ps, row.mean_fs, *row.delta);
          } else {
            complete = false;
            std::string miss;
            for (const auto& s : row.missing) miss += (miss.empty() ? "" : " ") + s;
            std::printf("%-8s %-4s missing: %s\n", std::string(to_string(row.method)).c_str(),
                        std::string(to_string(m)).c_str(), miss.c_str());
          }
        }
      }
      return complete ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
