#include "fnmr/tune.hpp"

#include "fnmr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fnmr {

std::string_view to_string(Objective o) { return o == Objective::auc ? "auc" : "qlocal"; }
std::string_view to_string(GridPreset g) { return g == GridPreset::desk ? "desk" : "full"; }

Objective parse_objective(std::string_view s) {
  if (s == "auc") return Objective::auc;
  if (s == "qlocal" || s == "q_local") return Objective::qlocal;
  throw Error("unknown objective '" + std::string(s) + "'");
}

GridPreset parse_grid_preset(std::string_view s) {
  if (s == "desk") return GridPreset::desk;
  if (s == "full") return GridPreset::full;
  throw Error("unknown grid preset '" + std::string(s) + "'");
}

Index GridSpec::size() const {
  Index total = 1;
  for (const auto& a : axes) total *= static_cast<Index>(a.values.size());
  return total;
}

HyperParams GridSpec::at(Index ordinal) const {
  require(ordinal >= 0 && ordinal < size(), "GridSpec::at: ordinal out of range");
  HyperParams h;
  h.method = method;
  for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
    const auto len = static_cast<Index>(it->values.size());
    set_hyper(h, it->name, it->values[static_cast<std::size_t>(ordinal % len)]);
    ordinal /= len;
  }
  return h;
}

const std::vector<std::string>& axis_names(Method m) {
  static const std::map<Method, std::vector<std::string>> names = {
      {Method::mds, {"k"}},
      {Method::isomap, {"k", "ndim"}},
      {Method::diffmap, {"eps.val", "neigen", "t"}},
      {Method::umap, {"n_neighbors", "n_components", "min_dist", "n_epochs", "init"}},
      {Method::tsne, {"perplexity", "dims", "theta", "max_iter", "eta", "exaggeration"}},
  };
  return names.at(m);
}

namespace {

int as_int(double v) { return static_cast<int>(std::lround(v)); }

}  // namespace

void set_hyper(HyperParams& h, std::string_view axis, double v) {
  switch (h.method) {
    case Method::mds:
      if (axis == "k") return void(h.dim = as_int(v));
      break;
    case Method::isomap:
      if (axis == "k") return void(h.k = as_int(v));
      if (axis == "ndim") return void(h.dim = as_int(v));
      break;
    case Method::diffmap:
      if (axis == "eps.val") return void(h.eps_val = v);
      if (axis == "neigen") return void(h.dim = as_int(v));
      if (axis == "t") return void(h.t = as_int(v));
      break;
    case Method::tsne:
      if (axis == "perplexity") return void(h.perplexity = v);
      if (axis == "dims") return void(h.dim = as_int(v));
      if (axis == "theta") return void(h.theta = v);
      if (axis == "max_iter") return void(h.max_iter = as_int(v));
      if (axis == "eta") return void(h.eta = v);
      if (axis == "exaggeration") return void(h.exaggeration = v);
      break;
    case Method::umap:
      if (axis == "n_neighbors") return void(h.n_neighbors = as_int(v));
      if (axis == "n_components") return void(h.dim = as_int(v));
      if (axis == "min_dist") return void(h.min_dist = v);
      if (axis == "n_epochs") return void(h.n_epochs = as_int(v));
      if (axis == "init") return void(h.init = as_int(v) == 0 ? UmapInit::spectral : UmapInit::random);
      break;
  }
  throw Error("unknown hyperparameter '" + std::string(axis) + "' for method " +
              std::string(to_string(h.method)));
}

double get_hyper(const HyperParams& h, std::string_view axis) {
  switch (h.method) {
    case Method::mds:
      if (axis == "k") return h.dim;
      break;
    case Method::isomap:
      if (axis == "k") return h.k;
      if (axis == "ndim") return h.dim;
      break;
    case Method::diffmap:
      if (axis == "eps.val") return h.eps_val;
      if (axis == "neigen") return h.dim;
      if (axis == "t") return h.t;
      break;
    case Method::tsne:
      if (axis == "perplexity") return h.perplexity;
      if (axis == "dims") return h.dim;
      if (axis == "theta") return h.theta;
      if (axis == "max_iter") return h.max_iter;
      if (axis == "eta") return h.eta;
      if (axis == "exaggeration") return h.exaggeration;
      break;
    case Method::umap:
      if (axis == "n_neighbors") return h.n_neighbors;
      if (axis == "n_components") return h.dim;
      if (axis == "min_dist") return h.min_dist;
      if (axis == "n_epochs") return h.n_epochs;
      if (axis == "init") return h.init == UmapInit::spectral ? 0.0 : 1.0;
      break;
  }
  throw Error("unknown hyperparameter '" + std::string(axis) + "'");
}

namespace {

std::vector<double> arithmetic(double lo, double hi, double step) {
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-9; x += step) v.push_back(x);
  return v;
}

// Keeps values <= limit; records a note when anything was dropped.
std::vector<double> clip_to(std::vector<double> values, double limit, const std::string& what,
                            std::vector<std::string>& notes) {
  const auto before = values.size();
  std::erase_if(values, [&](double v) { return v > limit; });
  if (values.size() != before) {
    notes.push_back(what + " clipped to <= " + std::to_string(as_int(std::floor(limit))) + " (" +
                    std::to_string(before - values.size()) + " values dropped)");
  }
  require(!values.empty(), what + ": no feasible values for this n");
  return values;
}

std::vector<double> dims_upto(int lo, int hi, Index n, std::vector<std::string>& notes,
                              const std::string& what) {
  return clip_to(arithmetic(lo, hi, 1), static_cast<double>(n - 2), what, notes);
}

}  // namespace

GridSpec default_grid(Method method, Index n, double eps_s, GridPreset preset) {
  require(n >= 10, "default_grid: n must be at least 10");
  GridSpec g;
  g.method = method;
  auto& notes = g.notes;
  const bool full = preset == GridPreset::full;
  const double max_neighbors = static_cast<double>(n - 1);
  switch (method) {
    case Method::mds:
      g.axes = {{"k", dims_upto(2, 5, n, notes, "k")}};
      break;
    case Method::isomap: {
      std::vector<double> ks = full ? arithmetic(3, 975, 3)
                                    : std::vector<double>{3,  5,  7,  10,  13,  16,  20,  25,
                                                          30, 40, 50, 65,  80,  100, 125, 150,
                                                          200, 250, 300, 400, 500, 700, 975};
      g.axes = {{"k", clip_to(ks, max_neighbors, "isomap k", notes)},
                {"ndim", dims_upto(2, 5, n, notes, "ndim")}};
      break;
    }
    case Method::diffmap: {
      require(eps_s > 0.0, "default_grid: eps_s must be positive for diffmap");
      const int len = full ? 250 : 20;
      std::vector<double> eps(len);
      for (int i = 0; i < len; ++i)
        eps[i] = eps_s * (0.15 + 1.7 * static_cast<double>(i) / static_cast<double>(len - 1));
      g.axes = {{"eps.val", eps},
                {"neigen", dims_upto(2, 5, n, notes, "neigen")},
                {"t", full ? std::vector<double>{1, 2, 4, 8, 16, 32} : std::vector<double>{1, 8}}};
      break;
    }
    case Method::umap: {
      std::vector<double> nn = full ? arithmetic(5, 975, 5)
                                    : std::vector<double>{5, 10, 15, 20, 30, 50, 75, 100, 150, 200};
      g.axes = {{"n_neighbors", clip_to(nn, max_neighbors, "umap n_neighbors", notes)},
                {"n_components", full ? dims_upto(2, 5, n, notes, "n_components")
                                      : std::vector<double>{2, 3}},
                {"min_dist", full ? std::vector<double>{0.001, 0.01, 0.1, 0.5}
                                  : std::vector<double>{0.1}},
                {"n_epochs", full ? std::vector<double>{200, 500, 1000} : std::vector<double>{200}},
                {"init", full ? std::vector<double>{0, 1} : std::vector<double>{0}}};
      break;
    }
    case Method::tsne: {
      std::vector<double> perp = full ? arithmetic(3, 333, 1)
                                      : std::vector<double>{5, 10, 15, 20, 30, 40, 50, 65, 80, 99};
      g.axes = {{"perplexity", clip_to(perp, static_cast<double>(n - 1) / 3.0, "tsne perplexity", notes)},
                {"dims", {2, 3}},
                {"theta", full ? std::vector<double>{0.0, 0.5} : std::vector<double>{0.0}},
                {"max_iter", full ? std::vector<double>{1000, 3000} : std::vector<double>{1000}},
                {"eta", full ? std::vector<double>{10, 100, 200, 500} : std::vector<double>{200}},
                {"exaggeration", full ? std::vector<double>{4, 12} : std::vector<double>{12}}};
      break;
    }
  }
  return g;
}

GridSpec override_grid(GridSpec grid, const std::map<std::string, std::vector<double>>& axes) {
  for (const auto& [name, values] : axes) {
    require(!values.empty(), "grid axis '" + name + "' is empty");
    auto it = std::find_if(grid.axes.begin(), grid.axes.end(),
                           [&](const GridAxis& a) { return a.name == name; });
    require(it != grid.axes.end(), "unknown grid axis '" + name + "' for method " +
                                       std::string(to_string(grid.method)));
    it->values = values;
  }
  return grid;
}

bool TuningResult::any_ok() const {
  return std::any_of(trace.begin(), trace.end(), [](const TraceEntry& e) { return e.ok; });
}

double objective_value(const QualityReport& r, Objective o) {
  return o == Objective::auc ? r.auc : r.q_local;
}

std::vector<TuningResult> grid_search_multi(const DistanceMatrix& input_d,
                                            const std::vector<TuningTarget>& targets,
                                            const GridSpec& grid, Seed seed, int workers) {
  require(!targets.empty(), "grid_search: no targets");
  for (const auto& t : targets) {
    require(t.ref != nullptr, "grid_search: null reference");
    require(t.ref->ranks.size() == input_d.size(), "grid_search: reference size mismatch");
  }
  const Index total = grid.size();
  require(total > 0, "grid_search: empty grid");

  // Configurations equal up to theta fit once, under the first one's seed.
  std::vector<HyperParams> configs(total);
  std::vector<Index> canonical(total);
  std::map<std::string, Index> first_seen;
  for (Index i = 0; i < total; ++i) {
    configs[i] = grid.at(i);
    HyperParams key = configs[i];
    key.theta = 0.0;
    const auto [it, inserted] = first_seen.emplace(describe(key), i);
    canonical[i] = inserted ? i : it->second;
  }
  std::vector<Index> unique;
  for (Index i = 0; i < total; ++i)
    if (canonical[i] == i) unique.push_back(i);

  struct Outcome {
    std::vector<double> scores;
    bool ok = false;
    std::string error;
  };
  std::vector<Outcome> outcomes(total);
  parallel_for(static_cast<Index>(unique.size()), workers, [&](Index u) {
    const Index i = unique[u];
    Outcome& out = outcomes[i];
    try {
      const Embedding emb = fit_embedding(input_d, configs[i], seed + static_cast<Seed>(i));
      const RankTable emb_ranks = embedding_ranks(emb);
      for (const auto& t : targets)
        out.scores.push_back(objective_value(evaluate_ranks(*t.ref, emb_ranks), t.objective));
      out.ok = true;
    } catch (const std::exception& e) {
      out.scores.clear();
      out.error = e.what();
    }
  });

  std::vector<TuningResult> results(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    TuningResult& r = results[t];
    r.method = grid.method;
    r.objective = targets[t].objective;
    r.metric = targets[t].ref->metric;
    r.space = targets[t].ref->space;
    r.geodesic_k = targets[t].ref->geodesic_k;
    r.seed = seed;
    r.trace.resize(total);
    for (Index i = 0; i < total; ++i) {
      const Outcome& o = outcomes[canonical[i]];
      TraceEntry& e = r.trace[i];
      e.hyper = configs[i];
      e.seed = seed + static_cast<Seed>(canonical[i]);
      e.ok = o.ok;
      e.error = o.error;
      if (o.ok) e.score = o.scores[t];
      if (e.score > r.best_score) {
        r.best_score = e.score;
        r.best_ordinal = i;
      }
    }
    r.best_hyper = configs[r.best_ordinal];
  }
  return results;
}

TuningResult grid_search(const DistanceMatrix& input_d, const DistanceMatrix& ref_d, Objective objective,
                         Metric m, const GridSpec& grid, int geodesic_k, Seed seed, int workers) {
  require(ref_d.metric == Metric::direct, "grid_search: reference must be direct distances");
  auto ref = std::make_shared<const ReferenceRanks>(reference_ranks(ref_d, m, geodesic_k, workers));
  return grid_search_multi(input_d, {{ref, objective}}, grid, seed, workers).front();
}

}  // namespace fnmr
