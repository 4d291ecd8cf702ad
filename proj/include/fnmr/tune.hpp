#pragma once

#include "fnmr/common.hpp"
#include "fnmr/distance.hpp"
#include "fnmr/embed.hpp"
#include "fnmr/quality.hpp"

#include <limits>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace fnmr {

enum class Objective { auc, qlocal };
enum class GridPreset { desk, full };

std::string_view to_string(Objective o);
std::string_view to_string(GridPreset g);
Objective parse_objective(std::string_view s);
GridPreset parse_grid_preset(std::string_view s);

/// One hyperparameter axis. Categorical axes (UMAP init) store an index
/// into their value names: 0 = spectral, 1 = random.
struct GridAxis {
  std::string name;
  std::vector<double> values;
};

/// Cartesian product of axes; the first axis varies slowest.
struct GridSpec {
  Method method = Method::mds;
  std::vector<GridAxis> axes;
  std::vector<std::string> notes;  // e.g. range clipping applied for small n

  Index size() const;
  HyperParams at(Index ordinal) const;
};

/// Axis names of a method, in grid order.
const std::vector<std::string>& axis_names(Method m);

/// Sets the named field of `h`. Throws Error for unknown names.
void set_hyper(HyperParams& h, std::string_view axis, double value);
double get_hyper(const HyperParams& h, std::string_view axis);

/// Full grids follow the published sizes (MDS 4, ISOMAP 1300, DIFFMAP 6000,
/// UMAP 18720, t-SNE 21184 at n = 1000); desk grids hold at most 200
/// configurations. Locality ranges are clipped to what n admits.
GridSpec default_grid(Method method, Index n, double eps_s, GridPreset preset = GridPreset::full);

/// Replaces the listed axes of the default grid. Unknown axis names throw.
GridSpec override_grid(GridSpec grid, const std::map<std::string, std::vector<double>>& axes);

struct TraceEntry {
  HyperParams hyper;
  Seed seed = 0;
  double score = -std::numeric_limits<double>::infinity();
  bool ok = false;
  std::string error;
};

struct TuningResult {
  Method method = Method::mds;
  HyperParams best_hyper;
  Index best_ordinal = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  Objective objective = Objective::auc;
  Metric metric = Metric::direct;
  Space space = Space::function;
  int geodesic_k = 0;
  Seed seed = 0;
  std::vector<TraceEntry> trace;

  bool any_ok() const;
};

/// A scoring target: reference neighborhoods plus the objective read from
/// the resulting report.
struct TuningTarget {
  std::shared_ptr<const ReferenceRanks> ref;
  Objective objective = Objective::auc;
};

/// Fits every configuration once on `input_d` and scores it against each
/// target. Configuration i uses seed + i; t-SNE configurations differing
/// only in theta share one fit (the first one's). Failures score -inf and
/// never abort the sweep. Results are independent of `workers`.
std::vector<TuningResult> grid_search_multi(const DistanceMatrix& input_d,
                                            const std::vector<TuningTarget>& targets,
                                            const GridSpec& grid, Seed seed, int workers = 1);

TuningResult grid_search(const DistanceMatrix& input_d, const DistanceMatrix& ref_d, Objective objective,
                         Metric m, const GridSpec& grid, int geodesic_k, Seed seed, int workers = 1);

double objective_value(const QualityReport& r, Objective o);

}  // namespace fnmr
