#pragma once

#include "fnmr/common.hpp"

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

namespace fnmr {

enum class Metric { direct, geodesic };
enum class Space { function, parameter, embedding };

std::string_view to_string(Metric m);
std::string_view to_string(Space s);
Metric parse_metric(std::string_view s);  // "dir"/"direct", "geo"/"geodesic"
Space parse_space(std::string_view s);

/// Dense symmetric dissimilarity matrix with provenance.
struct DistanceMatrix {
  Matrix d;
  Metric metric = Metric::direct;
  Space space = Space::function;
  int geodesic_k = 0;     // neighbor count, geodesic only
  int bridged_edges = 0;  // component-bridging edges inserted, geodesic only

  Index size() const { return d.rows(); }
  double operator()(Index i, Index j) const { return d(i, j); }

  /// Throws Error unless the matrix is square, symmetric, finite,
  /// nonnegative and has a zero diagonal.
  void validate(double symmetry_tol = 0.0) const;
};

/// Euclidean distances between rows, optionally with per-column quadrature
/// weights (distance = sqrt(sum_j w_j (x_ij - y_ij)^2)).
template <typename Derived>
DistanceMatrix pairwise_direct(const Eigen::MatrixBase<Derived>& points,
                               const std::optional<Vector>& weights = std::nullopt,
                               Space space = Space::function) {
  const Index n = points.rows();
  require(n >= 2, "pairwise_direct: need at least two points");
  require(points.allFinite(), "pairwise_direct: non-finite input");
  if (weights) {
    require(weights->size() == points.cols(), "pairwise_direct: weight count mismatch");
    require((weights->array() >= 0.0).all() && weights->allFinite(),
            "pairwise_direct: weights must be finite and nonnegative");
  }
  DistanceMatrix out;
  out.space = space;
  out.d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      double s;
      if (weights)
        s = ((points.row(i) - points.row(j)).array().square() * weights->transpose().array()).sum();
      else
        s = (points.row(i) - points.row(j)).squaredNorm();
      const double v = std::sqrt(s);
      out.d(i, j) = v;
      out.d(j, i) = v;
    }
  }
  return out;
}

/// Trapezoidal quadrature weights for a (possibly irregular) grid.
Vector trapezoid_weights(const Vector& grid);

struct Edge {
  Index to;
  double weight;
};

/// Symmetrized k-nearest-neighbor graph.
struct NeighborGraph {
  std::vector<std::vector<Edge>> adjacency;  // sorted by target index
  std::vector<int> component;                // component label per vertex
  int n_components = 0;

  Index size() const { return static_cast<Index>(adjacency.size()); }
  bool has_edge(Index i, Index j) const;
  std::size_t edge_count() const;  // undirected edges
};

/// Indices of the k nearest other points of row i; ties by ascending index.
std::vector<Index> nearest_neighbors(const DistanceMatrix& d, Index i, int k);

NeighborGraph knn_graph(const DistanceMatrix& d, int k);

/// Single-source shortest paths over the graph (binary-heap Dijkstra).
Vector dijkstra(const NeighborGraph& g, Index source);

/// All-pairs shortest paths over the symmetrized k-NN graph. Disconnected
/// graphs are first joined by the minimum spanning set of shortest direct
/// inter-component edges. `workers` > 1 splits sources across threads;
/// results do not depend on it.
DistanceMatrix geodesic_from_direct(const DistanceMatrix& d, int k, int workers = 1);

/// Starting value for the diffusion-map kernel width:
/// 2 * median_i (distance from i to its ceil(p n)-th nearest neighbor)^2.
double epsilon_compute(const DistanceMatrix& d, double p = 0.01);

}  // namespace fnmr
