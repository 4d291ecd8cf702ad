#include "fnmr/distance.hpp"

#include "fnmr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace fnmr {

std::string_view to_string(Metric m) { return m == Metric::direct ? "dir" : "geo"; }

std::string_view to_string(Space s) {
  switch (s) {
    case Space::function: return "function";
    case Space::parameter: return "parameter";
    case Space::embedding: return "embedding";
  }
  return "?";
}

Metric parse_metric(std::string_view s) {
  if (s == "dir" || s == "direct") return Metric::direct;
  if (s == "geo" || s == "geodesic") return Metric::geodesic;
  throw Error("unknown metric '" + std::string(s) + "' (expected dir or geo)");
}

Space parse_space(std::string_view s) {
  if (s == "function" || s == "fs") return Space::function;
  if (s == "parameter" || s == "ps") return Space::parameter;
  if (s == "embedding") return Space::embedding;
  throw Error("unknown space '" + std::string(s) + "'");
}

void DistanceMatrix::validate(double symmetry_tol) const {
  require(d.rows() == d.cols(), "distance matrix must be square");
  require(d.allFinite(), "distance matrix has non-finite entries");
  for (Index i = 0; i < d.rows(); ++i) {
    require(d(i, i) == 0.0, "distance matrix diagonal must be zero");
    for (Index j = i + 1; j < d.cols(); ++j) {
      require(d(i, j) >= 0.0, "distance matrix entries must be nonnegative");
      require(std::abs(d(i, j) - d(j, i)) <= symmetry_tol, "distance matrix must be symmetric");
    }
  }
}

Vector trapezoid_weights(const Vector& grid) {
  const Index m = grid.size();
  require(m >= 2, "trapezoid_weights: need at least two grid points");
  Vector w = Vector::Zero(m);
  for (Index j = 0; j + 1 < m; ++j) {
    const double h = grid(j + 1) - grid(j);
    require(h > 0.0, "trapezoid_weights: grid must be strictly increasing");
    w(j) += 0.5 * h;
    w(j + 1) += 0.5 * h;
  }
  return w;
}

bool NeighborGraph::has_edge(Index i, Index j) const {
  const auto& row = adjacency[i];
  return std::binary_search(row.begin(), row.end(), Edge{j, 0.0},
                            [](const Edge& a, const Edge& b) { return a.to < b.to; });
}

std::size_t NeighborGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& row : adjacency) total += row.size();
  return total / 2;
}

std::vector<Index> nearest_neighbors(const DistanceMatrix& d, Index i, int k) {
  const Index n = d.size();
  std::vector<Index> order;
  order.reserve(n - 1);
  for (Index j = 0; j < n; ++j)
    if (j != i) order.push_back(j);
  const auto less = [&](Index a, Index b) {
    const double da = d(i, a), db = d(i, b);
    return da < db || (da == db && a < b);
  };
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk), order.end(), less);
  order.resize(kk);
  return order;
}

namespace {

void label_components(NeighborGraph& g) {
  const Index n = g.size();
  g.component.assign(n, -1);
  g.n_components = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (g.component[s] >= 0) continue;
    const int label = g.n_components++;
    g.component[s] = label;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      for (const Edge& e : g.adjacency[v]) {
        if (g.component[e.to] < 0) {
          g.component[e.to] = label;
          stack.push_back(e.to);
        }
      }
    }
  }
}

void insert_edge(NeighborGraph& g, Index i, Index j, double w) {
  const auto by_target = [](const Edge& a, const Edge& b) { return a.to < b.to; };
  auto& ri = g.adjacency[i];
  ri.insert(std::upper_bound(ri.begin(), ri.end(), Edge{j, w}, by_target), Edge{j, w});
  auto& rj = g.adjacency[j];
  rj.insert(std::upper_bound(rj.begin(), rj.end(), Edge{i, w}, by_target), Edge{i, w});
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

// Joins components with the minimum spanning set of shortest inter-component
// direct edges. Returns the number of edges inserted.
int bridge_components(NeighborGraph& g, const DistanceMatrix& d) {
  if (g.n_components <= 1) return 0;
  const int c = g.n_components;
  struct Bridge {
    double w;
    Index i, j;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Bridge> best(static_cast<std::size_t>(c) * c, Bridge{inf, -1, -1});
  const Index n = g.size();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      int a = g.component[i], b = g.component[j];
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      Bridge& slot = best[static_cast<std::size_t>(a) * c + b];
      if (d(i, j) < slot.w) slot = {d(i, j), i, j};
    }
  }
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < c; ++a)
    for (int b = a + 1; b < c; ++b) pairs.emplace_back(a, b);
  std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
    return best[static_cast<std::size_t>(x.first) * c + x.second].w <
           best[static_cast<std::size_t>(y.first) * c + y.second].w;
  });
  DisjointSets sets(c);
  int inserted = 0;
  for (const auto& [a, b] : pairs) {
    if (!sets.unite(a, b)) continue;
    const Bridge& br = best[static_cast<std::size_t>(a) * c + b];
    insert_edge(g, br.i, br.j, br.w);
    ++inserted;
    if (inserted == c - 1) break;
  }
  label_components(g);
  return inserted;
}

}  // namespace

NeighborGraph knn_graph(const DistanceMatrix& d, int k) {
  const Index n = d.size();
  require(n >= 2, "knn_graph: need at least two points");
  require(k >= 1 && k <= n - 1, "knn_graph: k must lie in [1, n-1]");
  std::vector<std::vector<char>> linked(n, std::vector<char>(n, 0));
  for (Index i = 0; i < n; ++i) {
    for (Index j : nearest_neighbors(d, i, k)) {
      linked[i][j] = 1;
      linked[j][i] = 1;
    }
  }
  NeighborGraph g;
  g.adjacency.resize(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (linked[i][j]) g.adjacency[i].push_back({j, d(i, j)});
  label_components(g);
  return g;
}

Vector dijkstra(const NeighborGraph& g, Index source) {
  const Index n = g.size();
  Vector dist = Vector::Constant(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist(source) = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (du > dist(u)) continue;
    for (const Edge& e : g.adjacency[u]) {
      const double alt = du + e.weight;
      if (alt < dist(e.to)) {
        dist(e.to) = alt;
        heap.emplace(alt, e.to);
      }
    }
  }
  return dist;
}

DistanceMatrix geodesic_from_direct(const DistanceMatrix& d, int k, int workers) {
  NeighborGraph g = knn_graph(d, k);
  const int bridged = bridge_components(g, d);
  const Index n = d.size();
  DistanceMatrix out;
  out.metric = Metric::geodesic;
  out.space = d.space;
  out.geodesic_k = k;
  out.bridged_edges = bridged;
  out.d.resize(n, n);
  parallel_for(n, workers, [&](Index s) { out.d.row(s) = dijkstra(g, s).transpose(); });
  // Paths found from either end can differ in the last ulp; the lower
  // source index wins.
  for (Index i = 0; i < n; ++i) {
    out.d(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) out.d(j, i) = out.d(i, j);
  }
  return out;
}

double epsilon_compute(const DistanceMatrix& d, double p) {
  const Index n = d.size();
  require(n >= 3, "epsilon_compute: need at least three points");
  require(p > 0.0 && p < 1.0, "epsilon_compute: p must lie in (0, 1)");
  const int k = std::clamp<int>(static_cast<int>(std::ceil(p * static_cast<double>(n))), 1,
                                static_cast<int>(n - 1));
  std::vector<double> sq(n);
  std::vector<double> row;
  for (Index i = 0; i < n; ++i) {
    row.clear();
    for (Index j = 0; j < n; ++j)
      if (j != i) row.push_back(d(i, j));
    std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
    sq[i] = row[k - 1] * row[k - 1];
  }
  std::sort(sq.begin(), sq.end());
  const double median = n % 2 ? sq[n / 2] : 0.5 * (sq[n / 2 - 1] + sq[n / 2]);
  require(median > 0.0, "epsilon_compute: degenerate (all-zero) neighbor distances");
  return 2.0 * median;
}

}  // namespace fnmr
