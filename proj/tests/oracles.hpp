#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. Deliberately naive: no shared code with the library beyond types.

#include "fnmr/common.hpp"
#include "fnmr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

namespace oracle {

using fnmr::Index;
using fnmr::Matrix;
using fnmr::Vector;

inline Matrix random_points(Index n, Index dim, fnmr::Seed seed) {
  fnmr::Rng rng(seed);
  Matrix x(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < dim; ++j) x(i, j) = rng.normal();
  return x;
}

inline Matrix euclidean(const Matrix& x) {
  const Index n = x.rows();
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Index c = 0; c < x.cols(); ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
      d(i, j) = std::sqrt(s);
    }
  }
  return d;
}

// k nearest others of i, ties by ascending index.
inline std::vector<Index> knn(const Matrix& d, Index i, Index k) {
  std::vector<Index> idx;
  for (Index j = 0; j < d.rows(); ++j)
    if (j != i) idx.push_back(j);
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return d(i, a) < d(i, b); });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

// Floyd-Warshall over the symmetrized k-NN graph (no bridging).
inline Matrix floyd_warshall(const Matrix& d, Index k) {
  const Index n = d.rows();
  const double inf = std::numeric_limits<double>::infinity();
  Matrix g = Matrix::Constant(n, n, inf);
  for (Index i = 0; i < n; ++i) {
    g(i, i) = 0.0;
    for (Index j : knn(d, i, k)) {
      g(i, j) = d(i, j);
      g(j, i) = d(i, j);
    }
  }
  for (Index m = 0; m < n; ++m)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) g(i, j) = std::min(g(i, j), g(i, m) + g(m, j));
  return g;
}

// Sum over points of |N_g^a(i) ∩ N_g^b(i)| by explicit set intersection.
inline std::vector<std::int64_t> overlap_counts(const Matrix& da, const Matrix& db) {
  const Index n = da.rows();
  std::vector<std::int64_t> out(static_cast<std::size_t>(n - 1), 0);
  for (Index g = 1; g <= n - 1; ++g) {
    std::int64_t total = 0;
    for (Index i = 0; i < n; ++i) {
      const auto a = knn(da, i, g);
      const auto b = knn(db, i, g);
      const std::set<Index> sa(a.begin(), a.end());
      for (Index j : b) total += sa.count(j);
    }
    out[static_cast<std::size_t>(g - 1)] = total;
  }
  return out;
}

inline double spearman(const Vector& a, const Vector& b) {
  auto ranks = [](const Vector& v) {
    std::vector<Index> idx(static_cast<std::size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Index x, Index y) { return v(x) < v(y); });
    Vector r(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r(idx[i]) = static_cast<double>(i);
    return r;
  };
  const Vector ra = ranks(a), rb = ranks(b);
  const Vector ca = ra.array() - ra.mean(), cb = rb.array() - rb.mean();
  return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

// Leave-one-out 1-NN accuracy of labels in coordinate space.
inline double one_nn_accuracy(const Matrix& y, const std::vector<int>& labels) {
  const Matrix d = euclidean(y);
  int hits = 0;
  for (Index i = 0; i < y.rows(); ++i) hits += labels[knn(d, i, 1)[0]] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(y.rows());
}

inline Matrix two_blobs(Index per_blob, Index dim, double separation, fnmr::Seed seed,
                        std::vector<int>& labels) {
  Matrix x = random_points(2 * per_blob, dim, seed);
  labels.assign(static_cast<std::size_t>(2 * per_blob), 0);
  for (Index i = per_blob; i < 2 * per_blob; ++i) {
    x(i, 0) += separation;
    labels[static_cast<std::size_t>(i)] = 1;
  }
  return x;
}

}  // namespace oracle
