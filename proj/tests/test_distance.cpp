#include "fnmr/distance.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace fnmr;

TEST_CASE("pairwise direct distances") {
  Matrix x(3, 2);
  x << 0, 0, 3, 4, 0, 0;
  const DistanceMatrix d = pairwise_direct(x);
  CHECK(d(0, 1) == 5.0);
  CHECK(d(0, 2) == 0.0);
  CHECK(d.metric == Metric::direct);
  d.validate();

  const Matrix r = oracle::random_points(4, 6, 3);
  CHECK((pairwise_direct(r).d - oracle::euclidean(r)).cwiseAbs().maxCoeff() <= 1e-12);

  Vector w(2);
  w << 4.0, 0.0;
  CHECK(pairwise_direct(x, w)(0, 1) == doctest::Approx(6.0));

  Matrix bad = x;
  bad(1, 1) = NAN;
  CHECK_THROWS_AS(pairwise_direct(bad), Error);
}

TEST_CASE("k-NN graph") {
  Matrix line(3, 1);
  line << 0, 1, 2;
  const NeighborGraph g = knn_graph(pairwise_direct(line), 1);
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 2));
  CHECK_FALSE(g.has_edge(0, 2));

  const Matrix r = oracle::random_points(10, 3, 5);
  const DistanceMatrix d = pairwise_direct(r);
  const NeighborGraph full = knn_graph(d, 9);
  CHECK(full.edge_count() == 45);
  const NeighborGraph g3 = knn_graph(d, 3);
  for (const auto& adj : g3.adjacency) CHECK(adj.size() >= 3);
  for (Index i = 0; i < 10; ++i)
    for (const Edge& e : g3.adjacency[i]) {
      CHECK(g3.has_edge(e.to, i));
      CHECK(e.weight == d(i, e.to));
    }

  CHECK_THROWS_AS(knn_graph(d, 0), Error);
  CHECK_THROWS_AS(knn_graph(d, 10), Error);
}

TEST_CASE("k-NN ties break toward the lower index") {
  Matrix x(4, 1);
  x << 0, 1, -1, 5;
  const auto nn = nearest_neighbors(pairwise_direct(x), 0, 1);
  CHECK(nn == std::vector<Index>{1});
}

TEST_CASE("geodesic distances") {
  SUBCASE("line") {
    Matrix line(12, 1);
    for (Index i = 0; i < 12; ++i) line(i, 0) = std::pow(1.3, static_cast<double>(i));
    const DistanceMatrix d = pairwise_direct(line);
    const DistanceMatrix g = geodesic_from_direct(d, 2);
    CHECK((g.d - d.d).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(g.metric == Metric::geodesic);
    CHECK(g.geodesic_k == 2);
  }
  SUBCASE("octagon") {
    Matrix x(8, 2);
    for (Index i = 0; i < 8; ++i) {
      const double a = 2.0 * M_PI * static_cast<double>(i) / 8.0;
      x(i, 0) = std::cos(a);
      x(i, 1) = std::sin(a);
    }
    const DistanceMatrix d = pairwise_direct(x);
    const DistanceMatrix g = geodesic_from_direct(d, 2);
    const double chord = 2.0 * std::sin(M_PI / 8.0);
    const Matrix fw = oracle::floyd_warshall(d.d, 2);
    CHECK(g(0, 4) == doctest::Approx(fw(0, 4)).epsilon(1e-12));
    CHECK(g(0, 4) == doctest::Approx(4.0 * chord).epsilon(1e-12));
    CHECK(g(0, 4) > d(0, 4));
  }
  SUBCASE("random instances against Floyd-Warshall") {
    for (int trial = 0; trial < 20; ++trial) {
      const Index n = 10 + trial;
      const Matrix x = oracle::random_points(n, 3, 100 + static_cast<Seed>(trial));
      const DistanceMatrix d = pairwise_direct(x);
      const int k = 3 + trial % 4;
      const Matrix fw = oracle::floyd_warshall(d.d, k);
      if (!fw.allFinite()) continue;  // disconnected: bridging differs by design
      const DistanceMatrix g = geodesic_from_direct(d, k);
      CHECK((g.d - fw).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((g.d.array() >= d.d.array() - 1e-12).all());
      g.validate();
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          for (Index m = 0; m < n; ++m) CHECK(g(i, j) <= g(i, m) + g(m, j) + 1e-12);
    }
  }
  SUBCASE("complete graph reproduces direct distances") {
    const Matrix x = oracle::random_points(25, 4, 8);
    const DistanceMatrix d = pairwise_direct(x);
    CHECK((geodesic_from_direct(d, 24).d - d.d).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("monotone in k on connected graphs") {
    const Matrix x = oracle::random_points(30, 2, 12);
    const DistanceMatrix d = pairwise_direct(x);
    Matrix prev = geodesic_from_direct(d, 4).d;
    for (int k = 5; k <= 12; ++k) {
      const Matrix cur = geodesic_from_direct(d, k).d;
      CHECK((cur.array() <= prev.array() + 1e-12).all());
      prev = cur;
    }
  }
  SUBCASE("disconnected graphs are bridged") {
    Matrix x(6, 1);
    x << 0, 0.1, 0.2, 10, 10.1, 10.3;
    const DistanceMatrix g = geodesic_from_direct(pairwise_direct(x), 1);
    CHECK(g.d.allFinite());
    CHECK(g.bridged_edges == 1);
    CHECK(g(0, 5) == doctest::Approx(10.3));
  }
  SUBCASE("worker count does not change results") {
    const Matrix x = oracle::random_points(60, 3, 21);
    const DistanceMatrix d = pairwise_direct(x);
    CHECK(geodesic_from_direct(d, 5, 1).d == geodesic_from_direct(d, 5, 4).d);
  }
}

TEST_CASE("epsilon_compute") {
  const Index n = 50;
  DistanceMatrix c;
  c.d = Matrix::Constant(n, n, 1.7);
  c.d.diagonal().setZero();
  CHECK(epsilon_compute(c) == doctest::Approx(2.0 * 1.7 * 1.7));

  const Matrix x = oracle::random_points(100, 2, 4);
  const DistanceMatrix d = pairwise_direct(x);
  const double e = epsilon_compute(d);
  CHECK(e > 0.0);
  CHECK(std::isfinite(e));
  DistanceMatrix scaled = d;
  scaled.d *= 3.0;
  CHECK(epsilon_compute(scaled) == doctest::Approx(9.0 * e).epsilon(1e-12));

  DistanceMatrix zero;
  zero.d = Matrix::Zero(5, 5);
  CHECK_THROWS_AS(epsilon_compute(zero), Error);
  CHECK_THROWS_AS(epsilon_compute(d, 0.0), Error);
}
