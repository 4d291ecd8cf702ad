#include "fnmr/synthdata.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace fnmr;

TEST_CASE("amplitude curve closed form") {
  CHECK(amplitude_curve(0.5, {1, 0, 0, 0.7}) == doctest::Approx(0.7).epsilon(1e-15));
  for (double t : {0.0, 0.13, 0.5, 0.99, 1.0}) CHECK(amplitude_curve(t, {0, 2, 3, 0}) == 0.0);
  // (1 + e^-2.5) / sqrt(0.1 pi), evaluated with 30-digit arithmetic.
  CHECK(std::abs(amplitude_curve(0.25, {1, 1, 1, 0}) - 1.93057394177203598567) < 1e-14);
  CHECK_THROWS_AS(amplitude_curve(std::nan(""), {1, 1, 1, 0}), Error);
  CHECK_THROWS_AS(amplitude_curve(0.5, {1, INFINITY, 1, 0}), Error);
}

TEST_CASE("warps") {
  for (double t : {0.0, 0.1, 0.5, 0.77, 1.0}) CHECK(warp(t, WarpSpec::power(1.0)) == doctest::Approx(t));
  CHECK(warp(0.5, WarpSpec::linear(0.3)) == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(warp(0.75, WarpSpec::linear(0.3)) == doctest::Approx(0.575).epsilon(1e-14));
  CHECK(warp(0.5, WarpSpec::betacdf(2, 2)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(warp(0.5, WarpSpec::linear(1.0)), Error);
  CHECK_THROWS_AS(warp(0.5, WarpSpec::linear(0.0)), Error);
  CHECK_THROWS_AS(warp(0.5, WarpSpec::power(-1.0)), Error);
  CHECK_THROWS_AS(warp(0.5, WarpSpec::betacdf(0.0, 1.0)), Error);
  CHECK_THROWS_AS(warp(1.5, WarpSpec::power(2.0)), Error);
}

TEST_CASE("warp monotonicity and endpoints") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const WarpSpec specs[] = {WarpSpec::linear(rng.uniform(0.01, 0.99)), WarpSpec::power(rng.uniform(0.5, 3)),
                              WarpSpec::betacdf(rng.uniform(0.5, 3), rng.uniform(0.5, 3)),
                              WarpSpec::identity()};
    for (const auto& w : specs) {
      CHECK(std::abs(warp(0.0, w)) <= 1e-12);
      CHECK(std::abs(warp(1.0, w) - 1.0) <= 1e-12);
      double a = rng.uniform(), b = rng.uniform();
      if (a > b) std::swap(a, b);
      CHECK(warp(a, w) <= warp(b, w));
    }
  }
}

TEST_CASE("incomplete beta") {
  // Reference values from 30-digit arithmetic.
  CHECK(incomplete_beta(0.3, 2, 3) == doctest::Approx(0.3483).epsilon(1e-13));
  CHECK(incomplete_beta(0.9, 0.7, 2.5) == doctest::Approx(0.998182993718037455530626).epsilon(1e-12));
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const double x = rng.uniform(), a = rng.uniform(0.2, 6), b = rng.uniform(0.2, 6);
    CHECK(std::abs(incomplete_beta(x, a, b) + incomplete_beta(1 - x, b, a) - 1.0) <= 1e-10);
  }
}

TEST_CASE("registry matches the settings table") {
  const auto& reg = setting_registry();
  REQUIRE(reg.size() == 11);
  const std::vector<std::pair<std::string, int>> expected = {
      {"a1-l", 1}, {"p1-l", 1}, {"c1-l", 1}, {"a2-l", 2}, {"p2-l", 2}, {"i2-l", 2},
      {"a2-sr", 2}, {"a3-hx", 3}, {"a3-sr", 3}, {"a3-sc", 3}, {"a3-tp", 3}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(reg[i].name == expected[i].first);
    CHECK(reg[i].df == expected[i].second);
    CHECK(static_cast<int>(reg[i].column_names.size()) == reg[i].df);
  }
  CHECK(find_setting("c1-l").feeds.front().size() == 2);
  CHECK(find_setting("a3-hx").space == ManifoldId::helix1d);
  CHECK_THROWS_AS(find_setting("nope"), Error);
}

TEST_CASE("linear sampling ranges and determinism") {
  for (const auto& s : setting_registry()) {
    if (!s.linear()) continue;
    const ParamSample p = sample_linear_params(s, 1000, 3);
    CHECK(p.values.cols() == s.df);
    for (Index c = 0; c < p.values.cols(); ++c) {
      const auto [lo, hi] = parameter_range(s.feeds[c].front());
      CHECK(p.values.col(c).minCoeff() >= lo);
      CHECK(p.values.col(c).maxCoeff() <= hi);
    }
    CHECK(sample_linear_params(s, 1000, 3).values == p.values);
  }
  const ParamSample p1 = sample_linear_params(find_setting("p1-l"), 1000, 1);
  CHECK(p1.values.minCoeff() >= 0.01);
  CHECK(p1.values.maxCoeff() <= 0.99);
  CHECK_THROWS_AS(sample_linear_params(find_setting("a3-hx"), 10, 1), Error);
  CHECK_THROWS_AS(sample_manifold_params(find_setting("a1-l"), 10, 1), Error);
}

TEST_CASE("manifold sampling") {
  for (const auto& s : setting_registry()) {
    if (s.linear()) continue;
    const ParamSample p = sample_manifold_params(s, 500, 5);
    CHECK(p.values.cols() == s.df);
    for (Index c = 0; c < p.values.cols(); ++c) {
      CHECK(p.values.col(c).minCoeff() == doctest::Approx(kParamLo).epsilon(1e-12));
      CHECK(p.values.col(c).maxCoeff() == doctest::Approx(kParamHi).epsilon(1e-12));
      // Affine rescaling keeps the order of the ambient coordinates.
      const Matrix ambient = manifold_ambient(s.space, p.intrinsic);
      CHECK(oracle::spearman(ambient.col(c), p.values.col(c)) == doctest::Approx(1.0));
    }
    CHECK(sample_manifold_params(s, 500, 5).values == p.values);
  }

  SUBCASE("helix columns lie on a rescaled circle") {
    const ParamSample p = sample_manifold_params(find_setting("a3-hx"), 1000, 2);
    // Undo the affine map, then check cos^2 + sin^2 = 1.
    for (Index i = 0; i < p.size(); ++i) {
      double r2 = 0.0;
      for (Index c = 0; c < 2; ++c) {
        const double scale = (p.ambient_max(c) - p.ambient_min(c)) / (kParamHi - kParamLo);
        const double x = p.ambient_min(c) + (p.values(i, c) - kParamLo) * scale;
        r2 += x * x;
      }
      CHECK(std::abs(r2 - 1.0) <= 1e-9);
    }
  }

  SUBCASE("1-D swiss roll is path-like") {
    const ParamSample p = sample_manifold_params(find_setting("a2-sr"), 1000, 4);
    const Matrix d = oracle::euclidean(p.values);
    // Sorting by the intrinsic coordinate, each point's nearest neighbor is
    // adjacent along the spiral for the overwhelming majority of points.
    std::vector<Index> order(static_cast<std::size_t>(p.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return p.intrinsic(a, 0) < p.intrinsic(b, 0); });
    std::vector<Index> pos(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) pos[static_cast<std::size_t>(order[r])] = static_cast<Index>(r);
    int adjacent = 0;
    for (Index i = 0; i < p.size(); ++i) {
      const Index j = oracle::knn(d, i, 1)[0];
      adjacent += std::abs(pos[i] - pos[j]) <= 2 ? 1 : 0;
    }
    CHECK(adjacent >= 990);
  }
}

TEST_CASE("generate_setting") {
  SUBCASE("a1-l rows are proportional") {
    const GeneratedData g = generate_setting(find_setting("a1-l"), 50, 40, 1);
    const Vector base = g.data.values.row(0).transpose() / g.params.values(0, 0);
    for (Index i = 0; i < g.data.size(); ++i) {
      const Vector row = g.data.values.row(i).transpose();
      CHECK((row - g.params.values(i, 0) * base).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
  SUBCASE("phase settings share endpoint values") {
    const GeneratedData g = generate_setting(find_setting("p1-l"), 60, 30, 2);
    const Index m = g.data.grid_size();
    CHECK((g.data.values.col(0).array() - g.data.values(0, 0)).abs().maxCoeff() <= 1e-12);
    CHECK((g.data.values.col(m - 1).array() - g.data.values(0, m - 1)).abs().maxCoeff() <= 1e-12);
  }
  SUBCASE("shape and composition") {
    const SettingSpec& s = find_setting("a3-hx");
    const GeneratedData g = generate_setting(s, 1000, 200, 1);
    CHECK(g.data.values.rows() == 1000);
    CHECK(g.data.values.cols() == 200);
    CHECK(g.data.grid(0) == 0.0);
    CHECK(g.data.grid(199) == 1.0);
    CHECK(g.data.provenance == "a3-hx");
    for (const auto& name : {"p2-l", "i2-l", "c1-l"}) {
      const SettingSpec& sp = find_setting(name);
      const GeneratedData h = generate_setting(sp, 20, 25, 9);
      for (Index i = 0; i < 20; ++i)
        for (Index j = 0; j < 25; ++j) {
          const double expect = amplitude_curve(warp(h.data.grid(j), warp_for(sp, h.params, i)),
                                                amplitude_for(sp, h.params, i));
          CHECK(h.data.values(i, j) == expect);
        }
    }
  }
  SUBCASE("coupled setting uses one column for a1 and p2") {
    const SettingSpec& s = find_setting("c1-l");
    const ParamSample p = sample_linear_params(s, 10, 3);
    for (Index i = 0; i < 10; ++i) {
      CHECK(amplitude_for(s, p, i)[0] == p.values(i, 0));
      CHECK(warp_for(s, p, i).first == p.values(i, 0));
    }
  }
  CHECK_THROWS_AS(generate_setting(find_setting("a1-l"), 2, 10, 1), Error);
  CHECK_THROWS_AS(generate_setting(find_setting("a1-l"), 10, 1, 1), Error);
}
