#include "fnmr/synthdata.hpp"

#include "fnmr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fnmr {

namespace {

constexpr double kPi = std::numbers::pi;

double bump(double t, double mu) {
  const double z = t - mu;
  return std::exp(-(z * z) / 0.1);
}

// Continued fraction for I_x(a, b) by the modified Lentz method.
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error("incomplete_beta: continued fraction did not converge");
}

double log_beta(double a, double b) {
  // lgamma is positive-argument only here, so the sign output is unused.
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

struct ManifoldDomain {
  int intrinsic_dim;
  double u_lo, u_hi;
  double h_lo, h_hi;
};

ManifoldDomain domain_of(ManifoldId id) {
  switch (id) {
    case ManifoldId::swiss1d: return {1, 1.5 * kPi, 4.5 * kPi, 0, 0};
    case ManifoldId::swiss2d: return {2, 1.5 * kPi, 4.5 * kPi, 0.0, 20.0};
    case ManifoldId::helix1d: return {1, 0.0, 1.0, 0, 0};
    case ManifoldId::scurve2d: return {2, -1.5 * kPi, 1.5 * kPi, 0.0, 2.0};
    case ManifoldId::twopeaks2d: return {2, -1.0, 1.0, -1.0, 1.0};
    case ManifoldId::linear_box: break;
  }
  throw Error("unknown manifold id");
}

SettingSpec make_setting(std::string name, int df, ManifoldId space, Variation variation,
                         std::vector<std::string> columns, std::vector<std::vector<Param>> feeds,
                         WarpKind warp = WarpKind::identity, std::vector<int> warp_columns = {}) {
  SettingSpec s;
  s.name = std::move(name);
  s.df = df;
  s.space = space;
  s.variation = variation;
  s.column_names = std::move(columns);
  s.feeds = std::move(feeds);
  s.warp = warp;
  s.warp_columns = std::move(warp_columns);
  return s;
}

ParamSample rescale_ambient(const SettingSpec& setting, const Matrix& intrinsic) {
  ParamSample out;
  out.manifold = setting.space;
  out.active_params = setting.column_names;
  out.intrinsic = intrinsic;
  Matrix ambient = manifold_ambient(setting.space, intrinsic);
  require(ambient.cols() == static_cast<Index>(setting.column_names.size()),
          "manifold ambient dimension does not match setting " + setting.name);
  out.ambient_min = ambient.colwise().minCoeff().transpose();
  out.ambient_max = ambient.colwise().maxCoeff().transpose();
  out.values.resize(ambient.rows(), ambient.cols());
  for (Index c = 0; c < ambient.cols(); ++c) {
    const double lo = out.ambient_min(c);
    const double span = out.ambient_max(c) - lo;
    for (Index r = 0; r < ambient.rows(); ++r) {
      // A constant column maps to the centre of the box.
      out.values(r, c) = span > 0.0 ? kParamLo + (kParamHi - kParamLo) * (ambient(r, c) - lo) / span
                                     : 0.5 * (kParamLo + kParamHi);
    }
  }
  return out;
}

}  // namespace

double amplitude_curve(double t, const AmplitudeParams& a) {
  require(std::isfinite(t) && std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); }),
          "amplitude_curve: non-finite input");
  static const double scale = 1.0 / std::sqrt(0.1 * kPi);
  return a[0] * scale * (a[1] * bump(t, 0.25) + a[2] * bump(t, 0.75)) + a[3];
}

void WarpSpec::validate() const {
  switch (kind) {
    case WarpKind::identity: return;
    case WarpKind::linear:
      require(first > 0.0 && first < 1.0, "linear warp requires p1 in (0, 1)");
      return;
    case WarpKind::power:
      require(first > 0.0 && std::isfinite(first), "power warp requires p2 > 0");
      return;
    case WarpKind::betacdf:
      require(first > 0.0 && second > 0.0 && std::isfinite(first) && std::isfinite(second),
              "beta-cdf warp requires p3, p4 > 0");
      return;
  }
}

double incomplete_beta(double x, double a, double b) {
  require(a > 0.0 && b > 0.0, "incomplete_beta: shape parameters must be positive");
  require(std::isfinite(x), "incomplete_beta: non-finite argument");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double warp(double t, const WarpSpec& w) {
  require(std::isfinite(t) && t >= 0.0 && t <= 1.0, "warp: t must lie in [0, 1]");
  w.validate();
  switch (w.kind) {
    case WarpKind::identity: return t;
    case WarpKind::linear:
      return t <= 0.5 ? w.first * t : (2.0 - w.first) * (t - 1.0) + 1.0;
    case WarpKind::power: return std::pow(t, w.first);
    case WarpKind::betacdf: return incomplete_beta(t, w.first, w.second);
  }
  return t;
}

std::string_view to_string(Param p) {
  switch (p) {
    case Param::a1: return "a1";
    case Param::a2: return "a2";
    case Param::a3: return "a3";
    case Param::a4: return "a4";
    case Param::p1: return "p1";
    case Param::p2: return "p2";
    case Param::p3: return "p3";
    case Param::p4: return "p4";
  }
  return "?";
}

std::string_view to_string(ManifoldId m) {
  switch (m) {
    case ManifoldId::linear_box: return "linear-box";
    case ManifoldId::swiss1d: return "swiss1d";
    case ManifoldId::swiss2d: return "swiss2d";
    case ManifoldId::helix1d: return "helix1d";
    case ManifoldId::scurve2d: return "scurve2d";
    case ManifoldId::twopeaks2d: return "twopeaks2d";
  }
  return "?";
}

std::string_view to_string(WarpKind w) {
  switch (w) {
    case WarpKind::identity: return "identity";
    case WarpKind::linear: return "linear";
    case WarpKind::power: return "power";
    case WarpKind::betacdf: return "betacdf";
  }
  return "?";
}

const std::vector<SettingSpec>& setting_registry() {
  using enum Param;
  using M = ManifoldId;
  using V = Variation;
  static const std::vector<SettingSpec> registry = {
      make_setting("a1-l", 1, M::linear_box, V::amplitude, {"a1"}, {{a1}}),
      make_setting("p1-l", 1, M::linear_box, V::phase, {"p1"}, {{p1}}, WarpKind::linear, {0}),
      make_setting("c1-l", 1, M::linear_box, V::coupled, {"a1=p2"}, {{a1, p2}}, WarpKind::power, {0}),
      make_setting("a2-l", 2, M::linear_box, V::amplitude, {"a2", "a3"}, {{a2}, {a3}}),
      make_setting("p2-l", 2, M::linear_box, V::phase, {"p1", "p2"}, {{p1}, {p2}}, WarpKind::betacdf,
                   {0, 1}),
      make_setting("i2-l", 2, M::linear_box, V::independent, {"a1", "p1"}, {{a1}, {p1}},
                   WarpKind::power, {1}),
      make_setting("a2-sr", 2, M::swiss1d, V::amplitude, {"a1", "a2"}, {{a1}, {a2}}),
      make_setting("a3-hx", 3, M::helix1d, V::amplitude, {"a1", "a2", "a3"}, {{a1}, {a2}, {a3}}),
      make_setting("a3-sr", 3, M::swiss2d, V::amplitude, {"a2", "a3", "a4"}, {{a2}, {a3}, {a4}}),
      make_setting("a3-sc", 3, M::scurve2d, V::amplitude, {"a2", "a3", "a4"}, {{a2}, {a3}, {a4}}),
      make_setting("a3-tp", 3, M::twopeaks2d, V::amplitude, {"a2", "a3", "a4"},
                   {{a2}, {a3}, {a4}}),
  };
  return registry;
}

const SettingSpec& find_setting(std::string_view name) {
  for (const auto& s : setting_registry())
    if (s.name == name) return s;
  throw Error("unknown setting '" + std::string(name) + "'");
}

std::pair<double, double> parameter_range(Param p) {
  if (p == Param::p1) return {0.01, 0.99};
  return {kParamLo, kParamHi};
}

ParamSample sample_linear_params(const SettingSpec& setting, Index n, Seed seed) {
  require(setting.linear(), "sample_linear_params: setting " + setting.name + " is not linear");
  require(n >= 1, "sample_linear_params: n must be positive");
  ParamSample out;
  out.manifold = ManifoldId::linear_box;
  out.active_params = setting.column_names;
  const Index q = static_cast<Index>(setting.column_names.size());
  out.values.resize(n, q);
  Rng rng(seed);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < q; ++c) {
      // A coupled column takes the range of its first parameter.
      const auto [lo, hi] = parameter_range(setting.feeds[c].front());
      out.values(i, c) = rng.uniform(lo, hi);
    }
  }
  out.intrinsic = out.values;
  return out;
}

Matrix manifold_ambient(ManifoldId id, const Matrix& intrinsic) {
  const Index n = intrinsic.rows();
  Matrix out;
  switch (id) {
    case ManifoldId::swiss1d:
      out.resize(n, 2);
      for (Index i = 0; i < n; ++i) {
        const double u = intrinsic(i, 0);
        out(i, 0) = u * std::cos(u);
        out(i, 1) = u * std::sin(u);
      }
      return out;
    case ManifoldId::swiss2d:
      out.resize(n, 3);
      for (Index i = 0; i < n; ++i) {
        const double u = intrinsic(i, 0);
        out(i, 0) = u * std::cos(u);
        out(i, 1) = intrinsic(i, 1);
        out(i, 2) = u * std::sin(u);
      }
      return out;
    case ManifoldId::helix1d:
      out.resize(n, 3);
      for (Index i = 0; i < n; ++i) {
        const double u = intrinsic(i, 0);
        out(i, 0) = std::cos(2.0 * kPi * u);
        out(i, 1) = std::sin(2.0 * kPi * u);
        out(i, 2) = std::cos(4.0 * kPi * u);
      }
      return out;
    case ManifoldId::scurve2d:
      out.resize(n, 3);
      for (Index i = 0; i < n; ++i) {
        const double u = intrinsic(i, 0);
        const double sign = u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
        out(i, 0) = std::sin(u);
        out(i, 1) = intrinsic(i, 1);
        out(i, 2) = sign * (std::cos(u) - 1.0);
      }
      return out;
    case ManifoldId::twopeaks2d:
      out.resize(n, 3);
      for (Index i = 0; i < n; ++i) {
        const double u = intrinsic(i, 0);
        const double v = intrinsic(i, 1);
        out(i, 0) = u;
        out(i, 1) = v;
        out(i, 2) = std::exp(-((u + 0.5) * (u + 0.5) + v * v) / 0.08) +
                    std::exp(-((u - 0.5) * (u - 0.5) + v * v) / 0.08);
      }
      return out;
    case ManifoldId::linear_box: break;
  }
  throw Error("manifold_ambient: unknown manifold id");
}

ParamSample sample_manifold_params(const SettingSpec& setting, Index n, Seed seed) {
  require(!setting.linear(), "sample_manifold_params: setting " + setting.name + " is linear");
  require(n >= 2, "sample_manifold_params: n must be at least 2");
  const ManifoldDomain dom = domain_of(setting.space);
  Matrix intrinsic(n, dom.intrinsic_dim);
  Rng rng(seed);
  for (Index i = 0; i < n; ++i) {
    intrinsic(i, 0) = rng.uniform(dom.u_lo, dom.u_hi);
    if (dom.intrinsic_dim == 2) intrinsic(i, 1) = rng.uniform(dom.h_lo, dom.h_hi);
  }
  return rescale_ambient(setting, intrinsic);
}

AmplitudeParams amplitude_for(const SettingSpec& setting, const ParamSample& sample, Index i) {
  AmplitudeParams a{1.0, 1.0, 1.0, 0.0};
  for (std::size_t c = 0; c < setting.feeds.size(); ++c) {
    for (Param p : setting.feeds[c]) {
      const auto slot = static_cast<std::size_t>(p);
      if (slot < 4) a[slot] = sample.values(i, static_cast<Index>(c));
    }
  }
  return a;
}

WarpSpec warp_for(const SettingSpec& setting, const ParamSample& sample, Index i) {
  const auto col = [&](std::size_t k) { return sample.values(i, setting.warp_columns.at(k)); };
  switch (setting.warp) {
    case WarpKind::identity: return WarpSpec::identity();
    case WarpKind::linear: return WarpSpec::linear(col(0));
    case WarpKind::power: return WarpSpec::power(col(0));
    case WarpKind::betacdf: return WarpSpec::betacdf(col(0), col(1));
  }
  return WarpSpec::identity();
}

Vector equispaced_grid(Index m) {
  require(m >= 2, "grid needs at least two points");
  return Vector::LinSpaced(m, 0.0, 1.0);
}

void FunctionalDataset::validate() const {
  require(grid.size() >= 2, "dataset: grid needs at least two points");
  require(values.rows() >= 3, "dataset: at least three observations required");
  require(values.cols() == grid.size(), "dataset: column count does not match grid");
  for (Index j = 1; j < grid.size(); ++j)
    require(grid(j) > grid(j - 1), "dataset: grid must be strictly increasing");
  require(grid.allFinite() && values.allFinite(), "dataset: non-finite values");
}

GeneratedData generate_setting(const SettingSpec& setting, Index n, Index m, Seed seed) {
  require(n >= 3, "generate_setting: n must be at least 3");
  require(m >= 2, "generate_setting: m must be at least 2");
  GeneratedData out;
  out.params = setting.linear() ? sample_linear_params(setting, n, seed)
                                : sample_manifold_params(setting, n, seed);
  out.data.grid = equispaced_grid(m);
  out.data.values.resize(n, m);
  out.data.provenance = setting.name;
  for (Index i = 0; i < n; ++i) {
    const AmplitudeParams a = amplitude_for(setting, out.params, i);
    const WarpSpec w = warp_for(setting, out.params, i);
    w.validate();
    for (Index j = 0; j < m; ++j) out.data.values(i, j) = amplitude_curve(warp(out.data.grid(j), w), a);
  }
  return out;
}

}  // namespace fnmr
