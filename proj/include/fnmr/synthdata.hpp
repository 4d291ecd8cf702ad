#pragma once

#include "fnmr/common.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace fnmr {

// ---------------------------------------------------------------------------
// Amplitude and phase models
// ---------------------------------------------------------------------------

/// Amplitude coefficients (a1, a2, a3, a4).
using AmplitudeParams = std::array<double, 4>;

/// Two Gaussian bumps at 0.25 and 0.75 with common scale a1, individual
/// heights a2 and a3, and vertical offset a4.
double amplitude_curve(double t, const AmplitudeParams& a);

enum class WarpKind { identity, linear, power, betacdf };

/// Monotone map of [0,1] onto itself.
///  - linear:  piecewise linear with slope p1 on [0, 0.5], requires p1 in (0,1)
///  - power:   t^p2, requires p2 > 0
///  - betacdf: regularized incomplete beta I_t(p3, p4), requires p3, p4 > 0
struct WarpSpec {
  WarpKind kind = WarpKind::identity;
  double first = 0.0;   // p1 (linear), p2 (power) or p3 (betacdf)
  double second = 0.0;  // p4 (betacdf)

  static WarpSpec identity() { return {}; }
  static WarpSpec linear(double p1) { return {WarpKind::linear, p1, 0.0}; }
  static WarpSpec power(double p2) { return {WarpKind::power, p2, 0.0}; }
  static WarpSpec betacdf(double p3, double p4) { return {WarpKind::betacdf, p3, p4}; }

  /// Throws Error when the parameters are outside the valid range.
  void validate() const;
};

double warp(double t, const WarpSpec& w);

/// Regularized incomplete beta function I_x(a, b), the Beta(a, b) cdf.
double incomplete_beta(double x, double a, double b);

// ---------------------------------------------------------------------------
// Settings
// ---------------------------------------------------------------------------

enum class ManifoldId { linear_box, swiss1d, swiss2d, helix1d, scurve2d, twopeaks2d };

enum class Variation { amplitude, phase, coupled, independent };

/// Names of the eight generator parameters.
enum class Param { a1, a2, a3, a4, p1, p2, p3, p4 };

std::string_view to_string(Param p);
std::string_view to_string(ManifoldId m);
std::string_view to_string(WarpKind w);

/// One row of the simulation-settings table.
///
/// Each sampled column feeds one or more generator parameters (`feeds`);
/// the coupled setting c1-l has one column feeding both a1 and p2. The
/// warp draws its parameters from `warp_columns` in order.
struct SettingSpec {
  std::string name;
  int df = 0;
  ManifoldId space = ManifoldId::linear_box;
  Variation variation = Variation::amplitude;
  std::vector<std::string> column_names;
  std::vector<std::vector<Param>> feeds;
  WarpKind warp = WarpKind::identity;
  std::vector<int> warp_columns;

  bool linear() const { return space == ManifoldId::linear_box; }
};

/// All eleven settings in table order.
const std::vector<SettingSpec>& setting_registry();

/// Throws Error for unknown names.
const SettingSpec& find_setting(std::string_view name);

/// Sampling range for a column in a linear setting.
std::pair<double, double> parameter_range(Param p);

inline constexpr double kParamLo = 0.5;
inline constexpr double kParamHi = 3.0;

/// Ground-truth generator coordinates.
struct ParamSample {
  Matrix values;                           // n x q, rescaled into valid ranges
  ManifoldId manifold = ManifoldId::linear_box;
  std::vector<std::string> active_params;  // one name per column
  Matrix intrinsic;                        // n x d intrinsic coordinates (u, h, ...)
  Vector ambient_min;                      // per-column affine map used for rescaling;
  Vector ambient_max;                      // empty for linear settings

  Index size() const { return values.rows(); }
};

struct FunctionalDataset {
  Vector grid;    // m strictly increasing points
  Matrix values;  // n x m
  std::string provenance = "external";

  Index size() const { return values.rows(); }
  Index grid_size() const { return grid.size(); }

  /// Throws Error when the dataset invariants are violated.
  void validate() const;
};

ParamSample sample_linear_params(const SettingSpec& setting, Index n, Seed seed);
ParamSample sample_manifold_params(const SettingSpec& setting, Index n, Seed seed);

/// Ambient coordinates of a manifold at the given intrinsic coordinates
/// (one row per point). Exposed so tests can check the parameterizations.
Matrix manifold_ambient(ManifoldId id, const Matrix& intrinsic);

/// Full generator parameters (a, warp) for row i of a sample.
AmplitudeParams amplitude_for(const SettingSpec& setting, const ParamSample& sample, Index i);
WarpSpec warp_for(const SettingSpec& setting, const ParamSample& sample, Index i);

Vector equispaced_grid(Index m);

struct GeneratedData {
  FunctionalDataset data;
  ParamSample params;
};

GeneratedData generate_setting(const SettingSpec& setting, Index n = 1000, Index m = 200,
                               Seed seed = 1);

}  // namespace fnmr
