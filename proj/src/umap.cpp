#include "fnmr/embed.hpp"

#include "fnmr/eigen_utils.hpp"
#include "fnmr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace fnmr {

namespace umap_detail {

namespace {

constexpr int kMaxBisection = 200;
constexpr double kCalibrationTol = 1e-7;

}  // namespace

SmoothKnn smooth_knn(const DistanceMatrix& d, int n_neighbors) {
  const Index n = d.size();
  require(n_neighbors >= 2 && n_neighbors <= n - 1, "umap: n_neighbors must lie in [2, n-1]");
  SmoothKnn out;
  out.membership = Matrix::Zero(n, n);
  out.rho.resize(n);
  out.sigma.resize(n);
  out.residual.resize(n);
  const double target = std::log2(static_cast<double>(n_neighbors));

  for (Index i = 0; i < n; ++i) {
    const std::vector<Index> nn = nearest_neighbors(d, i, n_neighbors);
    const double rho = d(i, nn.front());
    const auto total = [&](double sigma) {
      double s = 0.0;
      for (Index j : nn) s += std::exp(-std::max(0.0, d(i, j) - rho) / sigma);
      return s;
    };
    double mean_gap = 0.0;
    for (Index j : nn) mean_gap += d(i, j) - rho;
    mean_gap /= static_cast<double>(nn.size());
    double sigma = mean_gap > 0.0 ? mean_gap : 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double value = total(sigma);
    for (int iter = 0; iter < kMaxBisection && std::abs(value - target) > kCalibrationTol; ++iter) {
      if (value > target) {
        hi = sigma;
        sigma = 0.5 * (sigma + lo);
      } else {
        lo = sigma;
        sigma = std::isinf(hi) ? 2.0 * sigma : 0.5 * (sigma + hi);
      }
      value = total(sigma);
    }
    out.rho(i) = rho;
    out.sigma(i) = sigma;
    out.residual(i) = std::abs(value - target);
    for (Index j : nn) out.membership(i, j) = std::exp(-std::max(0.0, d(i, j) - rho) / sigma);
  }
  return out;
}

Matrix fuzzy_union(const Matrix& directed) {
  const Matrix t = directed.transpose();
  return directed + t - directed.cwiseProduct(t);
}

CurveParams fit_curve(double min_dist, double spread) {
  require(min_dist >= 0.0 && spread > 0.0, "umap: min_dist must be >= 0 and spread > 0");
  constexpr int kPoints = 300;
  constexpr double kTol = 1e-6;
  const Vector x = Vector::LinSpaced(kPoints, 0.0, 3.0 * spread);
  Vector y(kPoints);
  for (int i = 0; i < kPoints; ++i)
    y(i) = x(i) < min_dist ? 1.0 : std::exp(-(x(i) - min_dist) / spread);

  // Levenberg-Marquardt on (a, b).
  double a = 1.0, b = 1.0;
  const auto residual_sum = [&](double aa, double bb) {
    double s = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const double r = 1.0 / (1.0 + aa * std::pow(x(i), 2.0 * bb)) - y(i);
      s += r * r;
    }
    return s;
  };
  double cost = residual_sum(a, b);
  double lambda = 1e-3;
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (int i = 0; i < kPoints; ++i) {
      const double xi = x(i);
      const double p = xi > 0.0 ? std::pow(xi, 2.0 * b) : 0.0;
      const double f = 1.0 / (1.0 + a * p);
      const double r = f - y(i);
      const double df_da = -p * f * f;
      const double df_db = xi > 0.0 ? -a * p * 2.0 * std::log(xi) * f * f : 0.0;
      const Eigen::Vector2d g(df_da, df_db);
      jtj += g * g.transpose();
      jtr += g * r;
    }
    Eigen::Matrix2d damped = jtj;
    damped.diagonal() *= (1.0 + lambda);
    const Eigen::Vector2d step = damped.ldlt().solve(-jtr);
    const double na = a + step(0), nb = b + step(1);
    if (na > 0.0 && nb > 0.0) {
      const double ncost = residual_sum(na, nb);
      if (ncost <= cost) {
        const bool done = step.norm() <= kTol * (1.0 + std::hypot(a, b));
        a = na;
        b = nb;
        cost = ncost;
        lambda = std::max(lambda * 0.1, 1e-12);
        if (done) break;
        continue;
      }
    }
    lambda *= 10.0;
    if (lambda > 1e12) break;
  }
  return {a, b};
}

}  // namespace umap_detail

namespace {

umap_detail::CurveParams cached_curve(double min_dist) {
  static std::mutex mutex;
  static std::map<double, umap_detail::CurveParams> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(min_dist); it != cache.end()) return it->second;
  }
  const auto fit = umap_detail::fit_curve(min_dist);
  std::lock_guard lock(mutex);
  cache.emplace(min_dist, fit);
  return fit;
}

int count_components(const Matrix& w) {
  const Index n = w.rows();
  std::vector<int> label(n, -1);
  std::vector<Index> stack;
  int components = 0;
  for (Index s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    label[s] = components;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      for (Index u = 0; u < n; ++u) {
        if (label[u] < 0 && w(v, u) > 0.0) {
          label[u] = components;
          stack.push_back(u);
        }
      }
    }
    ++components;
  }
  return components;
}

Matrix random_init(Index n, int dim, Rng& rng) {
  Matrix y(n, dim);
  for (Index i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) y(i, c) = rng.uniform(-10.0, 10.0);
  return y;
}

Matrix spectral_init(const Matrix& w, int dim, Rng& rng) {
  const Index n = w.rows();
  const Vector deg = w.rowwise().sum();
  const Vector inv_sqrt = deg.cwiseSqrt().cwiseInverse();
  // Largest eigenvalues of D^{-1/2} W D^{-1/2} are the smallest of the
  // normalized Laplacian; index 0 is the trivial one.
  Matrix s = inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal();
  s = 0.5 * (s + s.transpose());
  const SymmetricEigen eig = symmetric_eigen(s);
  Matrix y = eig.vectors.middleCols(1, dim);
  fix_column_signs(y);
  const double scale = y.cwiseAbs().maxCoeff();
  y *= scale > 0.0 ? 10.0 / scale : 1.0;
  for (Index i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) y(i, c) += 1e-4 * rng.normal();
  return y;
}

double clip(double v) { return std::clamp(v, -4.0, 4.0); }

}  // namespace

Embedding umap_fit(const DistanceMatrix& d, const UmapParams& p, Seed seed) {
  const Index n = d.size();
  require(n >= 3, "umap: need at least three points");
  require(p.n_components >= 1 && p.n_components <= n - 2, "umap: n_components out of range");
  require(p.n_epochs >= 1, "umap: n_epochs must be positive");
  require(d.d.allFinite(), "umap: non-finite distances");

  const umap_detail::SmoothKnn knn = umap_detail::smooth_knn(d, p.n_neighbors);
  const Matrix w = umap_detail::fuzzy_union(knn.membership);
  const umap_detail::CurveParams curve = cached_curve(p.min_dist);
  const double a = curve.a, b = curve.b;

  Embedding out;
  out.method = Method::umap;
  out.diagnostics["a"] = a;
  out.diagnostics["b"] = b;
  out.diagnostics["max_calibration_residual"] = knn.residual.maxCoeff();

  Rng rng(seed);
  Matrix y;
  if (p.init == UmapInit::spectral) {
    const int components = count_components(w);
    if (components > 1) {
      out.warnings.push_back("umap: fuzzy graph has " + std::to_string(components) +
                             " components; spectral init replaced by random init");
      out.diagnostics["init_fallback"] = 1.0;
      y = random_init(n, p.n_components, rng);
    } else {
      y = spectral_init(w, p.n_components, rng);
    }
  } else {
    y = random_init(n, p.n_components, rng);
  }

  // Edge list in row-major order over both directions of each pair.
  struct EdgeRec {
    Index head, tail;
    double epochs_per_sample;
  };
  const double max_w = w.maxCoeff();
  const double min_keep = max_w / static_cast<double>(p.n_epochs);
  std::vector<EdgeRec> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && w(i, j) > 0.0 && w(i, j) >= min_keep) edges.push_back({i, j, max_w / w(i, j)});
  out.diagnostics["edges"] = static_cast<double>(edges.size());

  constexpr double kNegativeRate = 5.0;
  std::vector<double> next_sample(edges.size());
  std::vector<double> neg_interval(edges.size());
  std::vector<double> next_negative(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    next_sample[e] = edges[e].epochs_per_sample;
    neg_interval[e] = edges[e].epochs_per_sample / kNegativeRate;
    next_negative[e] = neg_interval[e];
  }

  const int dim = p.n_components;
  std::vector<double> delta(dim);
  for (int epoch = 0; epoch < p.n_epochs; ++epoch) {
    const double alpha = 1.0 - static_cast<double>(epoch) / static_cast<double>(p.n_epochs);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (next_sample[e] > epoch) continue;
      const Index j = edges[e].head;
      const Index k = edges[e].tail;
      double dist2 = (y.row(j) - y.row(k)).squaredNorm();
      if (dist2 > 0.0) {
        const double coeff = -2.0 * a * b * std::pow(dist2, b - 1.0) / (a * std::pow(dist2, b) + 1.0);
        for (int c = 0; c < dim; ++c) {
          const double g = clip(coeff * (y(j, c) - y(k, c)));
          y(j, c) += g * alpha;
          y(k, c) -= g * alpha;
        }
      }
      next_sample[e] += edges[e].epochs_per_sample;

      const int n_neg = std::max(0, static_cast<int>((epoch - next_negative[e]) / neg_interval[e]));
      for (int s = 0; s < n_neg; ++s) {
        const Index other = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
        if (other == j) continue;
        dist2 = (y.row(j) - y.row(other)).squaredNorm();
        double coeff = 0.0;
        if (dist2 > 0.0) coeff = 2.0 * b / ((0.001 + dist2) * (a * std::pow(dist2, b) + 1.0));
        for (int c = 0; c < dim; ++c) {
          const double g = coeff > 0.0 ? clip(coeff * (y(j, c) - y(other, c))) : 4.0;
          y(j, c) += g * alpha;
        }
      }
      next_negative[e] += n_neg * neg_interval[e];
    }
  }
  require(y.allFinite(), "umap: optimization diverged");
  out.coords = std::move(y);
  return out;
}

}  // namespace fnmr
