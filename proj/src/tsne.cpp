#include "fnmr/embed.hpp"

#include "fnmr/rng.hpp"

#include <cmath>
#include <limits>

namespace fnmr {

namespace tsne_detail {

namespace {

constexpr int kMaxBisection = 200;
constexpr double kEntropyTol = 1e-7;  // bits

struct RowState {
  Vector p;
  double entropy_bits;
};

// Probabilities are shifted by the row's minimum squared distance so that
// large distances cannot underflow the whole row.
RowState evaluate_row(const Matrix& d2, Index i, double beta) {
  const Index n = d2.rows();
  double dmin = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j)
    if (j != i) dmin = std::min(dmin, d2(i, j));
  RowState s;
  s.p.resize(n);
  double sum = 0.0;
  double weighted = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (j == i) {
      s.p(j) = 0.0;
      continue;
    }
    const double shifted = d2(i, j) - dmin;
    const double v = std::exp(-beta * shifted);
    s.p(j) = v;
    sum += v;
    weighted += shifted * v;
  }
  s.p /= sum;
  const double entropy_nats = std::log(sum) + beta * weighted / sum;
  s.entropy_bits = entropy_nats / std::log(2.0);
  return s;
}

}  // namespace

Vector conditional_row(const Matrix& d2, Index i, double beta) { return evaluate_row(d2, i, beta).p; }

Calibration calibrate(const DistanceMatrix& d, double perplexity) {
  const Index n = d.size();
  require(n >= 3, "tsne: need at least three points");
  require(perplexity > 0.0 && perplexity <= static_cast<double>(n - 1),
          "tsne: perplexity infeasible for n");
  const Matrix d2 = d.d.array().square().matrix();
  const double target = std::log2(perplexity);

  Calibration c;
  c.conditional.resize(n, n);
  c.beta.resize(n);
  c.entropy_bits.resize(n);
  for (Index i = 0; i < n; ++i) {
    double mean = 0.0;
    for (Index j = 0; j < n; ++j)
      if (j != i) mean += d2(i, j);
    mean /= static_cast<double>(n - 1);
    double beta = mean > 0.0 ? 1.0 / mean : 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool found = false;
    RowState s;
    for (int iter = 0; iter < kMaxBisection; ++iter) {
      s = evaluate_row(d2, i, beta);
      const double diff = s.entropy_bits - target;
      if (std::abs(diff) <= kEntropyTol) {
        found = true;
        break;
      }
      if (diff > 0.0) {  // too flat: sharpen
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    if (!found)
      throw Error("tsne: perplexity calibration did not converge for point " + std::to_string(i));
    c.conditional.row(i) = s.p.transpose();
    c.beta(i) = beta;
    c.entropy_bits(i) = s.entropy_bits;
    c.max_residual = std::max(c.max_residual, std::abs(s.entropy_bits - target));
  }
  return c;
}

Matrix symmetrize(const Matrix& conditional) {
  const double n = static_cast<double>(conditional.rows());
  return (conditional + conditional.transpose()) / (2.0 * n);
}

namespace {

// Student-t kernel 1/(1 + |y_i - y_j|^2) with zero diagonal.
Matrix student_kernel(const Matrix& y) {
  const Vector sq = y.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * y * y.transpose()).colwise() + sq;
  d2.rowwise() += sq.transpose();
  Matrix num = (1.0 + d2.array().max(0.0)).inverse().matrix();
  num.diagonal().setZero();
  return num;
}

}  // namespace

double kl_divergence(const Matrix& p, const Matrix& y) {
  const Matrix num = student_kernel(y);
  const double sum_q = num.sum();
  double kl = 0.0;
  for (Index j = 0; j < p.cols(); ++j) {
    for (Index i = 0; i < p.rows(); ++i) {
      if (i == j || p(i, j) <= 0.0) continue;
      const double q = num(i, j) / sum_q;
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  }
  return kl;
}

Matrix kl_gradient(const Matrix& p, const Matrix& y) {
  const Matrix num = student_kernel(y);
  const double sum_q = num.sum();
  const Matrix w = ((p - num / sum_q).array() * num.array()).matrix();
  const Vector row = w.rowwise().sum();
  return 4.0 * (row.asDiagonal() * y - w * y);
}

}  // namespace tsne_detail

Embedding tsne(const DistanceMatrix& d, const TsneParams& p, Seed seed) {
  const Index n = d.size();
  require(p.dims == 2 || p.dims == 3, "tsne: dims must be 2 or 3");
  require(p.perplexity >= 3.0 && 3.0 * p.perplexity <= static_cast<double>(n - 1),
          "tsne: perplexity infeasible for n (need 3 <= perplexity <= (n-1)/3)");
  require(p.max_iter >= 1, "tsne: max_iter must be positive");
  require(p.eta > 0.0, "tsne: eta must be positive");
  require(p.exaggeration > 0.0, "tsne: exaggeration must be positive");
  require(d.d.allFinite(), "tsne: non-finite distances");

  constexpr int kStopLying = 250;
  constexpr int kMomentumSwitch = 250;
  constexpr double kInitialMomentum = 0.5;
  constexpr double kFinalMomentum = 0.8;
  constexpr double kMinGain = 0.01;

  const tsne_detail::Calibration cal = tsne_detail::calibrate(d, p.perplexity);
  const Matrix pij = tsne_detail::symmetrize(cal.conditional);

  Rng rng(seed);
  Matrix y(n, p.dims);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < p.dims; ++c) y(i, c) = 1e-4 * rng.normal();

  Matrix update = Matrix::Zero(n, p.dims);
  Matrix gains = Matrix::Ones(n, p.dims);
  double momentum = kInitialMomentum;
  Matrix pcur = pij * p.exaggeration;
  for (int iter = 0; iter < p.max_iter; ++iter) {
    if (iter == kStopLying) pcur = pij;
    if (iter == kMomentumSwitch) momentum = kFinalMomentum;
    const Matrix grad = tsne_detail::kl_gradient(pcur, y);
    for (Index i = 0; i < n; ++i) {
      for (Index c = 0; c < p.dims; ++c) {
        const bool same_sign = (grad(i, c) > 0.0) == (update(i, c) > 0.0);
        gains(i, c) = std::max(kMinGain, same_sign ? gains(i, c) * 0.8 : gains(i, c) + 0.2);
        update(i, c) = momentum * update(i, c) - p.eta * gains(i, c) * grad(i, c);
        y(i, c) += update(i, c);
      }
    }
    y.rowwise() -= y.colwise().mean();
  }
  require(y.allFinite(), "tsne: optimization diverged");

  Embedding out;
  out.method = Method::tsne;
  out.coords = std::move(y);
  out.diagnostics["kl_divergence"] = tsne_detail::kl_divergence(pij, out.coords);
  out.diagnostics["max_entropy_residual"] = cal.max_residual;
  out.diagnostics["theta_advisory"] = p.theta;
  return out;
}

}  // namespace fnmr
