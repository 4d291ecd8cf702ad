#include "fnmr/embed.hpp"

#include "fnmr/eigen_utils.hpp"

#include <cmath>
#include <limits>

namespace fnmr {

namespace {

Matrix gaussian_kernel(const DistanceMatrix& d, double eps_val) {
  require(eps_val > 0.0 && std::isfinite(eps_val), "diffusion_map: eps_val must be positive");
  require(d.d.allFinite(), "diffusion_map: non-finite distances");
  // Scalar exp so that underflow gives exact zeros.
  return d.d.unaryExpr([eps_val](double x) { return std::exp(-x * x / eps_val); });
}

}  // namespace

Matrix diffusion_operator(const DistanceMatrix& d, double eps_val) {
  const Matrix k = gaussian_kernel(d, eps_val);
  const Vector rows = k.rowwise().sum();
  return rows.cwiseInverse().asDiagonal() * k;
}

Embedding diffusion_map(const DistanceMatrix& d, double eps_val, int t, int neigen) {
  const Index n = d.size();
  require(n >= 3, "diffusion_map: need at least three points");
  require(t >= 0, "diffusion_map: t must be a nonnegative integer");
  require(neigen >= 1 && neigen <= n - 1, "diffusion_map: neigen must lie in [1, n-1]");

  const Matrix k = gaussian_kernel(d, eps_val);
  Embedding out;
  out.method = Method::diffmap;
  out.hyper.method = Method::diffmap;
  out.hyper.eps_val = eps_val;
  out.hyper.t = t;
  out.hyper.dim = neigen;

  double max_off = 0.0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (i != j) max_off = std::max(max_off, k(i, j));
  if (max_off < std::numeric_limits<double>::min()) out.warnings.push_back("degenerate kernel");

  // The symmetric conjugate Dg^{-1/2} K Dg^{-1/2} shares P's spectrum; its
  // eigenvectors v give P's right eigenvectors as Dg^{-1/2} v.
  const Vector dg = k.rowwise().sum();
  const Vector inv_sqrt = dg.cwiseSqrt().cwiseInverse();
  Matrix s = inv_sqrt.asDiagonal() * k * inv_sqrt.asDiagonal();
  s = 0.5 * (s + s.transpose());
  const SymmetricEigen eig = symmetric_eigen(s);

  // The leading eigenvector is sqrt(dg) up to scale; dividing by it makes
  // psi_0 the constant 1.
  const Vector lead = dg.cwiseSqrt().normalized();
  Matrix psi(n, neigen);
  for (int j = 0; j < neigen; ++j) psi.col(j) = eig.vectors.col(j + 1).cwiseQuotient(lead);
  fix_column_signs(psi);

  out.coords.resize(n, neigen);
  for (int j = 0; j < neigen; ++j) {
    const double lambda = eig.values(j + 1);
    out.coords.col(j) = std::pow(lambda, t) * psi.col(j);
  }
  for (int j = 0; j <= neigen; ++j) out.diagnostics["lambda_" + std::to_string(j)] = eig.values(j);
  return out;
}

}  // namespace fnmr
