#include "fnmr/eigen_utils.hpp"

#include <Eigen/Eigenvalues>

namespace fnmr {

SymmetricEigen symmetric_eigen(const Matrix& a) {
  require(a.rows() == a.cols(), "symmetric_eigen: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  require(solver.info() == Eigen::Success, "symmetric_eigen: decomposition failed");
  SymmetricEigen out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

void fix_column_signs(Matrix& m) {
  for (Index c = 0; c < m.cols(); ++c) {
    Index best = 0;
    double mag = -1.0;
    for (Index r = 0; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > mag) {
        mag = std::abs(m(r, c));
        best = r;
      }
    }
    if (m.rows() > 0 && m(best, c) < 0.0) m.col(c) *= -1.0;
  }
}

Matrix double_center_squared(const Matrix& d) {
  const Matrix sq = d.array().square().matrix();
  const Vector row_mean = sq.rowwise().mean();
  const Vector col_mean = sq.colwise().mean().transpose();
  const double grand = sq.mean();
  Matrix b(sq.rows(), sq.cols());
  for (Index j = 0; j < sq.cols(); ++j)
    for (Index i = 0; i < sq.rows(); ++i)
      b(i, j) = -0.5 * (sq(i, j) - row_mean(i) - col_mean(j) + grand);
  // Symmetrize away rounding so the eigensolver sees an exactly symmetric input.
  return 0.5 * (b + b.transpose());
}

}  // namespace fnmr
