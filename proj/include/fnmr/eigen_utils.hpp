#pragma once

#include "fnmr/common.hpp"

namespace fnmr {

/// Eigenpairs of a symmetric matrix ordered by descending eigenvalue.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;  // column j pairs with values(j)
};

SymmetricEigen symmetric_eigen(const Matrix& a);

/// Flips each column so its largest-magnitude entry (first on ties) is positive.
void fix_column_signs(Matrix& m);

/// -1/2 J D^2 J with J = I - 11^T/n.
Matrix double_center_squared(const Matrix& d);

}  // namespace fnmr
