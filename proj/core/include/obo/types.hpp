#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

#include "obo/errors.hpp"

namespace obo {

// Dense real vector. Every vector crossing a public API boundary is expected
// to be finite; require_finite() enforces this where values enter the library.
using Vector = Eigen::VectorXd;

// Dense real matrix, Eigen's default column-major storage. Matrix-valued
// decision variables are never handed to optimizers directly; they are
// flattened with flatten_row_major() first.
using Matrix = Eigen::MatrixXd;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_finite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) throw NumericalError(std::string(what) + ": non-finite entry");
}

inline void require_dim(const Vector& v, Eigen::Index dim, std::string_view what) {
  if (v.size() != dim) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(dim) +
                         ", got " + std::to_string(v.size()));
  }
}

// Row-major flattening: x[i * cols + j] == m(i, j).
inline Vector flatten_row_major(const Matrix& m) {
  Vector out(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  return out;
}

inline Matrix unflatten_row_major(const Vector& x, Eigen::Index rows, Eigen::Index cols) {
  require_dim(x, rows * cols, "unflatten_row_major");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = x[i * cols + j];
  return m;
}

}  // namespace obo
