#pragma once

#include <cstddef>
#include <vector>

#include "tabula/error.hpp"

namespace tabula {

/// Dense real matrix, row-major doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), v_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const {
    return v_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return v_[i * cols_ + j];
  }

  const std::vector<double>& values() const noexcept { return v_; }
  bool all_finite() const noexcept;
  double max_abs() const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> v_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// Thin SVD A = U diag(S) Vt with r = min(rows, cols) columns. Singular
/// values are non-increasing and non-negative; U (m x r) and V (n x r)
/// have orthonormal columns. The sign of each pair is normalized so the
/// largest-magnitude entry of the U column is positive.
struct SvdResult {
  Matrix u;
  std::vector<double> s;
  Matrix vt;  // r x n
};

/// One-sided Jacobi SVD (cyclic sweeps). Converges when every off-diagonal
/// column dot product is at most 1e-12 times the product of the column
/// norms; gives up after 60 sweeps with a NumericError reporting the
/// tolerance reached. Non-finite input raises DomainError.
SvdResult svd(const Matrix& a);

}  // namespace tabula
