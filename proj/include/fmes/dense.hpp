#pragma once

#include <cstddef>
#include <vector>

#include "fmes/sparse.hpp"

namespace fmes::dense {

/// Row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static Matrix from_sparse(const SparseMatrix& a);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Lower-triangular L with A = L L^T. Throws std::domain_error if A is not
/// (numerically) positive definite.
Matrix cholesky(const Matrix& a);

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k is the eigenvector of values[k]
};

/// Eigen-decomposition of a symmetric matrix by Householder reduction to
/// tridiagonal form followed by the implicit QL algorithm.
SymmetricEigen symmetric_eigen(const Matrix& a);

}  // namespace fmes::dense
