#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fmes {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Square sparse matrix in compressed-row storage. Column indices are sorted
/// within each row; duplicate triplets are summed on construction.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t dimension, std::vector<Triplet> triplets);

  static SparseMatrix identity(std::size_t dimension);
  static SparseMatrix diagonal(std::span<const double> values);

  std::size_t dimension() const { return dimension_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::size_t> columns() const { return columns_; }
  std::span<const double> values() const { return values_; }

  /// Entry (i, j), zero when structurally absent.
  double at(std::size_t i, std::size_t j) const;
  Vector diagonal_entries() const;
  Vector row_sums() const;
  bool is_diagonal() const;

  /// out = A * in
  void multiply(std::span<const double> in, std::span<double> out) const;
  Vector operator*(std::span<const double> in) const;

  /// max |A_ij - A_ji| over all stored entries.
  double symmetry_defect() const;
  double max_abs() const;

  std::vector<Triplet> triplets() const;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> columns_;
  std::vector<double> values_;
};

/// alpha * A + beta * B on the union sparsity pattern.
SparseMatrix linear_combination(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b);

}  // namespace fmes
