#include "fmes/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fmes {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

SparseMatrix::SparseMatrix(std::size_t dimension, std::vector<Triplet> triplets) : dimension_(dimension) {
  for (const auto& t : triplets) {
    if (t.row >= dimension || t.col >= dimension) {
      throw std::out_of_range("SparseMatrix: triplet index outside dimension");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  row_offsets_.assign(dimension + 1, 0);
  columns_.reserve(triplets.size());
  values_.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size();) {
    const std::size_t r = triplets[k].row;
    const std::size_t c = triplets[k].col;
    double sum = 0.0;
    for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k) sum += triplets[k].value;
    columns_.push_back(c);
    values_.push_back(sum);
    ++row_offsets_[r + 1];
  }
  for (std::size_t r = 0; r < dimension; ++r) row_offsets_[r + 1] += row_offsets_[r];
}

SparseMatrix SparseMatrix::identity(std::size_t dimension) {
  return diagonal(Vector(dimension, 1.0));
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> values) {
  std::vector<Triplet> t;
  t.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) t.push_back({i, i, values[i]});
  return SparseMatrix(values.size(), std::move(t));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= dimension_ || j >= dimension_) throw std::out_of_range("SparseMatrix::at");
  const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - columns_.begin())];
}

Vector SparseMatrix::diagonal_entries() const {
  Vector d(dimension_, 0.0);
  for (std::size_t i = 0; i < dimension_; ++i) d[i] = at(i, i);
  return d;
}

Vector SparseMatrix::row_sums() const {
  Vector s(dimension_, 0.0);
  for (std::size_t i = 0; i < dimension_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) s[i] += values_[k];
  }
  return s;
}

bool SparseMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < dimension_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (columns_[k] != i && values_[k] != 0.0) return false;
    }
  }
  return true;
}

void SparseMatrix::multiply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dimension_ || out.size() != dimension_) {
    throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
  }
  for (std::size_t i = 0; i < dimension_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) s += values_[k] * in[columns_[k]];
    out[i] = s;
  }
}

Vector SparseMatrix::operator*(std::span<const double> in) const {
  Vector out(dimension_);
  multiply(in, out);
  return out;
}

double SparseMatrix::symmetry_defect() const {
  double defect = 0.0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      defect = std::max(defect, std::abs(values_[k] - at(columns_[k], i)));
    }
  }
  return defect;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (std::size_t i = 0; i < dimension_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) t.push_back({i, columns_[k], values_[k]});
  }
  return t;
}

SparseMatrix linear_combination(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("linear_combination: dimension mismatch");
  }
  auto t = a.triplets();
  for (auto& e : t) e.value *= alpha;
  for (auto e : b.triplets()) {
    e.value *= beta;
    t.push_back(e);
  }
  return SparseMatrix(a.dimension(), std::move(t));
}

}  // namespace fmes
