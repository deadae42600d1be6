#include "fmes/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fmes::dense {

Matrix Matrix::from_sparse(const SparseMatrix& a) {
  Matrix m(a.dimension());
  const auto offsets = a.row_offsets();
  const auto cols = a.columns();
  const auto vals = a.values();
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) m(i, cols[k]) = vals[k];
  }
  return m;
}

Matrix cholesky(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw std::domain_error("cholesky: matrix is not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

namespace {

// Householder tridiagonalization. On exit z holds the accumulated orthogonal
// transform, d the diagonal and e the sub-diagonal (e[0] unused).
void tridiagonalize(Matrix& z, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = z.size();
  for (std::size_t j = 0; j < n; ++j) d[j] = z(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale_sum = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale_sum += std::abs(d[k]);
    if (scale_sum == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = z(i - 1, j);
        z(i, j) = 0.0;
        z(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale_sum;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale_sum * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        z(j, i) = f;
        g = e[j] + z(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += z(k, j) * d[k];
          e[k] += z(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k) z(k, j) -= (f * e[k] + g * d[k]);
        d[j] = z(i - 1, j);
        z(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    z(n - 1, i) = z(i, i);
    z(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = z(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += z(k, i + 1) * z(k, j);
        for (std::size_t k = 0; k <= i; ++k) z(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) z(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = z(n - 1, j);
    z(n - 1, j) = 0.0;
  }
  z(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL with Wilkinson-type shifts on the tridiagonal (d, e).
void tridiagonal_ql(Matrix& z, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = z.size();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m == n) m = n - 1;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 60) throw std::runtime_error("symmetric_eigen: QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          const std::size_t i = ii;
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (std::size_t k = 0; k < n; ++k) {
            h = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * h;
            z(k, i) = c * z(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix& a) {
  const std::size_t n = a.size();
  SymmetricEigen result;
  if (n == 0) return result;

  Matrix z = a;
  std::vector<double> d(n);
  std::vector<double> e(n);
  if (n == 1) {
    result.values = {a(0, 0)};
    result.vectors = Matrix(1);
    result.vectors(0, 0) = 1.0;
    return result;
  }
  tridiagonalize(z, d, e);
  tridiagonal_ql(z, d, e);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
  result.values.resize(n);
  result.vectors = Matrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    result.values[k] = d[order[k]];
    for (std::size_t i = 0; i < n; ++i) result.vectors(i, k) = z(i, order[k]);
  }
  return result;
}

}  // namespace fmes::dense
