#include "fmes/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "fmes/solver.hpp"

namespace fmes {

EigenPair inverse_iteration(const FemSystem& sys, const InverseIterationOptions& options) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("inverse_iteration: tolerance must be positive");
  const std::size_t n = sys.dimension();
  const SparseMatrix& k_bar = sys.stiffness_bar;
  const SparseMatrix& mass = sys.mass;
  const CgOptions inner{options.inner_tolerance, options.inner_max_iterations};

  EigenPair pair;
  Vector phi(n, 1.0);
  scale(1.0 / m_norm(sys, phi), phi);

  double lambda = 0.0;
  bool converged = false;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const Vector m_phi = mass * phi;
    Vector next;
    try {
      next = cg_solve(k_bar, m_phi, inner).x;
    } catch (const SolverError& e) {
      throw EigenError(std::string("inverse_iteration: inner solve failed (operator singular?): ") + e.what(),
                       pair.history);
    }
    const double denom = dot(next, m_phi);
    if (!(denom > 0.0)) {
      throw EigenError("inverse_iteration: operator is not positive definite", pair.history);
    }
    const double lambda_next = dot(phi, m_phi) / denom;
    pair.history.push_back(lambda_next);

    scale(1.0 / m_norm(sys, next), next);
    phi = std::move(next);
    const bool small_change = it > 1 && std::abs(lambda_next - lambda) <= options.tolerance * std::abs(lambda_next);
    lambda = lambda_next;
    if (small_change) converged = true;
    if (converged && it >= options.min_iterations) break;
  }
  if (!converged) {
    throw EigenError("inverse_iteration: no convergence in " + std::to_string(options.max_iterations) + " iterations",
                     pair.history);
  }

  if (*std::max_element(phi.begin(), phi.end()) < -*std::min_element(phi.begin(), phi.end())) scale(-1.0, phi);

  pair.lambda1_bar = lambda;
  pair.lambda1 = lambda + sys.coeffs.c;
  pair.iterations = pair.history.size();
  Vector r = k_bar * phi;
  axpy(-lambda, mass * phi, r);
  pair.residual = norm2(r);
  pair.phi1 = std::move(phi);
  return pair;
}

Vector ModalBasis::mode(std::size_t k) const {
  Vector v(size());
  for (std::size_t i = 0; i < size(); ++i) v[i] = eigenvectors(i, k);
  return v;
}

Vector ModalBasis::coefficients(std::span<const double> y) const {
  const std::size_t n = size();
  if (y.size() != n) throw std::invalid_argument("ModalBasis::coefficients: dimension mismatch");
  Vector my(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) my[i] += mass(i, j) * y[j];
  }
  Vector a(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) a[k] += eigenvectors(i, k) * my[i];
  }
  return a;
}

Vector ModalBasis::synthesize(std::span<const double> coefficients) const {
  const std::size_t n = size();
  if (coefficients.size() != n) throw std::invalid_argument("ModalBasis::synthesize: dimension mismatch");
  Vector y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) y[i] += eigenvectors(i, k) * coefficients[k];
  }
  return y;
}

ModalBasis modal_decompose(const FemSystem& sys, std::size_t dense_limit) {
  const std::size_t n = sys.dimension();
  if (n > dense_limit) {
    throw std::length_error("modal_decompose: " + std::to_string(n) + " unknowns exceed dense limit " +
                            std::to_string(dense_limit));
  }
  ModalBasis basis;
  basis.mass = dense::Matrix::from_sparse(sys.mass);
  const dense::Matrix stiffness = dense::Matrix::from_sparse(sys.stiffness);
  const dense::Matrix l = dense::cholesky(basis.mass);

  // C = L^{-1} K L^{-T}, formed as X = L^{-1} K then C = L^{-1} X^T.
  auto forward_columns = [&](const dense::Matrix& b) {
    dense::Matrix x(n);
    for (std::size_t col = 0; col < n; ++col) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = b(i, col);
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, col);
        x(i, col) = s / l(i, i);
      }
    }
    return x;
  };
  const dense::Matrix x = forward_columns(stiffness);
  dense::Matrix xt(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) xt(i, j) = x(j, i);
  }
  dense::Matrix c = forward_columns(xt);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = avg;
      c(j, i) = avg;
    }
  }

  dense::SymmetricEigen eig = dense::symmetric_eigen(c);
  basis.eigenvalues = std::move(eig.values);

  // phi = L^{-T} q
  basis.eigenvectors = dense::Matrix(n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = eig.vectors(ii, col);
      for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * basis.eigenvectors(k, col);
      basis.eigenvectors(ii, col) = s / l(ii, ii);
    }
    double max_entry = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(basis.eigenvectors(i, col)) > std::abs(max_entry)) max_entry = basis.eigenvectors(i, col);
    }
    if (max_entry < 0.0) {
      for (std::size_t i = 0; i < n; ++i) basis.eigenvectors(i, col) = -basis.eigenvectors(i, col);
    }
  }
  return basis;
}

Vector exact_semidiscrete_solution(const ModalBasis& basis, std::span<const double> w0, double t) {
  if (t < 0.0) throw std::invalid_argument("exact_semidiscrete_solution: t must be non-negative");
  Vector a = basis.coefficients(w0);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= std::exp(-basis.eigenvalues[k] * t);
  return basis.synthesize(a);
}

}  // namespace fmes
