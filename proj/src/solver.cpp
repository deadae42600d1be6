#include "fmes/solver.hpp"

#include <cmath>
#include <cstdio>

namespace fmes {

namespace {

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

Vector LinearOperator::operator()(std::span<const double> in) const {
  Vector out(dimension);
  apply(in, out);
  return out;
}

LinearOperator LinearOperator::from_matrix(const SparseMatrix& matrix) {
  return {matrix.dimension(),
          [&matrix](std::span<const double> in, std::span<double> out) { matrix.multiply(in, out); }};
}

Vector jacobi_inverse_diagonal(std::span<const double> diagonal) {
  Vector inv(diagonal.size());
  for (std::size_t i = 0; i < diagonal.size(); ++i) inv[i] = diagonal[i] > 0.0 ? 1.0 / diagonal[i] : 1.0;
  return inv;
}

SolveResult cg_solve(const LinearOperator& op, std::span<const double> rhs, const CgOptions& options,
                     std::span<const double> inverse_diagonal,
                     std::optional<std::span<const double>> initial_guess) {
  const std::size_t n = op.dimension;
  if (rhs.size() != n) throw std::invalid_argument("cg_solve: rhs dimension mismatch");
  if (!inverse_diagonal.empty() && inverse_diagonal.size() != n) {
    throw std::invalid_argument("cg_solve: preconditioner dimension mismatch");
  }
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("cg_solve: tolerance must be positive");

  SolveResult result;
  result.x.assign(n, 0.0);
  const double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0) {
    result.report.converged = true;
    return result;
  }

  Vector r(rhs.begin(), rhs.end());
  Vector ap(n);
  if (initial_guess) {
    if (initial_guess->size() != n) throw std::invalid_argument("cg_solve: initial guess dimension mismatch");
    result.x.assign(initial_guess->begin(), initial_guess->end());
    op.apply(result.x, ap);
    axpy(-1.0, ap, r);
  }

  auto precondition = [&](const Vector& in, Vector& out) {
    if (inverse_diagonal.empty()) {
      out = in;
    } else {
      for (std::size_t i = 0; i < n; ++i) out[i] = inverse_diagonal[i] * in[i];
    }
  };

  const double target = options.tolerance * rhs_norm;
  Vector z(n);
  precondition(r, z);
  Vector p = z;
  double rz = dot(r, z);
  std::size_t it = 0;

  auto true_residual = [&]() {
    op.apply(result.x, ap);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = rhs[i] - ap[i];
      s += d * d;
    }
    return std::sqrt(s);
  };

  // The recursive residual drifts from the true one near machine precision;
  // confirm against the true residual and restart from it when they disagree.
  for (int restart = 0;; ++restart) {
    while (norm2(r) > target && it < options.max_iterations) {
      op.apply(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      axpy(alpha, p, result.x);
      axpy(-alpha, ap, r);
      precondition(r, z);
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
      ++it;
    }
    const double residual = true_residual();
    result.report.iterations = it;
    result.report.relative_residual = residual / rhs_norm;
    result.report.converged = residual <= target;
    if (result.report.converged || it >= options.max_iterations || norm2(r) > target || restart >= 8) break;
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
    precondition(r, z);
    p = z;
    rz = dot(r, z);
    if (norm2(r) <= target) break;
  }

  if (!result.report.converged) {
    throw SolverError("cg_solve: no convergence after " + std::to_string(result.report.iterations) +
                          " iterations (relative residual " + format_sci(result.report.relative_residual) +
                          ")",
                      result.report);
  }
  return result;
}

SolveResult cg_solve(const SparseMatrix& matrix, std::span<const double> rhs, const CgOptions& options,
                     std::optional<std::span<const double>> initial_guess) {
  const Vector inv = jacobi_inverse_diagonal(matrix.diagonal_entries());
  return cg_solve(LinearOperator::from_matrix(matrix), rhs, options, inv, initial_guess);
}

SparseMatrix compose_shifted(const SparseMatrix& stiffness, const SparseMatrix& mass, double lambda1) {
  if (stiffness.dimension() != mass.dimension()) {
    throw std::invalid_argument("compose_shifted: dimension mismatch");
  }
  return linear_combination(1.0, stiffness, -lambda1, mass);
}

MassSolver::MassSolver(const SparseMatrix& mass, CgOptions options)
    : mass_(&mass), options_(options), diagonal_(mass.is_diagonal()) {
  inverse_diagonal_ = jacobi_inverse_diagonal(mass.diagonal_entries());
}

Vector MassSolver::solve(std::span<const double> rhs) const {
  if (rhs.size() != mass_->dimension()) throw std::invalid_argument("MassSolver: dimension mismatch");
  if (diagonal_) {
    Vector x(rhs.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) x[i] = rhs[i] * inverse_diagonal_[i];
    return x;
  }
  return cg_solve(LinearOperator::from_matrix(*mass_), rhs, options_, inverse_diagonal_).x;
}

}  // namespace fmes
