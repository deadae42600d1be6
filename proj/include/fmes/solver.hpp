#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "fmes/sparse.hpp"

namespace fmes {

/// Linear map on R^n given by its action. May wrap a sparse matrix or a
/// composite such as v -> K v + K M^{-1} K v.
struct LinearOperator {
  std::size_t dimension = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;

  Vector operator()(std::span<const double> in) const;

  static LinearOperator from_matrix(const SparseMatrix& matrix);
};

struct SolveReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

struct CgOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 10000;
};

struct SolveResult {
  Vector x;
  SolveReport report;
};

/// Raised when an iterative method fails to meet its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SolveReport report)
      : std::runtime_error(what), report_(report) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Preconditioned conjugate gradients for a symmetric positive definite
/// operator. `inverse_diagonal`, when given, supplies a Jacobi preconditioner.
/// The reported residual is the true residual ||b - A x|| / ||b|| of the
/// returned iterate. Throws SolverError if it exceeds the tolerance.
SolveResult cg_solve(const LinearOperator& op, std::span<const double> rhs, const CgOptions& options,
                     std::span<const double> inverse_diagonal = {},
                     std::optional<std::span<const double>> initial_guess = std::nullopt);

/// Convenience overload with Jacobi preconditioning from the matrix diagonal.
SolveResult cg_solve(const SparseMatrix& matrix, std::span<const double> rhs, const CgOptions& options,
                     std::optional<std::span<const double>> initial_guess = std::nullopt);

/// Reciprocals of the diagonal, falling back to 1 where an entry is not positive.
Vector jacobi_inverse_diagonal(std::span<const double> diagonal);

/// K - lambda1 * M.
SparseMatrix compose_shifted(const SparseMatrix& stiffness, const SparseMatrix& mass, double lambda1);

/// Solves M x = b. A diagonal M is inverted exactly; otherwise CG is used.
class MassSolver {
 public:
  MassSolver(const SparseMatrix& mass, CgOptions options);

  Vector solve(std::span<const double> rhs) const;
  bool exact() const { return diagonal_; }

 private:
  const SparseMatrix* mass_;
  CgOptions options_;
  bool diagonal_;
  Vector inverse_diagonal_;
};

}  // namespace fmes
