#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmes/assembly.hpp"
#include "fmes/dense.hpp"

namespace fmes {

struct EigenPair {
  double lambda1_bar = 0.0;  // eigenvalue of the reaction-free operator
  double lambda1 = 0.0;      // lambda1_bar + c
  Vector phi1;               // M-normalized, max entry positive
  double residual = 0.0;     // ||K_bar phi1 - lambda1_bar M phi1||_2
  std::size_t iterations = 0;
  std::vector<double> history;  // eigenvalue estimate after each iteration
};

struct InverseIterationOptions {
  double tolerance = 1e-13;
  std::size_t max_iterations = 50;
  /// Keep iterating at least this long even after the tolerance is met.
  std::size_t min_iterations = 0;
  double inner_tolerance = 1e-11;
  std::size_t inner_max_iterations = 20000;
};

class EigenError : public std::runtime_error {
 public:
  EigenError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Fundamental eigenpair of K_bar phi = lambda M phi by inverse iteration from
/// the all-ones vector, with M-weighted inner products in the eigenvalue
/// update lambda^{m+1} = (phi^m, phi^m) / (phi^{m+1}, phi^m).
EigenPair inverse_iteration(const FemSystem& sys, const InverseIterationOptions& options = {});

/// Full generalized eigen-decomposition of (K, M), M-orthonormal basis.
struct ModalBasis {
  std::vector<double> eigenvalues;  // ascending
  dense::Matrix eigenvectors;       // column k is phi_k
  dense::Matrix mass;

  std::size_t size() const { return eigenvalues.size(); }
  Vector mode(std::size_t k) const;
  /// (y, phi_k)_M for every k.
  Vector coefficients(std::span<const double> y) const;
  /// sum_k a_k phi_k
  Vector synthesize(std::span<const double> coefficients) const;
};

inline constexpr std::size_t default_dense_limit = 2500;

/// Throws std::length_error when the node count exceeds `dense_limit`.
ModalBasis modal_decompose(const FemSystem& sys, std::size_t dense_limit = default_dense_limit);

/// sum_k (w0, phi_k)_M exp(-lambda_k t) phi_k
Vector exact_semidiscrete_solution(const ModalBasis& basis, std::span<const double> w0, double t);

}  // namespace fmes
