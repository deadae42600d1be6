#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fmes/solver.hpp"
#include "fmes/spectral.hpp"
#include "test_support.hpp"

using namespace fmes;
using fmes::testing::model_problem;
using fmes::testing::random_vector;

TEST_CASE("CSR construction sums duplicates and sorts columns") {
  const SparseMatrix a(3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {2, 1, -1.0}});
  CHECK(a.nonzeros() == 3);
  CHECK(a.at(0, 2) == 4.0);
  CHECK(a.at(0, 0) == 2.0);
  CHECK(a.at(1, 1) == 0.0);
  CHECK(a.at(2, 1) == -1.0);
  const Vector y = a * Vector{1.0, 2.0, 3.0};
  CHECK(y == Vector{14.0, 0.0, -2.0});
  CHECK_THROWS_AS(SparseMatrix(2, {{2, 0, 1.0}}), std::out_of_range);
}

TEST_CASE("linear_combination merges patterns") {
  const SparseMatrix a(2, {{0, 0, 1.0}, {0, 1, 2.0}});
  const SparseMatrix b(2, {{1, 1, 5.0}, {0, 1, 1.0}});
  const SparseMatrix c = linear_combination(2.0, a, -1.0, b);
  CHECK(c.at(0, 0) == 2.0);
  CHECK(c.at(0, 1) == 3.0);
  CHECK(c.at(1, 1) == -5.0);
  CHECK_THROWS_AS(linear_combination(1.0, a, 1.0, SparseMatrix::identity(3)), std::invalid_argument);
}

TEST_CASE("cg on the identity converges in one iteration") {
  const Vector b{1.0, -2.0, 3.5, 0.25};
  const auto result = cg_solve(SparseMatrix::identity(4), b, {1e-12, 10});
  CHECK(result.report.iterations == 1);
  CHECK(result.report.converged);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(result.x[i] == doctest::Approx(b[i]));
}

TEST_CASE("cg on diag(1..n) with a ones right-hand side") {
  const std::size_t n = 12;
  Vector d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = static_cast<double>(i + 1);
  const auto result = cg_solve(SparseMatrix::diagonal(d), Vector(n, 1.0), {1e-13, 100});
  for (std::size_t i = 0; i < n; ++i) CHECK(result.x[i] == doctest::Approx(1.0 / static_cast<double>(i + 1)).epsilon(1e-12));
}

TEST_CASE("unpreconditioned cg on diag(1..n) needs n iterations") {
  const std::size_t n = 8;
  Vector d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = static_cast<double>(i + 1);
  const SparseMatrix a = SparseMatrix::diagonal(d);
  const auto result = cg_solve(LinearOperator::from_matrix(a), Vector(n, 1.0), {1e-12, 100});
  CHECK(result.report.iterations <= n);
  for (std::size_t i = 0; i < n; ++i) CHECK(result.x[i] == doctest::Approx(1.0 / static_cast<double>(i + 1)));
}

TEST_CASE("mass solve recovers the ones vector") {
  const FemSystem sys = model_problem(6);
  const Vector rhs = sys.mass * Vector(sys.dimension(), 1.0);
  const auto result = cg_solve(sys.mass, rhs, {1e-12, 1000});
  CHECK(result.report.relative_residual <= 1e-12);
  for (double v : result.x) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

  const MassSolver solver(sys.mass, {1e-12, 1000});
  CHECK_FALSE(solver.exact());
  const Vector x = solver.solve(rhs);
  for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("non-convergence is an explicit failure carrying the report") {
  const FemSystem sys = model_problem(26);
  const Vector rhs(sys.dimension(), 1.0);
  try {
    cg_solve(sys.stiffness, rhs, {1e-10, 3});
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.report().iterations == 3);
    CHECK_FALSE(e.report().converged);
    CHECK(e.report().relative_residual > 1e-10);
  }
  CHECK_THROWS_AS(cg_solve(sys.stiffness, Vector(3, 1.0), {1e-10, 10}), std::invalid_argument);
}

TEST_CASE("converged solves honour the requested tolerance") {
  std::mt19937_64 rng(7);
  const FemSystem sys = model_problem(11);
  const SparseMatrix a = linear_combination(1.0, sys.mass, 0.01, sys.stiffness);
  for (double tol : {1e-6, 1e-8, 1e-10, 1e-12}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Vector b = random_vector(sys.dimension(), rng);
      const auto result = cg_solve(a, b, {tol, 1000});
      CHECK(result.report.converged);
      CHECK(result.report.relative_residual <= tol);
      Vector r = a * result.x;
      axpy(-1.0, b, r);
      CHECK(norm2(r) <= tol * norm2(b));
    }
  }
}

TEST_CASE("linear operators compose linearly") {
  std::mt19937_64 rng(3);
  const FemSystem sys = model_problem(6);
  const MassSolver mass_solver(sys.mass, {1e-13, 1000});
  const LinearOperator composite{sys.dimension(), [&](std::span<const double> in, std::span<double> out) {
                                   sys.stiffness.multiply(in, out);
                                   const Vector inner = mass_solver.solve(sys.stiffness * in);
                                   axpy(0.5, sys.stiffness * inner, out);
                                 }};
  const Vector u = random_vector(sys.dimension(), rng);
  const Vector v = random_vector(sys.dimension(), rng);
  Vector combo = u;
  scale(2.0, combo);
  axpy(-3.0, v, combo);
  const Vector lhs = composite(combo);
  Vector rhs = composite(u);
  scale(2.0, rhs);
  axpy(-3.0, composite(v), rhs);
  CHECK(norm2(lhs) > 0.0);
  Vector diff = lhs;
  axpy(-1.0, rhs, diff);
  CHECK(norm2(diff) <= 1e-9 * norm2(lhs));
}

TEST_CASE("compose_shifted examples") {
  const FemSystem sys = model_problem(6);
  const SparseMatrix same = compose_shifted(sys.stiffness, sys.mass, 0.0);
  for (std::size_t i = 0; i < sys.dimension(); ++i) {
    for (std::size_t j = 0; j < sys.dimension(); ++j) CHECK(same.at(i, j) == sys.stiffness.at(i, j));
  }

  const SparseMatrix scalar = compose_shifted(SparseMatrix(1, {{0, 0, 3.0}}), SparseMatrix(1, {{0, 0, 1.0}}), 3.0);
  CHECK(scalar.at(0, 0) == 0.0);

  CHECK_THROWS_AS(compose_shifted(sys.stiffness, SparseMatrix::identity(2), 1.0), std::invalid_argument);
}

TEST_CASE("shifted operator annihilates phi1 and is non-negative on its complement") {
  std::mt19937_64 rng(11);
  const FemSystem sys = model_problem(11);
  const EigenPair pair = inverse_iteration(sys);
  const SparseMatrix shifted = compose_shifted(sys.stiffness, sys.mass, pair.lambda1);
  CHECK(shifted.symmetry_defect() <= 1e-14 * shifted.max_abs());

  const Vector k_phi = shifted * pair.phi1;
  CHECK(norm2(k_phi) <= 10.0 * pair.residual + 1e-12);

  for (int trial = 0; trial < 100; ++trial) {
    Vector v = random_vector(sys.dimension(), rng);
    axpy(-m_inner(sys, v, pair.phi1), pair.phi1, v);
    CHECK(dot(v, shifted * v) >= -1e-8 * m_inner(sys, v, v));
  }
}
