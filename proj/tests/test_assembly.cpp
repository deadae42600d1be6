#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fmes/assembly.hpp"
#include "test_support.hpp"

using namespace fmes;
using fmes::testing::random_vector;

namespace {

ProblemCoefficients unit_diffusion() {
  ProblemCoefficients c;
  c.k_inner = 1.0;
  c.k_outer = 1.0;
  c.c = 0.0;
  c.mu_right_top = 0.0;
  c.mu_left_bottom = 0.0;
  return c;
}

}  // namespace

TEST_CASE("coefficient validation") {
  ProblemCoefficients c;
  c.k_inner = 0.0;
  CHECK_THROWS_AS(assemble(build_mesh(3), c), std::invalid_argument);
  c = {};
  c.mu_left_bottom = -1.0;
  CHECK_THROWS_AS(assemble(build_mesh(3), c), std::invalid_argument);
}

TEST_CASE("diffusivity and boundary coefficient lookup") {
  const ProblemCoefficients c;
  CHECK(c.diffusivity({0.2, 0.3}) == 10.0);
  CHECK(c.diffusivity({0.6, 0.3}) == 1.0);
  CHECK(c.diffusivity({0.2, 0.7}) == 1.0);
  CHECK(c.robin(Side::right) == 10.0);
  CHECK(c.robin(Side::top) == 10.0);
  CHECK(c.robin(Side::left) == 0.0);
  CHECK(c.robin(Side::bottom) == 0.0);
}

TEST_CASE("pure Neumann stiffness has the constants in its null space") {
  for (std::size_t n : {2u, 5u, 26u}) {
    const FemSystem sys = assemble(build_mesh(n), unit_diffusion());
    const Vector k1 = sys.stiffness_bar * Vector(sys.dimension(), 1.0);
    for (double v : k1) CHECK(std::abs(v) <= 1e-12);
  }
  ProblemCoefficients jump = unit_diffusion();
  jump.k_inner = 10.0;
  const FemSystem sys = assemble(build_mesh(26), jump);
  for (double v : sys.stiffness_bar * Vector(sys.dimension(), 1.0)) CHECK(std::abs(v) <= 1e-11);
}

TEST_CASE("mass matrix integrates the domain area") {
  for (std::size_t n : {2u, 6u, 26u}) {
    const FemSystem sys = assemble(build_mesh(n), ProblemCoefficients{});
    const Vector ones(sys.dimension(), 1.0);
    CHECK(m_inner(sys, ones, ones) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m_inner(sys, ones, Vector(sys.dimension(), 0.0)) == 0.0);
  }
}

TEST_CASE("energy of the coordinate function x1") {
  // grad x1 = (1, 0); P1 interpolation of a linear function is exact.
  for (std::size_t n : {2u, 6u, 17u}) {
    const FemSystem sys = assemble(build_mesh(n), unit_diffusion());
    const Vector x = interpolate(sys.mesh, [](Point p) { return p.x; });
    CHECK(dot(x, sys.stiffness_bar * x) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Model coefficients on a mesh aligned with the k interface:
  // int k |grad x1|^2 = 10/4 + 3/4, right edge int mu x1^2 = 10, top edge = 10/3.
  const FemSystem sys = assemble(build_mesh(51), ProblemCoefficients{});
  const Vector x = interpolate(sys.mesh, [](Point p) { return p.x; });
  CHECK(dot(x, sys.stiffness_bar * x) == doctest::Approx(3.25 + 10.0 + 10.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("mass norm of sin(pi x1) converges to 1/2 at second order") {
  double previous = 0.0;
  for (std::size_t n : {11u, 21u, 41u}) {
    const FemSystem sys = assemble(build_mesh(n), ProblemCoefficients{});
    const Vector u = interpolate(sys.mesh, [](Point p) { return std::sin(std::numbers::pi * p.x); });
    const double m2 = m_inner(sys, u, u);
    const double err = std::abs(m2 - 0.5);
    CAPTURE(n);
    CHECK(err <= sys.mesh.h * sys.mesh.h);
    if (previous > 0.0) CHECK(previous / err == doctest::Approx(4.0).epsilon(0.05));
    previous = err;
  }
}

TEST_CASE("m_inner rejects mismatched vectors") {
  const FemSystem sys = assemble(build_mesh(3), ProblemCoefficients{});
  CHECK_THROWS_AS(m_inner(sys, Vector(9, 1.0), Vector(8, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(m_norm(sys, Vector(4, 1.0)), std::invalid_argument);
}

TEST_CASE("assembled matrices are symmetric and definite") {
  std::mt19937_64 rng(5);
  ProblemCoefficients coeffs;
  coeffs.c = 10.0;
  const FemSystem sys = assemble(build_mesh(26), coeffs);
  for (const SparseMatrix* a : {&sys.mass, &sys.stiffness_bar, &sys.stiffness}) {
    CHECK(a->symmetry_defect() <= 1e-14 * a->max_abs());
  }
  double min_mass = 1e300;
  double min_stiff = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = random_vector(sys.dimension(), rng);
    min_mass = std::min(min_mass, dot(x, sys.mass * x) / dot(x, x));
    min_stiff = std::min(min_stiff, dot(x, sys.stiffness_bar * x) / dot(x, x));
  }
  CHECK(min_mass > 0.0);
  CHECK(min_stiff > 0.0);
}

TEST_CASE("reaction term adds c times the mass matrix") {
  ProblemCoefficients coeffs;
  coeffs.c = 30.0;
  const FemSystem sys = assemble(build_mesh(6), coeffs);
  const SparseMatrix expected = linear_combination(1.0, sys.stiffness_bar, 30.0, sys.mass);
  for (std::size_t i = 0; i < sys.dimension(); ++i) {
    for (std::size_t j = 0; j < sys.dimension(); ++j) CHECK(sys.stiffness.at(i, j) == expected.at(i, j));
  }
}

TEST_CASE("doubling the diffusivity doubles the stiffness") {
  ProblemCoefficients base = ProblemCoefficients{};
  base.mu_right_top = 0.0;
  ProblemCoefficients twice = base;
  twice.k_inner *= 2.0;
  twice.k_outer *= 2.0;
  const FemSystem a = assemble(build_mesh(9), base);
  const FemSystem b = assemble(build_mesh(9), twice);
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    for (std::size_t j = 0; j < a.dimension(); ++j) {
      CHECK(b.stiffness_bar.at(i, j) == doctest::Approx(2.0 * a.stiffness_bar.at(i, j)).epsilon(1e-14));
    }
  }
}

TEST_CASE("lumped mass is the diagonal of row sums") {
  const FemSystem consistent = assemble(build_mesh(6), ProblemCoefficients{});
  const FemSystem lumped = assemble(build_mesh(6), ProblemCoefficients{}, MassMode::lumped);
  CHECK(lumped.mass.is_diagonal());
  const Vector sums = consistent.mass.row_sums();
  for (std::size_t i = 0; i < sums.size(); ++i) CHECK(lumped.mass.at(i, i) == doctest::Approx(sums[i]));
  const Vector ones(lumped.dimension(), 1.0);
  CHECK(m_inner(lumped, ones, ones) == doctest::Approx(1.0));
}
