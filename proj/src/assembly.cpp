#include "fmes/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace fmes {

void ProblemCoefficients::validate() const {
  if (!(k_inner > 0.0) || !(k_outer > 0.0)) throw std::invalid_argument("diffusivity must be positive");
  if (!(mu_right_top >= 0.0) || !(mu_left_bottom >= 0.0)) {
    throw std::invalid_argument("boundary coefficients must be non-negative");
  }
  if (!std::isfinite(c)) throw std::invalid_argument("reaction coefficient must be finite");
}

double ProblemCoefficients::diffusivity(Point p) const {
  return (p.x < 0.5 && p.y < 0.5) ? k_inner : k_outer;
}

double ProblemCoefficients::robin(Side side) const {
  return (side == Side::right || side == Side::top) ? mu_right_top : mu_left_bottom;
}

FemSystem assemble(Mesh mesh, const ProblemCoefficients& coeffs, MassMode mass_mode) {
  coeffs.validate();
  const std::size_t n = mesh.node_count();

  std::vector<Triplet> mass;
  std::vector<Triplet> stiff;
  mass.reserve(9 * mesh.triangles.size());
  stiff.reserve(9 * mesh.triangles.size() + 4 * mesh.boundary_edges.size());

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const double area = mesh.signed_area(t);
    if (!(area > 0.0)) throw std::invalid_argument("assemble: degenerate or inverted triangle");
    const double k = coeffs.diffusivity(mesh.centroid(t));

    // grad phi_a = (b_a, c_a) / (2 area)
    double b[3];
    double c[3];
    for (int a = 0; a < 3; ++a) {
      const Point& pj = mesh.nodes[tri[(a + 1) % 3]];
      const Point& pk = mesh.nodes[tri[(a + 2) % 3]];
      b[a] = pj.y - pk.y;
      c[a] = pk.x - pj.x;
    }
    for (int a = 0; a < 3; ++a) {
      for (int e = 0; e < 3; ++e) {
        stiff.push_back({tri[a], tri[e], k * (b[a] * b[e] + c[a] * c[e]) / (4.0 * area)});
        mass.push_back({tri[a], tri[e], area / 12.0 * (a == e ? 2.0 : 1.0)});
      }
    }
  }

  for (const BoundaryEdge& edge : mesh.boundary_edges) {
    const double mu = coeffs.robin(edge.side);
    if (mu == 0.0) continue;
    const Point& p = mesh.nodes[edge.nodes[0]];
    const Point& q = mesh.nodes[edge.nodes[1]];
    const double length = std::hypot(q.x - p.x, q.y - p.y);
    for (int a = 0; a < 2; ++a) {
      for (int e = 0; e < 2; ++e) {
        stiff.push_back({edge.nodes[a], edge.nodes[e], mu * length / 6.0 * (a == e ? 2.0 : 1.0)});
      }
    }
  }

  FemSystem sys;
  sys.coeffs = coeffs;
  sys.mass_mode = mass_mode;
  sys.mass = SparseMatrix(n, std::move(mass));
  if (mass_mode == MassMode::lumped) sys.mass = SparseMatrix::diagonal(sys.mass.row_sums());
  sys.stiffness_bar = SparseMatrix(n, std::move(stiff));
  sys.stiffness = coeffs.c == 0.0 ? sys.stiffness_bar : linear_combination(1.0, sys.stiffness_bar, coeffs.c, sys.mass);
  sys.mesh = std::move(mesh);
  return sys;
}

double m_inner(const FemSystem& sys, std::span<const double> u, std::span<const double> v) {
  if (u.size() != sys.dimension() || v.size() != sys.dimension()) {
    throw std::invalid_argument("m_inner: vector length does not match node count");
  }
  return dot(u, sys.mass * v);
}

double m_norm(const FemSystem& sys, std::span<const double> u) { return std::sqrt(m_inner(sys, u, u)); }

Vector interpolate(const Mesh& mesh, const std::function<double(Point)>& f) {
  Vector v(mesh.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(mesh.nodes[i]);
  return v;
}

}  // namespace fmes
