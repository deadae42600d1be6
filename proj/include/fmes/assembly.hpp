#pragma once

#include <functional>
#include <span>

#include "fmes/mesh.hpp"
#include "fmes/sparse.hpp"

namespace fmes {

/// Coefficients of -div(k grad u) + c u with Robin condition k du/dn + mu u = 0.
/// k takes `k_inner` on the lower-left quarter [0, 1/2)^2 and `k_outer` elsewhere.
struct ProblemCoefficients {
  double k_inner = 10.0;
  double k_outer = 1.0;
  double c = 0.0;
  double mu_right_top = 10.0;
  double mu_left_bottom = 0.0;

  void validate() const;
  double diffusivity(Point p) const;
  double robin(Side side) const;
};

enum class MassMode { consistent, lumped };

struct FemSystem {
  Mesh mesh;
  SparseMatrix mass;
  SparseMatrix stiffness_bar;  // diffusion + boundary term, no reaction
  SparseMatrix stiffness;      // stiffness_bar + c * mass
  ProblemCoefficients coeffs;
  MassMode mass_mode = MassMode::consistent;

  std::size_t dimension() const { return mass.dimension(); }
};

FemSystem assemble(Mesh mesh, const ProblemCoefficients& coeffs, MassMode mass_mode = MassMode::consistent);

/// u^T M v
double m_inner(const FemSystem& sys, std::span<const double> u, std::span<const double> v);
double m_norm(const FemSystem& sys, std::span<const double> u);

/// Nodal interpolant of f.
Vector interpolate(const Mesh& mesh, const std::function<double(Point)>& f);

}  // namespace fmes
