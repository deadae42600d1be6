#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace fmes {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class Side { left, right, bottom, top };

std::string_view to_string(Side side);

using Triangle = std::array<std::size_t, 3>;

struct BoundaryEdge {
  std::array<std::size_t, 2> nodes;
  Side side;
};

/// Uniform right-triangle mesh of the unit square.
///
/// Nodes are numbered row-major (x fastest): node (i, j) has index
/// j * n_side + i and coordinates (i h, j h). Every grid cell is split by the
/// diagonal running from its lower-left to its upper-right corner; both
/// triangles are stored counter-clockwise.
struct Mesh {
  std::size_t n_side = 0;
  double h = 0.0;
  std::vector<Point> nodes;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary_edges;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t node_index(std::size_t i, std::size_t j) const { return j * n_side + i; }

  /// Signed area of triangle t (positive for counter-clockwise orientation).
  double signed_area(std::size_t t) const;
  Point centroid(std::size_t t) const;
};

/// Throws std::invalid_argument for n_side < 2.
Mesh build_mesh(std::size_t n_side);

}  // namespace fmes
