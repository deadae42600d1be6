#include "fmes/mesh.hpp"

#include <stdexcept>
#include <string>

namespace fmes {

std::string_view to_string(Side side) {
  switch (side) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
  }
  return "unknown";
}

double Mesh::signed_area(std::size_t t) const {
  const auto& tri = triangles.at(t);
  const Point& a = nodes[tri[0]];
  const Point& b = nodes[tri[1]];
  const Point& c = nodes[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point Mesh::centroid(std::size_t t) const {
  const auto& tri = triangles.at(t);
  Point p;
  for (std::size_t v : tri) {
    p.x += nodes[v].x;
    p.y += nodes[v].y;
  }
  p.x /= 3.0;
  p.y /= 3.0;
  return p;
}

Mesh build_mesh(std::size_t n_side) {
  if (n_side < 2) {
    throw std::invalid_argument("build_mesh: n_side must be >= 2, got " + std::to_string(n_side));
  }

  Mesh mesh;
  mesh.n_side = n_side;
  const std::size_t cells = n_side - 1;
  mesh.h = 1.0 / static_cast<double>(cells);

  mesh.nodes.reserve(n_side * n_side);
  for (std::size_t j = 0; j < n_side; ++j) {
    for (std::size_t i = 0; i < n_side; ++i) {
      // Last row/column pinned to exactly 1 so boundary tests are exact.
      const double x = (i == cells) ? 1.0 : static_cast<double>(i) * mesh.h;
      const double y = (j == cells) ? 1.0 : static_cast<double>(j) * mesh.h;
      mesh.nodes.push_back({x, y});
    }
  }

  mesh.triangles.reserve(2 * cells * cells);
  for (std::size_t j = 0; j < cells; ++j) {
    for (std::size_t i = 0; i < cells; ++i) {
      const std::size_t ll = mesh.node_index(i, j);
      const std::size_t lr = mesh.node_index(i + 1, j);
      const std::size_t ul = mesh.node_index(i, j + 1);
      const std::size_t ur = mesh.node_index(i + 1, j + 1);
      mesh.triangles.push_back({ll, lr, ur});
      mesh.triangles.push_back({ll, ur, ul});
    }
  }

  mesh.boundary_edges.reserve(4 * cells);
  for (std::size_t i = 0; i < cells; ++i) {
    mesh.boundary_edges.push_back({{mesh.node_index(i, 0), mesh.node_index(i + 1, 0)}, Side::bottom});
    mesh.boundary_edges.push_back({{mesh.node_index(i, cells), mesh.node_index(i + 1, cells)}, Side::top});
  }
  for (std::size_t j = 0; j < cells; ++j) {
    mesh.boundary_edges.push_back({{mesh.node_index(0, j), mesh.node_index(0, j + 1)}, Side::left});
    mesh.boundary_edges.push_back({{mesh.node_index(cells, j), mesh.node_index(cells, j + 1)}, Side::right});
  }

  return mesh;
}

}  // namespace fmes
