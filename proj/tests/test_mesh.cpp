#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "fmes/mesh.hpp"

using namespace fmes;

TEST_CASE("build_mesh rejects fewer than two nodes per side") {
  CHECK_THROWS_AS(build_mesh(0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(1), std::invalid_argument);
}

TEST_CASE("single cell mesh") {
  const Mesh mesh = build_mesh(2);
  CHECK(mesh.node_count() == 4);
  CHECK(mesh.triangles.size() == 2);
  CHECK(mesh.boundary_edges.size() == 4);
  CHECK(mesh.h == 1.0);
}

TEST_CASE("counts for the coarsest table grid") {
  const Mesh mesh = build_mesh(26);
  CHECK(mesh.h == doctest::Approx(1.0 / 25.0).epsilon(1e-15));
  CHECK(mesh.node_count() == 676);
  CHECK(mesh.triangles.size() == 1250);
  CHECK(mesh.boundary_edges.size() == 100);
}

TEST_CASE("triangle areas on n_side = 3 are all 1/8") {
  const Mesh mesh = build_mesh(3);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) CHECK(mesh.signed_area(t) == doctest::Approx(0.125));
}

TEST_CASE("row-major numbering and lower-left to upper-right diagonal") {
  const Mesh mesh = build_mesh(4);
  CHECK(mesh.nodes[1].x == doctest::Approx(1.0 / 3.0));
  CHECK(mesh.nodes[1].y == 0.0);
  CHECK(mesh.nodes[4].x == 0.0);
  CHECK(mesh.nodes[4].y == doctest::Approx(1.0 / 3.0));
  // First cell: diagonal joins nodes 0 and 5.
  for (std::size_t t : {0u, 1u}) {
    const auto& tri = mesh.triangles[t];
    CHECK(std::count(tri.begin(), tri.end(), 0u) == 1);
    CHECK(std::count(tri.begin(), tri.end(), 5u) == 1);
  }
}

TEST_CASE("mesh invariants hold across sizes") {
  for (std::size_t n : {2u, 3u, 7u, 26u}) {
    CAPTURE(n);
    const Mesh mesh = build_mesh(n);
    const std::size_t cells = n - 1;
    CHECK(mesh.node_count() == n * n);
    CHECK(mesh.triangles.size() == 2 * cells * cells);
    CHECK(mesh.boundary_edges.size() == 4 * cells);

    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const double a = mesh.signed_area(t);
      CHECK(a == doctest::Approx(mesh.h * mesh.h / 2.0).epsilon(1e-12));
      total += a;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));

    for (const auto& edge : mesh.boundary_edges) {
      const Point& p = mesh.nodes[edge.nodes[0]];
      const Point& q = mesh.nodes[edge.nodes[1]];
      switch (edge.side) {
        case Side::left: CHECK((p.x == 0.0 && q.x == 0.0)); break;
        case Side::right: CHECK((p.x == 1.0 && q.x == 1.0)); break;
        case Side::bottom: CHECK((p.y == 0.0 && q.y == 0.0)); break;
        case Side::top: CHECK((p.y == 1.0 && q.y == 1.0)); break;
      }
    }
  }
}

TEST_CASE("interior nodes touch six triangles and edges are manifold") {
  const Mesh mesh = build_mesh(9);
  std::vector<int> incidence(mesh.node_count(), 0);
  std::map<std::pair<std::size_t, std::size_t>, int> edge_count;
  for (const auto& tri : mesh.triangles) {
    for (int a = 0; a < 3; ++a) {
      ++incidence[tri[a]];
      const std::size_t u = tri[a];
      const std::size_t v = tri[(a + 1) % 3];
      ++edge_count[{std::min(u, v), std::max(u, v)}];
    }
  }
  for (std::size_t j = 1; j + 1 < mesh.n_side; ++j) {
    for (std::size_t i = 1; i + 1 < mesh.n_side; ++i) CHECK(incidence[mesh.node_index(i, j)] == 6);
  }

  std::map<std::pair<std::size_t, std::size_t>, int> boundary;
  for (const auto& e : mesh.boundary_edges) {
    ++boundary[{std::min(e.nodes[0], e.nodes[1]), std::max(e.nodes[0], e.nodes[1])}];
  }
  for (const auto& [edge, count] : edge_count) {
    if (count == 1) {
      CHECK(boundary.count(edge) == 1);
    } else {
      CHECK(count == 2);
      CHECK(boundary.count(edge) == 0);
    }
  }
  for (const auto& [edge, count] : boundary) {
    CHECK(count == 1);
    CHECK(edge_count.at(edge) == 1);
  }
}
