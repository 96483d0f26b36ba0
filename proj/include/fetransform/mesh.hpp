#pragma once

#include <array>
#include <map>
#include <vector>

#include "fetransform/geometry.hpp"

namespace fet {

/// Structured N x N triangulation of the unit square; every square is split
/// along the lower-left to upper-right diagonal. Cells are counterclockwise;
/// within a square the lower cell is (a, b, c) and the upper cell (a, c, d)
/// in global vertex numbers.
struct StructuredMesh {
  int n = 0;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 2>> vertex_grid;       // lattice coordinates (i, j)
  std::vector<std::array<long, 3>> cells;            // global vertex ids, CCW
  std::vector<int> cell_kind;                        // 0 lower, 1 upper
  std::vector<std::array<long, 2>> edges;            // sorted endpoint ids
  std::vector<std::array<long, 3>> cell_edges;       // edge id opposite local vertex k
  std::vector<std::array<long, 2>> edge_cells;       // adjacent cells, -1 if none
  std::vector<char> edge_on_boundary;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t cell_count() const { return cells.size(); }
  std::size_t edge_count() const { return edges.size(); }

  Triangle cell_triangle(std::size_t c) const {
    const auto& ids = cells[c];
    Triangle t;
    for (int k = 0; k < 3; ++k) {
      t.v[k] = vertices[std::size_t(ids[k])];
      t.global[k] = ids[k];
    }
    return t;
  }

  double edge_length(std::size_t e) const {
    return (vertices[std::size_t(edges[e][1])] - vertices[std::size_t(edges[e][0])]).norm();
  }

  Vec2 edge_midpoint(std::size_t e) const {
    return (vertices[std::size_t(edges[e][0])] + vertices[std::size_t(edges[e][1])]) * 0.5;
  }
};

inline StructuredMesh build_mesh(int n) {
  StructuredMesh m;
  m.n = n;
  const auto vid = [n](int i, int j) { return long(j) * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      m.vertices.push_back({double(i) / n, double(j) / n});
      m.vertex_grid.push_back({i, j});
    }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const long a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      m.cells.push_back({a, b, c});
      m.cell_kind.push_back(0);
      m.cells.push_back({a, c, d});
      m.cell_kind.push_back(1);
    }
  std::map<std::array<long, 2>, long> edge_ids;
  m.cell_edges.resize(m.cells.size());
  for (std::size_t ci = 0; ci < m.cells.size(); ++ci) {
    for (int k = 0; k < 3; ++k) {
      long u = m.cells[ci][(k + 1) % 3], v = m.cells[ci][(k + 2) % 3];
      if (u > v) std::swap(u, v);
      const std::array<long, 2> key{u, v};
      auto it = edge_ids.find(key);
      if (it == edge_ids.end()) {
        it = edge_ids.emplace(key, long(m.edges.size())).first;
        m.edges.push_back(key);
        m.edge_cells.push_back({long(ci), -1});
      } else {
        m.edge_cells[std::size_t(it->second)][1] = long(ci);
      }
      m.cell_edges[ci][k] = it->second;
    }
  }
  m.edge_on_boundary.resize(m.edges.size());
  for (std::size_t e = 0; e < m.edges.size(); ++e)
    m.edge_on_boundary[e] = (m.edge_cells[e][1] < 0) ? 1 : 0;
  return m;
}

}  // namespace fet
