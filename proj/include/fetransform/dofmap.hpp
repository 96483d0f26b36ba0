#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fetransform/mesh.hpp"
#include "fetransform/reference_element.hpp"

namespace fet {

enum class DofKind : std::uint8_t {
  Value,       // point value at a vertex (or cell point)
  DerivX,
  DerivY,
  DerivXX,
  DerivXY,
  DerivYY,
  EdgeNormal,  // normal derivative at an edge midpoint (Morley, Argyris)
  Point,       // Lagrange point value on an edge or cell interior
};

struct DofInfo {
  DofKind kind = DofKind::Value;
  Vec2 anchor{};
  int entity_dim = 0;   // 0 vertex, 1 edge, 2 cell
  long entity_id = 0;
};

/// Global numbering per family. Vertex blocks come first (grouped per
/// vertex), then edge DOFs, then cell DOFs.
struct DofMap {
  ElementKind family = ElementKind::Lagrange;
  int degree = 1;
  long ndofs = 0;
  std::vector<std::vector<long>> cell_dofs;  // local node -> global dof
  std::vector<DofInfo> info;
};

namespace detail {

inline int vertex_block_size(ElementKind family) {
  switch (family) {
    case ElementKind::Lagrange: return 1;
    case ElementKind::CubicHermite: return 3;
    case ElementKind::Morley: return 1;
    case ElementKind::Argyris:
    case ElementKind::Bell:
    case ElementKind::BellExtended: return 6;
  }
  return 1;
}

inline DofKind vertex_dof_kind(int slot) {
  switch (slot) {
    case 0: return DofKind::Value;
    case 1: return DofKind::DerivX;
    case 2: return DofKind::DerivY;
    case 3: return DofKind::DerivXX;
    case 4: return DofKind::DerivXY;
    default: return DofKind::DerivYY;
  }
}

}  // namespace detail

inline DofMap build_dofmap(ElementKind family, int degree, const StructuredMesh& mesh) {
  DofMap dm;
  dm.family = family;
  dm.degree = degree;
  const long nv = long(mesh.vertex_count());
  const long ne = long(mesh.edge_count());
  const int vb = detail::vertex_block_size(family);

  for (long v = 0; v < nv; ++v)
    for (int s = 0; s < vb; ++s)
      dm.info.push_back({family == ElementKind::Lagrange ? DofKind::Point
                                                         : detail::vertex_dof_kind(s),
                         mesh.vertices[std::size_t(v)], 0, v});
  const long edge_base = nv * vb;
  int per_edge = 0;
  if (family == ElementKind::Lagrange) per_edge = degree - 1;
  if (family == ElementKind::Morley || family == ElementKind::Argyris) per_edge = 1;
  for (long e = 0; e < ne; ++e)
    for (int s = 0; s < per_edge; ++s) {
      const Vec2 a = mesh.vertices[std::size_t(mesh.edges[std::size_t(e)][0])];
      const Vec2 b = mesh.vertices[std::size_t(mesh.edges[std::size_t(e)][1])];
      if (family == ElementKind::Lagrange)
        dm.info.push_back({DofKind::Point, a + (b - a) * (double(s + 1) / degree), 1, e});
      else
        dm.info.push_back({DofKind::EdgeNormal, (a + b) * 0.5, 1, e});
    }
  const long cell_base = edge_base + ne * per_edge;
  int per_cell = 0;
  if (family == ElementKind::Lagrange) per_cell = (degree - 1) * (degree - 2) / 2;
  if (family == ElementKind::CubicHermite) per_cell = 1;
  for (long c = 0; c < long(mesh.cell_count()); ++c)
    for (int s = 0; s < per_cell; ++s) {
      const Triangle t = mesh.cell_triangle(std::size_t(c));
      // cubic Lagrange and Hermite both use the barycenter as the cell point
      dm.info.push_back({family == ElementKind::Lagrange ? DofKind::Point : DofKind::Value,
                         t.barycenter(), 2, c});
    }
  dm.ndofs = cell_base + long(mesh.cell_count()) * per_cell;

  // local node -> global dof, following each element's node ordering
  dm.cell_dofs.resize(mesh.cell_count());
  for (std::size_t ci = 0; ci < mesh.cell_count(); ++ci) {
    const Triangle tri = mesh.cell_triangle(ci);
    std::vector<long>& loc = dm.cell_dofs[ci];
    switch (family) {
      case ElementKind::Lagrange: {
        for (int k = 0; k < 3; ++k) loc.push_back(tri.global[k]);
        for (int i = 0; i < 3; ++i) {
          const int a = (i + 1) % 3, b = (i + 2) % 3;
          const long e = mesh.cell_edges[ci][i];
          const Vec2 ga = mesh.vertices[std::size_t(mesh.edges[std::size_t(e)][0])];
          const Vec2 gb = mesh.vertices[std::size_t(mesh.edges[std::size_t(e)][1])];
          for (int k = 1; k < degree; ++k) {
            // match the local lattice point to the tangent-ordered global one
            const Vec2 p = tri.v[a] + (tri.v[b] - tri.v[a]) * (double(k) / degree);
            long match = -1;
            for (int s = 0; s < degree - 1; ++s) {
              const Vec2 q = ga + (gb - ga) * (double(s + 1) / degree);
              if ((p - q).norm() < 1e-12) {
                match = edge_base + e * (degree - 1) + s;
                break;
              }
            }
            loc.push_back(match);
          }
        }
        const int interior = (degree - 1) * (degree - 2) / 2;
        for (int s = 0; s < interior; ++s) loc.push_back(cell_base + long(ci) * interior + s);
        break;
      }
      case ElementKind::CubicHermite: {
        for (int k = 0; k < 3; ++k)
          for (int s = 0; s < 3; ++s) loc.push_back(3 * tri.global[k] + s);
        loc.push_back(cell_base + long(ci));
        break;
      }
      case ElementKind::Morley: {
        for (int k = 0; k < 3; ++k) loc.push_back(tri.global[k]);
        for (int i = 0; i < 3; ++i) loc.push_back(edge_base + mesh.cell_edges[ci][i]);
        break;
      }
      case ElementKind::Argyris: {
        for (int k = 0; k < 3; ++k)
          for (int s = 0; s < 6; ++s) loc.push_back(6 * tri.global[k] + s);
        for (int i = 0; i < 3; ++i) loc.push_back(edge_base + mesh.cell_edges[ci][i]);
        break;
      }
      case ElementKind::Bell:
      case ElementKind::BellExtended: {
        for (int k = 0; k < 3; ++k)
          for (int s = 0; s < 6; ++s) loc.push_back(6 * tri.global[k] + s);
        break;
      }
    }
  }
  return dm;
}

/// Per-DOF scale: 1 for values, the effective vertex h for first
/// derivatives, h^2 for second derivatives, and the edge length for edge
/// normal derivatives. h at a vertex is the average diameter of the cells
/// sharing it, so neighboring cells agree on it by construction.
inline Vector build_scaling(const DofMap& dm, const StructuredMesh& mesh) {
  std::vector<double> hv(mesh.vertex_count(), 0.0);
  std::vector<int> count(mesh.vertex_count(), 0);
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const double d = mesh.cell_triangle(c).diameter();
    for (long v : mesh.cells[c]) {
      hv[std::size_t(v)] += d;
      ++count[std::size_t(v)];
    }
  }
  for (std::size_t v = 0; v < hv.size(); ++v) hv[v] /= double(count[v]);
  Vector s(std::size_t(dm.ndofs), 1.0);
  for (std::size_t g = 0; g < s.size(); ++g) {
    const DofInfo& d = dm.info[g];
    switch (d.kind) {
      case DofKind::DerivX:
      case DofKind::DerivY:
        s[g] = hv[std::size_t(d.entity_id)];
        break;
      case DofKind::DerivXX:
      case DofKind::DerivXY:
      case DofKind::DerivYY:
        s[g] = hv[std::size_t(d.entity_id)] * hv[std::size_t(d.entity_id)];
        break;
      case DofKind::EdgeNormal:
        s[g] = mesh.edge_length(std::size_t(d.entity_id));
        break;
      default:
        break;
    }
  }
  return s;
}

enum class BoundaryCondition {
  None,
  Dirichlet,  // u = 0 on the boundary
  Clamped,    // u = 0 and du/dn = 0 on the boundary
};

/// Constrained-DOF mask for homogeneous conditions on the unit square. On a
/// straight boundary edge u = 0 forces the value, the tangential first
/// derivative and the tangential-tangential second derivative; du/dn = 0
/// additionally forces the normal first derivative and the mixed
/// tangent-normal second derivative plus any edge normal-derivative DOFs.
inline std::vector<std::uint8_t> constrained_dofs(const DofMap& dm, const StructuredMesh& mesh,
                                                  BoundaryCondition bc) {
  std::vector<std::uint8_t> mask(std::size_t(dm.ndofs), 0);
  if (bc == BoundaryCondition::None) return mask;
  const double eps = 1e-12;
  auto on_vertical = [&](Vec2 p) { return p.x < eps || p.x > 1.0 - eps; };
  auto on_horizontal = [&](Vec2 p) { return p.y < eps || p.y > 1.0 - eps; };
  for (std::size_t g = 0; g < mask.size(); ++g) {
    const DofInfo& d = dm.info[g];
    if (d.kind == DofKind::EdgeNormal) {
      mask[g] = (bc == BoundaryCondition::Clamped &&
                 mesh.edge_on_boundary[std::size_t(d.entity_id)])
                    ? 1
                    : 0;
      continue;
    }
    const Vec2 p = d.anchor;
    const bool xb = on_vertical(p), yb = on_horizontal(p);
    if (!xb && !yb) continue;
    const bool corner = xb && yb;
    bool constrain = false;
    switch (d.kind) {
      case DofKind::Point:
      case DofKind::Value:
        constrain = true;
        break;
      case DofKind::DerivX:
        constrain = (bc == BoundaryCondition::Clamped) || yb;
        break;
      case DofKind::DerivY:
        constrain = (bc == BoundaryCondition::Clamped) || xb;
        break;
      case DofKind::DerivXX:
        constrain = corner || yb;  // tangential-tangential on horizontal edges
        break;
      case DofKind::DerivYY:
        constrain = corner || xb;
        break;
      case DofKind::DerivXY:
        // u = 0 alone never forces u_xy, not even where two edges meet
        constrain = (bc == BoundaryCondition::Clamped);
        break;
      case DofKind::EdgeNormal:
        break;  // handled above through the edge flag
    }
    mask[g] = constrain ? 1 : 0;
  }
  return mask;
}

}  // namespace fet
