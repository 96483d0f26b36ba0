#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fetransform/dofmap.hpp"
#include "fetransform/mesh.hpp"
#include "fetransform/tabulate.hpp"

namespace fet {

struct DegenerateCell : std::runtime_error {
  explicit DegenerateCell(const std::string& what) : std::runtime_error(what) {}
};

inline FiniteElementDef element_for(ElementKind family, int degree) {
  switch (family) {
    case ElementKind::Lagrange: return lagrange(degree);
    case ElementKind::CubicHermite: return cubic_hermite();
    case ElementKind::Morley: return morley();
    case ElementKind::Argyris: return argyris();
    case ElementKind::Bell: return bell();
    case ElementKind::BellExtended: return bell_extended();
  }
  throw std::logic_error("element_for: unknown family");
}

/// A finite element family instantiated over a structured mesh: dof map,
/// reference machinery and per-cell transforms, plus assembly and error
/// evaluation. The structured mesh has only two cell shapes, so transforms
/// and local tabulations are cached per shape kind.
class Space {
public:
  Space(ElementKind family, int degree, const StructuredMesh& mesh)
      : mesh_(&mesh), ops_(make_element_ops(element_for(family, degree))),
        dofs_(build_dofmap(family, degree, mesh)) {}

  Space(ElementKind family, const StructuredMesh& mesh)
      : Space(family, family == ElementKind::Lagrange ? 3 : default_degree(family), mesh) {}

  const DofMap& dofs() const { return dofs_; }
  const StructuredMesh& mesh() const { return *mesh_; }
  const ElementOps& ops() const { return ops_; }
  int degree() const { return ops_.def.degree; }
  long ndofs() const { return dofs_.ndofs; }

  int default_quadrature_degree(const Form& form) const {
    const int d = degree();
    switch (form.kind) {
      case Form::Kind::Mass: return 2 * d;
      case Form::Kind::Stiffness: return 2 * (d - 1);
      case Form::Kind::Plate: return 2 * (d - 2);
    }
    return 2 * d;
  }

  SparseMatrix assemble_matrix(const Form& form, int quad_degree = -1) const {
    if (quad_degree < 0) quad_degree = default_quadrature_degree(form);
    const QuadratureRule rule = triangle_rule(quad_degree);
    const BasisTable table = tabulate_reference(ops_.nodal, rule);
    // two congruence classes of cells; local matrices are identical within one
    std::vector<std::unique_ptr<DenseMatrix>> cached(2);
    TripletBuilder trips;
    trips.reserve(mesh_->cell_count() * ops_.active * ops_.active);
    for (std::size_t c = 0; c < mesh_->cell_count(); ++c) {
      const int kind = mesh_->cell_kind[c];
      if (!cached[std::size_t(kind)]) {
        try {
          cached[std::size_t(kind)] = std::make_unique<DenseMatrix>(
              local_matrix(ops_, mesh_->cell_triangle(c), form, rule, &table));
        } catch (const DegenerateTriangle& e) {
          throw DegenerateCell("cell " + std::to_string(c) + ": " + e.what());
        }
      }
      const DenseMatrix& a = *cached[std::size_t(kind)];
      const std::vector<long>& ld = dofs_.cell_dofs[c];
      for (std::size_t i = 0; i < ops_.active; ++i)
        for (std::size_t j = 0; j < ops_.active; ++j)
          trips.add(std::size_t(ld[i]), std::size_t(ld[j]), a(i, j));
    }
    SparseMatrix m = trips.compress(std::size_t(dofs_.ndofs), std::size_t(dofs_.ndofs));
    m.verify_structural_symmetry();
    return m;
  }

  Vector assemble_load(const std::function<double(Vec2)>& f, int quad_degree) const {
    const QuadratureRule rule = triangle_rule(quad_degree);
    const BasisTable table = tabulate_reference(ops_.nodal, rule, 0);
    Vector rhs(std::size_t(dofs_.ndofs), 0.0);
    std::vector<std::unique_ptr<DenseMatrix>> pushed(2);
    for (std::size_t c = 0; c < mesh_->cell_count(); ++c) {
      const Triangle tri = mesh_->cell_triangle(c);
      try {
        tri.validate();
      } catch (const DegenerateTriangle& e) {
        throw DegenerateCell("cell " + std::to_string(c) + ": " + e.what());
      }
      const AffineMap map = map_to_reference(tri);
      const int kind = mesh_->cell_kind[c];
      if (!pushed[std::size_t(kind)])
        pushed[std::size_t(kind)] =
            std::make_unique<DenseMatrix>(push_values(ops_.transform(tri).M, table));
      const DenseMatrix& v = *pushed[std::size_t(kind)];
      const double scale = 1.0 / std::abs(map.det());
      const std::vector<long>& ld = dofs_.cell_dofs[c];
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 x = map.apply_inverse(rule.points[q]);
        const double wf = rule.weights[q] * scale * f(x);
        for (std::size_t i = 0; i < ops_.active; ++i) rhs[std::size_t(ld[i])] += wf * v(i, q);
      }
    }
    return rhs;
  }

  double l2_error(const Vector& coeffs, const std::function<double(Vec2)>& exact,
                  int quad_degree) const {
    const QuadratureRule rule = triangle_rule(quad_degree);
    const BasisTable table = tabulate_reference(ops_.nodal, rule, 0);
    std::vector<std::unique_ptr<DenseMatrix>> pushed(2);
    double err2 = 0.0;
    for (std::size_t c = 0; c < mesh_->cell_count(); ++c) {
      const Triangle tri = mesh_->cell_triangle(c);
      const AffineMap map = map_to_reference(tri);
      const int kind = mesh_->cell_kind[c];
      if (!pushed[std::size_t(kind)])
        pushed[std::size_t(kind)] =
            std::make_unique<DenseMatrix>(push_values(ops_.transform(tri).M, table));
      const DenseMatrix& v = *pushed[std::size_t(kind)];
      const double scale = 1.0 / std::abs(map.det());
      const std::vector<long>& ld = dofs_.cell_dofs[c];
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        double uh = 0.0;
        for (std::size_t i = 0; i < ops_.active; ++i)
          uh += coeffs[std::size_t(ld[i])] * v(i, q);
        const Vec2 x = map.apply_inverse(rule.points[q]);
        const double d = uh - exact(x);
        err2 += rule.weights[q] * scale * d * d;
      }
    }
    return std::sqrt(err2);
  }

  /// Point evaluation of a global function on one cell (used by the
  /// inter-element continuity probes).
  double evaluate(const Vector& coeffs, std::size_t cell, Vec2 x) const {
    return pulled_back(coeffs, cell).value(x);
  }

  Vec2 evaluate_gradient(const Vector& coeffs, std::size_t cell, Vec2 x) const {
    return pulled_back(coeffs, cell).gradient(x);
  }

  PulledBackExpansion pulled_back(const Vector& coeffs, std::size_t cell) const {
    const Triangle tri = mesh_->cell_triangle(cell);
    const AffineMap map = map_to_reference(tri);
    const TransformMatrix tm = ops_.transform(tri);
    const std::vector<long>& ld = dofs_.cell_dofs[cell];
    Vector local(ops_.tab_def.nu(), 0.0);
    for (std::size_t i = 0; i < ops_.active; ++i) local[i] = coeffs[std::size_t(ld[i])];
    // reference coefficients of the pulled-back expansion: V c = M^T c
    Vector ref_coeffs = transform_coefficients(tm.V(), local);
    return PulledBackExpansion(ops_.nodal, map, std::move(ref_coeffs));
  }

private:
  static int default_degree(ElementKind family) {
    switch (family) {
      case ElementKind::CubicHermite: return 3;
      case ElementKind::Morley: return 2;
      default: return 5;
    }
  }

  const StructuredMesh* mesh_;
  ElementOps ops_;
  DofMap dofs_;
};

/// Symmetric elimination of constrained DOFs: zero rows and columns, unit
/// diagonal, zero right-hand side.
inline void apply_dirichlet(SparseMatrix& a, Vector& b,
                            const std::vector<std::uint8_t>& constrained) {
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_ind();
  auto& vals = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const bool ri = constrained[i];
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const std::size_t j = ci[k];
      if (ri || constrained[j]) vals[k] = (i == j) ? 1.0 : 0.0;
    }
    if (ri) b[i] = 0.0;
  }
}

/// Congruence rescaling of a system for node scales s (values 1, first
/// derivatives h, ...). Scaling the nodes by s makes the basis functions
/// scale by 1/s, so the matrix transforms with D = diag(1/s):
/// solve (D A D) y = D b, then recover u = D y.
inline void scale_system(SparseMatrix& a, Vector& b, const Vector& node_scale) {
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_ind();
  auto& vals = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double di = 1.0 / node_scale[i];
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) vals[k] *= di / node_scale[ci[k]];
    b[i] *= di;
  }
}

inline Vector unscale_solution(const Vector& y, const Vector& node_scale) {
  Vector u(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) u[i] = y[i] / node_scale[i];
  return u;
}

}  // namespace fet
