#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fetransform/assembly.hpp"
#include "fetransform/experiments.hpp"
#include "test_util.hpp"

using namespace fet;

TEST(Mesh, CountsN1) {
  const StructuredMesh m = build_mesh(1);
  EXPECT_EQ(m.cell_count(), 2u);
  EXPECT_EQ(m.vertex_count(), 4u);
  EXPECT_EQ(m.edge_count(), 5u);
}

TEST(Mesh, CountsN2) {
  const StructuredMesh m = build_mesh(2);
  EXPECT_EQ(m.cell_count(), 8u);
  EXPECT_EQ(m.vertex_count(), 9u);
  EXPECT_EQ(m.edge_count(), 16u);
}

TEST(Mesh, TotalAreaIsOneAndCellsCounterclockwise) {
  const StructuredMesh m = build_mesh(3);
  double area = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const double sa = m.cell_triangle(c).signed_area();
    EXPECT_GT(sa, 0.0);
    area += sa;
  }
  EXPECT_NEAR(area, 1.0, 1e-14);
}

TEST(Mesh, InteriorEdgesHaveTwoCells) {
  const StructuredMesh m = build_mesh(3);
  for (std::size_t e = 0; e < m.edge_count(); ++e) {
    const int n_cells = (m.edge_cells[e][0] >= 0) + (m.edge_cells[e][1] >= 0);
    EXPECT_EQ(n_cells, m.edge_on_boundary[e] ? 1 : 2);
  }
}

TEST(DofMap, EntityArithmetic) {
  {
    const StructuredMesh m = build_mesh(1);
    EXPECT_EQ(build_dofmap(ElementKind::CubicHermite, 3, m).ndofs, 14);  // 3*4 + 2
    EXPECT_EQ(build_dofmap(ElementKind::Morley, 2, m).ndofs, 9);         // 4 + 5
  }
  {
    const StructuredMesh m = build_mesh(2);
    EXPECT_EQ(build_dofmap(ElementKind::Argyris, 5, m).ndofs, 70);  // 6*9 + 16
    EXPECT_EQ(build_dofmap(ElementKind::Bell, 5, m).ndofs, 54);     // 6*9
    EXPECT_EQ(build_dofmap(ElementKind::Lagrange, 3, m).ndofs, 9 + 2 * 16 + 8);
  }
}

TEST(DofMap, EveryDofReferencedAndLocalMatchesComplete) {
  const StructuredMesh m = build_mesh(2);
  for (const ElementKind f : {ElementKind::Lagrange, ElementKind::CubicHermite,
                              ElementKind::Morley, ElementKind::Argyris, ElementKind::Bell}) {
    const DofMap dm = build_dofmap(f, f == ElementKind::Lagrange ? 3 : 5, m);
    std::vector<int> hit(std::size_t(dm.ndofs), 0);
    for (const auto& loc : dm.cell_dofs)
      for (long g : loc) {
        ASSERT_GE(g, 0);
        ASSERT_LT(g, dm.ndofs);
        ++hit[std::size_t(g)];
      }
    for (int h : hit) EXPECT_GE(h, 1);
  }
}

TEST(Assemble, GlobalMassIntegratesConstantOne) {
  const StructuredMesh m = build_mesh(2);
  const Space space(ElementKind::Lagrange, 3, m);
  const SparseMatrix mass = space.assemble_matrix(Form::mass());
  Vector ones(std::size_t(space.ndofs()), 1.0);  // interpolant of 1 for point DOFs
  const Vector mc = mass * ones;
  EXPECT_NEAR(dot(ones, mc), 1.0, 1e-12);
}

TEST(Assemble, MatrixIsSymmetric) {
  const StructuredMesh m = build_mesh(2);
  for (const ElementKind f :
       {ElementKind::CubicHermite, ElementKind::Morley, ElementKind::Argyris, ElementKind::Bell}) {
    const Space space(f, m);
    const SparseMatrix a = space.assemble_matrix(Form::mass());
    EXPECT_TRUE(a.structurally_symmetric());
    const DenseMatrix d = a.to_dense();
    EXPECT_LE(max_abs_diff(d, transpose(d)), 1e-12 * max_abs(d));
  }
}

TEST(Assemble, HermiteStiffnessAnnihilatesConstantInterpolant) {
  const StructuredMesh m = build_mesh(2);
  const Space space(ElementKind::CubicHermite, m);
  const SparseMatrix a = space.assemble_matrix(Form::stiffness());
  Vector c(std::size_t(space.ndofs()), 0.0);
  for (std::size_t g = 0; g < c.size(); ++g)
    if (space.dofs().info[g].kind == DofKind::Value) c[g] = 1.0;
  const Vector ac = a * c;
  for (double v : ac) EXPECT_NEAR(v, 0.0, 1e-11);
}

TEST(Continuity, AcrossSharedEdges) {
  const StructuredMesh m = build_mesh(2);
  std::mt19937 rng(131);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const ElementKind fam : {ElementKind::Lagrange, ElementKind::CubicHermite,
                                ElementKind::Morley, ElementKind::Argyris, ElementKind::Bell}) {
    const Space space(fam, m);
    Vector c(std::size_t(space.ndofs()));
    for (double& ci : c) ci = u(rng);
    for (std::size_t e = 0; e < m.edge_count(); ++e) {
      if (m.edge_on_boundary[e]) continue;
      const std::size_t c0 = std::size_t(m.edge_cells[e][0]);
      const std::size_t c1 = std::size_t(m.edge_cells[e][1]);
      const Vec2 a = m.vertices[std::size_t(m.edges[e][0])];
      const Vec2 b = m.vertices[std::size_t(m.edges[e][1])];
      if (fam == ElementKind::Argyris || fam == ElementKind::Bell) {
        for (int s = 1; s <= 5; ++s) {
          const Vec2 x = a + (b - a) * (double(s) / 6.0);
          EXPECT_NEAR(space.evaluate(c, c0, x), space.evaluate(c, c1, x), 1e-9);
          const Vec2 g0 = space.evaluate_gradient(c, c0, x);
          const Vec2 g1 = space.evaluate_gradient(c, c1, x);
          EXPECT_NEAR(g0.x, g1.x, 1e-9);
          EXPECT_NEAR(g0.y, g1.y, 1e-9);
        }
      } else if (fam == ElementKind::Morley) {
        // normal-derivative agreement at the midpoint, value at endpoints
        const Vec2 mid = (a + b) * 0.5;
        const Vec2 d = b - a;
        const Vec2 n{d.y / d.norm(), -d.x / d.norm()};
        const Vec2 g0 = space.evaluate_gradient(c, c0, mid);
        const Vec2 g1 = space.evaluate_gradient(c, c1, mid);
        EXPECT_NEAR(n.dot(g0), n.dot(g1), 1e-9);
        EXPECT_NEAR(space.evaluate(c, c0, a), space.evaluate(c, c1, a), 1e-9);
        EXPECT_NEAR(space.evaluate(c, c0, b), space.evaluate(c, c1, b), 1e-9);
      } else {
        for (int s = 1; s <= 5; ++s) {
          const Vec2 x = a + (b - a) * (double(s) / 6.0);
          EXPECT_NEAR(space.evaluate(c, c0, x), space.evaluate(c, c1, x), 1e-9);
        }
      }
    }
  }
}

TEST(Scaling, SameHAtSharedVerticesAndPositive) {
  const StructuredMesh m = build_mesh(3);
  const Space space(ElementKind::Argyris, m);
  const Vector s = build_scaling(space.dofs(), m);
  for (double v : s) EXPECT_GT(v, 0.0);
  // uniform mesh: every vertex h equals the cell diameter
  const double h = m.cell_triangle(0).diameter();
  for (std::size_t g = 0; g < s.size(); ++g) {
    const DofKind k = space.dofs().info[g].kind;
    if (k == DofKind::DerivX || k == DofKind::DerivY) EXPECT_NEAR(s[g], h, 1e-14);
    if (k == DofKind::DerivXX) EXPECT_NEAR(s[g], h * h, 1e-14);
  }
}

TEST(Scaling, PureCongruenceLeavesSolutionUnchanged) {
  const StructuredMesh m = build_mesh(2);
  const Space space(ElementKind::CubicHermite, m);
  const auto f = [](Vec2 p) { return std::sin(p.x + 2.0 * p.y); };
  SparseMatrix a1 = space.assemble_matrix(Form::mass());
  Vector b1 = space.assemble_load(f, 8);
  SparseMatrix a2 = a1;
  Vector b2 = b1;
  const Vector u1 = lu_solve(a1.to_dense(), b1);
  const Vector s = build_scaling(space.dofs(), m);
  scale_system(a2, b2, s);
  const Vector u2 = unscale_solution(lu_solve(a2.to_dense(), b2), s);
  for (std::size_t i = 0; i < u1.size(); ++i) EXPECT_NEAR(u1[i], u2[i], 1e-9);
}

namespace {

double patch_projection_error(ElementKind fam, const std::function<double(Vec2)>& p) {
  const StructuredMesh m = build_mesh(2);
  const Space space(fam, m);
  SparseMatrix a = space.assemble_matrix(Form::mass());
  Vector b = space.assemble_load(p, 2 * space.degree() + 2);
  const Vector s = build_scaling(space.dofs(), m);
  SparseMatrix a2 = a;
  Vector b2 = b;
  scale_system(a2, b2, s);
  const Vector u = unscale_solution(lu_solve(a2.to_dense(), b2), s);
  return space.l2_error(u, p, 2 * space.degree() + 2);
}

}  // namespace

TEST(PatchExactness, FullDegreePolynomialsProjectExactly) {
  EXPECT_LT(patch_projection_error(ElementKind::Lagrange,
                                   [](Vec2 p) { return 1.0 + p.x * p.x * p.x - 2.0 * p.y * p.x; }),
            1e-9);
  EXPECT_LT(patch_projection_error(ElementKind::CubicHermite,
                                   [](Vec2 p) { return p.x * p.x * p.x - p.y * p.y + 0.5; }),
            1e-9);
  EXPECT_LT(patch_projection_error(ElementKind::Morley,
                                   [](Vec2 p) { return p.x * p.x + p.x * p.y - p.y; }),
            1e-9);
  EXPECT_LT(patch_projection_error(ElementKind::Argyris,
                                   [](Vec2 p) {
                                     return std::pow(p.x, 5) - 2.0 * std::pow(p.y, 4) * p.x +
                                            p.x * p.y;
                                   }),
            1e-9);
  EXPECT_LT(patch_projection_error(ElementKind::Bell,
                                   [](Vec2 p) {
                                     return p.x * p.x * p.x + p.y * p.y * p.y - 0.25 * p.x;
                                   }),
            1e-9);
}

TEST(Dirichlet, HermiteBottomEdgeConstrainsValueAndTangential) {
  const StructuredMesh m = build_mesh(2);
  const Space space(ElementKind::CubicHermite, m);
  const auto mask = constrained_dofs(space.dofs(), m, BoundaryCondition::Dirichlet);
  // vertex (1/2, 0) is on the bottom edge, not a corner: global vertex id 1
  const long v = 1;
  EXPECT_TRUE(mask[std::size_t(3 * v + 0)]);   // value
  EXPECT_TRUE(mask[std::size_t(3 * v + 1)]);   // d/dx (tangential)
  EXPECT_FALSE(mask[std::size_t(3 * v + 2)]);  // d/dy stays free
  // corner (0,0): value and both first derivatives
  EXPECT_TRUE(mask[0]);
  EXPECT_TRUE(mask[1]);
  EXPECT_TRUE(mask[2]);
  // interior vertex (1/2, 1/2) = id 4: nothing constrained
  EXPECT_FALSE(mask[12]);
  EXPECT_FALSE(mask[13]);
  EXPECT_FALSE(mask[14]);
}

TEST(Dirichlet, ArgyrisLaplaceAndClampedSets) {
  const StructuredMesh m = build_mesh(2);
  const Space space(ElementKind::Argyris, m);
  const auto laplace = constrained_dofs(space.dofs(), m, BoundaryCondition::Dirichlet);
  const auto clamped = constrained_dofs(space.dofs(), m, BoundaryCondition::Clamped);
  // bottom-edge vertex id 1 (1/2, 0): order value, dx, dy, dxx, dxy, dyy
  const std::size_t base = 6;
  EXPECT_TRUE(laplace[base + 0]);
  EXPECT_TRUE(laplace[base + 1]);
  EXPECT_FALSE(laplace[base + 2]);
  EXPECT_TRUE(laplace[base + 3]);
  EXPECT_FALSE(laplace[base + 4]);
  EXPECT_FALSE(laplace[base + 5]);
  EXPECT_TRUE(clamped[base + 0]);
  EXPECT_TRUE(clamped[base + 1]);
  EXPECT_TRUE(clamped[base + 2]);
  EXPECT_TRUE(clamped[base + 3]);
  EXPECT_TRUE(clamped[base + 4]);
  EXPECT_FALSE(clamped[base + 5]);  // normal-normal second derivative free
  // corner (0,0): clamped constrains all six, laplace leaves dxy free
  for (std::size_t s = 0; s < 6; ++s) EXPECT_TRUE(clamped[s]);
  EXPECT_TRUE(laplace[0] && laplace[1] && laplace[2] && laplace[3] && laplace[5]);
  EXPECT_FALSE(laplace[4]);
  // edge normal DOFs: free for laplace, constrained for clamped (boundary)
  for (std::size_t g = 0; g < std::size_t(space.ndofs()); ++g) {
    if (space.dofs().info[g].kind != DofKind::EdgeNormal) continue;
    const bool onb = m.edge_on_boundary[std::size_t(space.dofs().info[g].entity_id)];
    EXPECT_FALSE(laplace[g]);
    EXPECT_EQ(bool(clamped[g]), onb);
  }
}

TEST(Dirichlet, SymmetricEliminationProducesUnitRows) {
  const StructuredMesh m = build_mesh(2);
  const Space space(ElementKind::Lagrange, 3, m);
  SparseMatrix a = space.assemble_matrix(Form::stiffness());
  Vector b(std::size_t(space.ndofs()), 1.0);
  const auto mask = constrained_dofs(space.dofs(), m, BoundaryCondition::Dirichlet);
  apply_dirichlet(a, b, mask);
  const DenseMatrix d = a.to_dense();
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (!mask[i]) continue;
    EXPECT_EQ(b[i], 0.0);
    for (std::size_t j = 0; j < d.cols(); ++j) {
      EXPECT_DOUBLE_EQ(d(i, j), i == j ? 1.0 : 0.0);
      EXPECT_DOUBLE_EQ(d(j, i), i == j ? 1.0 : 0.0);
    }
  }
}

TEST(Assemble, DeterministicAcrossRuns) {
  const StructuredMesh m = build_mesh(3);
  const Space space(ElementKind::Argyris, m);
  const SparseMatrix a1 = space.assemble_matrix(Form::stiffness());
  const SparseMatrix a2 = space.assemble_matrix(Form::stiffness());
  ASSERT_EQ(a1.nnz(), a2.nnz());
  for (std::size_t k = 0; k < a1.nnz(); ++k) EXPECT_EQ(a1.values()[k], a2.values()[k]);
}

TEST(Assemble, DegenerateCellPropagates) {
  StructuredMesh m = build_mesh(1);
  // collapse vertex 3 onto vertex 0: the upper cell (0, 3, 2) degenerates
  m.vertices[3] = m.vertices[2];
  const Space space(ElementKind::Morley, m);
  EXPECT_THROW(space.assemble_matrix(Form::mass()), DegenerateCell);
}

TEST(Solvers, CgRejectsIndefiniteSystem) {
  TripletBuilder t;
  t.add(0, 0, 1.0);
  t.add(1, 1, -1.0);
  const SparseMatrix a = t.compress(2, 2);
  EXPECT_THROW(cg_solve(a, {1.0, 1.0}), NotPositiveDefinite);
}
