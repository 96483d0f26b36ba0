#include <gtest/gtest.h>

#include <random>

#include "fetransform/tabulate.hpp"
#include "test_util.hpp"

using namespace fet;

namespace {

double rel_diff(const DenseMatrix& a, const DenseMatrix& b) {
  return max_abs_diff(a, b) / std::max(max_abs(b), 1e-300);
}

}  // namespace

TEST(TabulateReference, LagrangeLinearValuesAtVerticesAreIdentity) {
  const NodalBasis nb = build_nodal_basis(lagrange(1));
  const std::vector<Vec2> pts{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  const BasisTable t = tabulate_reference(nb, pts, 0);
  EXPECT_LE(max_abs_diff(t.values, DenseMatrix::identity(3)), 1e-12);
}

TEST(TabulateReference, LagrangeColumnSumsAreOne) {
  const NodalBasis nb = build_nodal_basis(lagrange(3));
  const QuadratureRule rule = triangle_rule(6);
  const BasisTable t = tabulate_reference(nb, rule);
  for (std::size_t q = 0; q < t.points(); ++q) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.nu(); ++i) s += t.values(i, q);
    EXPECT_NEAR(s, 1.0, 1e-10);
  }
}

TEST(TabulateReference, HermiteMatchesDirectPolynomialEvaluation) {
  const NodalBasis nb = build_nodal_basis(cubic_hermite());
  const std::vector<Vec2> pts{{0.2, 0.3}, {0.5, 0.1}, {0.1, 0.7}};
  const BasisTable t = tabulate_reference(nb, pts);
  for (std::size_t i = 0; i < 10; ++i) {
    const PrimeExpansion psi(nb.basis, std::span<const double>(nb.coefficients.row(i), 10));
    for (std::size_t q = 0; q < pts.size(); ++q) {
      EXPECT_NEAR(t.values(i, q), psi.value(pts[q]), 1e-12);
      const Vec2 g = psi.gradient(pts[q]);
      EXPECT_NEAR(t.grad_x(i, q), g.x, 1e-12);
      EXPECT_NEAR(t.grad_y(i, q), g.y, 1e-12);
      const std::array<double, 3> h = psi.hessian(pts[q]);
      EXPECT_NEAR(t.d_xx(i, q), h[0], 1e-11);
      EXPECT_NEAR(t.d_xy(i, q), h[1], 1e-11);
      EXPECT_NEAR(t.d_yy(i, q), h[2], 1e-11);
    }
  }
}

TEST(PushValues, IdentityLeavesTableUnchanged) {
  const NodalBasis nb = build_nodal_basis(morley());
  const QuadratureRule rule = triangle_rule(4);
  const BasisTable t = tabulate_reference(nb, rule);
  EXPECT_LE(max_abs_diff(push_values(DenseMatrix::identity(6), t), t.values), 0.0);
}

TEST(PushValues, HermiteScalingMapHalvesDerivativeFunctions) {
  // physical cell at half size: J = 2I, so derivative-node functions are
  // the pulled-back reference ones scaled by 1/2
  Triangle k;
  k.v = {Vec2{0.0, 0.0}, Vec2{0.5, 0.0}, Vec2{0.0, 0.5}};
  const ElementOps ops = make_element_ops(cubic_hermite());
  const QuadratureRule rule = triangle_rule(6);
  const BasisTable t = tabulate_reference(ops.nodal, rule);
  const DenseMatrix pushed = push_values(ops.transform(k).M, t);
  for (std::size_t q = 0; q < t.points(); ++q) {
    EXPECT_NEAR(pushed(1, q), 0.5 * t.values(1, q), 1e-12);
    EXPECT_NEAR(pushed(0, q), t.values(0, q), 1e-12);
  }
}

TEST(PushValues, PhysicalNodeKroneckerByPointEvaluation) {
  // value nodes of the physical Hermite element hit the pushed values table
  std::mt19937 rng(61);
  const Triangle k = testutil::random_triangle(rng);
  const AffineMap map = map_to_reference(k);
  const ElementOps ops = make_element_ops(cubic_hermite());
  // tabulate at the reference images of the physical vertices
  const std::vector<Vec2> ref_pts{map.apply(k.v[0]), map.apply(k.v[1]), map.apply(k.v[2]),
                                  map.apply(k.barycenter())};
  const BasisTable t = tabulate_reference(ops.nodal, ref_pts, 0);
  const DenseMatrix pushed = push_values(ops.transform(k).M, t);
  const std::array<std::size_t, 4> value_rows{0, 3, 6, 9};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      EXPECT_NEAR(pushed(value_rows[a], b), a == b ? 1.0 : 0.0, 1e-10);
}

TEST(PushGradients, PulledBackBilinearMatchesComposition) {
  // gradient of F*(x_hat y_hat) against the analytic gradient of the
  // composition on a fixed triangle
  Triangle k;
  k.v = {Vec2{0.1, 0.2}, Vec2{1.3, 0.4}, Vec2{0.5, 1.1}};
  const AffineMap map = map_to_reference(k);
  const NodalBasis nb = build_nodal_basis(lagrange(2));
  // expansion of x_hat * y_hat in the quadratic nodal basis: interpolate
  Vector c(6);
  const FiniteElementDef el2 = lagrange(2);
  for (std::size_t i = 0; i < 6; ++i) {
    const Vec2 p = el2.nodes[i].point;
    c[i] = p.x * p.y;
  }
  const PulledBackExpansion u(nb, map, c);
  std::mt19937 rng(67);
  std::uniform_real_distribution<double> t01(0.05, 0.9);
  for (int rep = 0; rep < 5; ++rep) {
    double a = t01(rng), b = t01(rng);
    if (a + b > 0.95) {
      a *= 0.5;
      b *= 0.5;
    }
    const Vec2 x = k.v[0] + (k.v[1] - k.v[0]) * a + (k.v[2] - k.v[0]) * b;
    const Vec2 xh = map.apply(x);
    // d/dx [xh(x) yh(x)] = J^T (yh, xh)
    const Vec2 expected = map.jacobian().transpose() * Vec2{xh.y, xh.x};
    const Vec2 got = u.gradient(x);
    EXPECT_NEAR(got.x, expected.x, 1e-11);
    EXPECT_NEAR(got.y, expected.y, 1e-11);
  }
}

TEST(PushGradients, MatchesFiniteDifferencesOfValues) {
  std::mt19937 rng(71);
  const Triangle k = testutil::random_triangle(rng);
  const AffineMap map = map_to_reference(k);
  const ElementOps ops = make_element_ops(argyris());
  const TransformMatrix tm = ops.transform(k);
  const QuadratureRule rule = triangle_rule(4);
  std::vector<Vec2> phys;
  for (const Vec2& p : rule.points) phys.push_back(map.apply_inverse(p));
  const double step = 1e-6;
  for (std::size_t q = 0; q < std::min<std::size_t>(phys.size(), 6); ++q) {
    for (std::size_t i : {0u, 1u, 5u, 18u}) {
      Vector ei(21, 0.0);
      for (std::size_t c = 0; c < 21; ++c) ei[c] = tm.M(i, c);
      const PulledBackExpansion psi(ops.nodal, map, ei);
      const Vec2 x = phys[q];
      const Vec2 g = psi.gradient(x);
      const double fdx =
          (psi.value({x.x + step, x.y}) - psi.value({x.x - step, x.y})) / (2.0 * step);
      const double fdy =
          (psi.value({x.x, x.y + step}) - psi.value({x.x, x.y - step})) / (2.0 * step);
      EXPECT_NEAR(g.x, fdx, 1e-5);
      EXPECT_NEAR(g.y, fdy, 1e-5);
    }
  }
}

TEST(PushGradients, ContractionOrdersAgree) {
  // applying M then J^T equals applying J^T then M
  std::mt19937 rng(73);
  const Triangle k = testutil::random_triangle(rng);
  const AffineMap map = map_to_reference(k);
  const ElementOps ops = make_element_ops(morley());
  const QuadratureRule rule = triangle_rule(4);
  const BasisTable t = tabulate_reference(ops.nodal, rule);
  const TransformMatrix tm = ops.transform(k);
  const GradientTable m_first = push_gradients(tm.M, map.jacobian(), t);
  const GradientTable j_first_raw = push_gradients(DenseMatrix::identity(6), map.jacobian(), t);
  const DenseMatrix gx = tm.M * j_first_raw.x;
  const DenseMatrix gy = tm.M * j_first_raw.y;
  EXPECT_LE(max_abs_diff(m_first.x, gx), 1e-13);
  EXPECT_LE(max_abs_diff(m_first.y, gy), 1e-13);
}

TEST(LocalMatrix, ReferenceLinearMass) {
  const ElementOps ops = make_element_ops(lagrange(1));
  const DenseMatrix mass =
      local_matrix(ops, Triangle::reference(), Form::mass(), triangle_rule(2));
  DenseMatrix expected(3, 3);
  const double d = 1.0 / 12.0, o = 1.0 / 24.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) expected(i, j) = (i == j) ? d : o;
  EXPECT_LE(max_abs_diff(mass, expected), 1e-13);
}

TEST(LocalMatrix, StiffnessRowSumsVanish) {
  std::mt19937 rng(79);
  for (const ElementKind kind :
       {ElementKind::Lagrange, ElementKind::CubicHermite, ElementKind::Argyris}) {
    const ElementOps ops = make_element_ops(testutil::make_element(kind));
    const Triangle k = testutil::random_triangle(rng);
    const DenseMatrix a =
        local_matrix(ops, k, Form::stiffness(), triangle_rule(2 * ops.def.degree));
    // the interpolant of the constant 1 has coefficient 1 on value nodes and
    // 0 on derivative nodes; A applied to it must vanish
    Vector c(ops.active, 0.0);
    const std::vector<Functional> nodes = element_nodes(ops.def.kind, ops.def.degree, k);
    for (std::size_t i = 0; i < ops.active; ++i)
      if (nodes[i].kind == Functional::Kind::PointEval) c[i] = 1.0;
    const Vector ac = a * c;
    for (std::size_t i = 0; i < ops.active; ++i) EXPECT_NEAR(ac[i], 0.0, 1e-10);
  }
}

TEST(LocalMatrix, PlateAnnihilatesLinearInterpolants) {
  std::mt19937 rng(83);
  const ElementOps ops = make_element_ops(argyris());
  const Triangle k = testutil::random_triangle(rng);
  const DenseMatrix a = local_matrix(ops, k, Form::plate(0.5), triangle_rule(6));
  // nodal coefficients of p(x,y) = 2 - 3x + y on the physical cell
  const std::vector<Functional> nodes = element_nodes(ElementKind::Argyris, 5, k);
  Vector c;
  for (const Functional& n : nodes) {
    switch (n.kind) {
      case Functional::Kind::PointEval:
        c.push_back(2.0 - 3.0 * n.point.x + n.point.y);
        break;
      case Functional::Kind::PointDeriv:
        c.push_back(n.dir.x * -3.0 + n.dir.y * 1.0);
        break;
      default:
        c.push_back(0.0);
    }
  }
  const Vector ac = a * c;
  for (double v : ac) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(Congruence, IdentityReturnsInput) {
  std::mt19937 rng(89);
  const DenseMatrix a = testutil::random_spd(rng, 6);
  EXPECT_LE(max_abs_diff(congruence_transform(DenseMatrix::identity(6), a), a), 0.0);
}

TEST(Congruence, DualPathHermiteMass) {
  std::mt19937 rng(97);
  const ElementOps ops = make_element_ops(cubic_hermite());
  for (int rep = 0; rep < 5; ++rep) {
    const Triangle k = testutil::random_triangle(rng);
    const QuadratureRule rule = triangle_rule(6);
    const DenseMatrix direct = local_matrix(ops, k, Form::mass(), rule);
    const DenseMatrix wrong = local_matrix_pulled_back(ops, k, Form::mass(), rule);
    const DenseMatrix via = congruence_transform(ops.transform(k).M, wrong);
    EXPECT_LE(rel_diff(via, direct), 1e-10);
  }
}

TEST(Congruence, DualPathMorleyStiffness) {
  std::mt19937 rng(101);
  const ElementOps ops = make_element_ops(morley());
  for (int rep = 0; rep < 5; ++rep) {
    const Triangle k = testutil::random_triangle(rng);
    const QuadratureRule rule = triangle_rule(2);
    const DenseMatrix direct = local_matrix(ops, k, Form::stiffness(), rule);
    const DenseMatrix via = congruence_transform(
        ops.transform(k).M, local_matrix_pulled_back(ops, k, Form::stiffness(), rule));
    EXPECT_LE(rel_diff(via, direct), 1e-10);
  }
}

TEST(Congruence, DualPathAllFamiliesAllForms) {
  std::mt19937 rng(103);
  for (const ElementKind kind : {ElementKind::Lagrange, ElementKind::CubicHermite,
                                 ElementKind::Morley, ElementKind::Argyris, ElementKind::Bell}) {
    const ElementOps ops = make_element_ops(testutil::make_element(kind));
    for (const Form& form : {Form::mass(), Form::stiffness(), Form::plate(0.5)}) {
      for (int rep = 0; rep < 20; ++rep) {
        const Triangle k = testutil::random_triangle(rng);
        const QuadratureRule rule = triangle_rule(2 * ops.def.degree);
        const DenseMatrix direct = local_matrix(ops, k, form, rule);
        DenseMatrix via = congruence_transform(
            ops.transform(k).M, local_matrix_pulled_back(ops, k, form, rule));
        if (ops.active < via.rows()) {
          DenseMatrix sliced(ops.active, ops.active);
          for (std::size_t i = 0; i < ops.active; ++i)
            for (std::size_t j = 0; j < ops.active; ++j) sliced(i, j) = via(i, j);
          via = sliced;
        }
        EXPECT_LE(rel_diff(via, direct), 1e-10);
      }
    }
  }
}

namespace {

// Nodal interpolation of an evaluator on a physical cell.
template <class F>
Vector interpolate(const ElementOps& ops, const Triangle& k, const F& f) {
  const std::vector<Functional> nodes = element_nodes(ops.def.kind, ops.def.degree, k);
  Vector c;
  for (std::size_t i = 0; i < ops.active; ++i) c.push_back(apply_functional(nodes[i], k, f));
  return c;
}

struct CubicPoly {
  double value(Vec2 p) const {
    return 1.0 + 2.0 * p.x - p.y + 0.5 * p.x * p.y + p.x * p.x * p.x - 2.0 * p.y * p.y * p.x;
  }
  Vec2 gradient(Vec2 p) const {
    return {2.0 + 0.5 * p.y + 3.0 * p.x * p.x - 2.0 * p.y * p.y,
            -1.0 + 0.5 * p.x - 4.0 * p.y * p.x};
  }
  std::array<double, 3> hessian(Vec2 p) const {
    return {6.0 * p.x, 0.5 - 4.0 * p.y, -4.0 * p.x};
  }
};

struct QuarticPoly {
  double value(Vec2 p) const { return std::pow(p.x, 4) - 2.0 * p.x * p.x * p.y * p.y + p.y; }
  Vec2 gradient(Vec2 p) const {
    return {4.0 * p.x * p.x * p.x - 4.0 * p.x * p.y * p.y, -4.0 * p.x * p.x * p.y + 1.0};
  }
  std::array<double, 3> hessian(Vec2 p) const {
    return {12.0 * p.x * p.x - 4.0 * p.y * p.y, -8.0 * p.x * p.y, -4.0 * p.x * p.x};
  }
};

}  // namespace

TEST(Interpolant, ReproducesPolynomialsInTheSpace) {
  // nodal interpolants of polynomials in P reproduce them pointwise
  std::mt19937 rng(107);
  const Triangle k = testutil::random_triangle(rng);
  const QuadratureRule rule = triangle_rule(8);

  const auto check = [&](const ElementOps& ops, const auto& poly) {
    const AffineMap map = map_to_reference(k);
    const Vector c = interpolate(ops, k, poly);
    const TransformMatrix tm = ops.transform(k);
    Vector cpad(ops.tab_def.nu(), 0.0);
    for (std::size_t i = 0; i < ops.active; ++i) cpad[i] = c[i];
    const PulledBackExpansion u(ops.nodal, map, transform_coefficients(tm.V(), cpad));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = map.apply_inverse(rule.points[q]);
      EXPECT_NEAR(u.value(x), poly.value(x), 1e-9);
    }
  };
  check(make_element_ops(cubic_hermite()), CubicPoly{});
  check(make_element_ops(lagrange(3)), CubicPoly{});
  check(make_element_ops(argyris()), QuarticPoly{});
  check(make_element_ops(bell()), QuarticPoly{});
}

TEST(TransformCoefficients, HermiteCubicBothEvaluationPaths) {
  // interpolant evaluated nodally and through V c agree at 10 points
  std::mt19937 rng(109);
  const Triangle k = testutil::random_triangle(rng);
  const AffineMap map = map_to_reference(k);
  const ElementOps ops = make_element_ops(cubic_hermite());
  const CubicPoly poly;
  const Vector c = interpolate(ops, k, poly);
  const TransformMatrix tm = ops.transform(k);
  const Vector vc = transform_coefficients(tm.V(), c);
  const PulledBackExpansion via_vc(ops.nodal, map, vc);
  for (int rep = 0; rep < 10; ++rep) {
    std::uniform_real_distribution<double> t01(0.0, 1.0);
    double a = t01(rng), b = t01(rng);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    const Vec2 x = k.v[0] + (k.v[1] - k.v[0]) * a + (k.v[2] - k.v[0]) * b;
    double direct = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      Vector row(10);
      for (std::size_t j = 0; j < 10; ++j) row[j] = tm.M(i, j);
      direct += c[i] * PulledBackExpansion(ops.nodal, map, row).value(x);
    }
    EXPECT_NEAR(via_vc.value(x), direct, 1e-10);
    EXPECT_NEAR(via_vc.value(x), poly.value(x), 1e-10);
  }
}

TEST(TransformCoefficients, BellConstrainedQuinticInterpolant) {
  // x^3 + y^3 lies in every Bell space; the first-18 slice reproduces it
  std::mt19937 rng(113);
  const Triangle k = testutil::random_triangle(rng);
  const AffineMap map = map_to_reference(k);
  const ElementOps ops = make_element_ops(bell());
  struct Cube {
    double value(Vec2 p) const { return p.x * p.x * p.x + p.y * p.y * p.y; }
    Vec2 gradient(Vec2 p) const { return {3.0 * p.x * p.x, 3.0 * p.y * p.y}; }
    std::array<double, 3> hessian(Vec2 p) const { return {6.0 * p.x, 0.0, 6.0 * p.y}; }
  } poly;
  const Vector c = interpolate(ops, k, poly);
  Vector cpad(21, 0.0);
  for (std::size_t i = 0; i < 18; ++i) cpad[i] = c[i];
  const PulledBackExpansion u(ops.nodal, map, transform_coefficients(ops.transform(k).V(), cpad));
  const QuadratureRule rule = triangle_rule(6);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const Vec2 x = map.apply_inverse(rule.points[q]);
    EXPECT_NEAR(u.value(x), poly.value(x), 1e-10);
  }
}
