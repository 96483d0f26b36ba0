#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fetransform/quadrature.hpp"
#include "fetransform/reference_element.hpp"
#include "fetransform/transform.hpp"

namespace fet {

/// Values, gradients and second derivatives (xx, xy, yy) of a basis at a
/// point set, each stored as a nu x Q matrix.
struct BasisTable {
  DenseMatrix values;
  DenseMatrix grad_x, grad_y;
  DenseMatrix d_xx, d_xy, d_yy;
  int max_deriv = 0;

  std::size_t nu() const { return values.rows(); }
  std::size_t points() const { return values.cols(); }
};

inline BasisTable tabulate_reference(const NodalBasis& nb, std::span<const Vec2> points,
                                     int max_deriv = 2) {
  const std::size_t nu = nb.coefficients.rows();
  const std::size_t nq = points.size();
  const std::size_t dim = nb.basis.size();
  BasisTable t;
  t.max_deriv = max_deriv;
  t.values = DenseMatrix(nu, nq);
  if (max_deriv >= 1) {
    t.grad_x = DenseMatrix(nu, nq);
    t.grad_y = DenseMatrix(nu, nq);
  }
  if (max_deriv >= 2) {
    t.d_xx = DenseMatrix(nu, nq);
    t.d_xy = DenseMatrix(nu, nq);
    t.d_yy = DenseMatrix(nu, nq);
  }
  for (std::size_t q = 0; q < nq; ++q) {
    const PointValues pv = nb.basis.evaluate(points[q]);
    for (std::size_t i = 0; i < nu; ++i) {
      const double* c = nb.coefficients.row(i);
      double v = 0, gx = 0, gy = 0, xx = 0, xy = 0, yy = 0;
      for (std::size_t j = 0; j < dim; ++j) {
        v += c[j] * pv.v[j];
        if (max_deriv >= 1) {
          gx += c[j] * pv.dx[j];
          gy += c[j] * pv.dy[j];
        }
        if (max_deriv >= 2) {
          xx += c[j] * pv.dxx[j];
          xy += c[j] * pv.dxy[j];
          yy += c[j] * pv.dyy[j];
        }
      }
      t.values(i, q) = v;
      if (max_deriv >= 1) {
        t.grad_x(i, q) = gx;
        t.grad_y(i, q) = gy;
      }
      if (max_deriv >= 2) {
        t.d_xx(i, q) = xx;
        t.d_xy(i, q) = xy;
        t.d_yy(i, q) = yy;
      }
    }
  }
  return t;
}

inline BasisTable tabulate_reference(const NodalBasis& nb, const QuadratureRule& rule,
                                     int max_deriv = 2) {
  return tabulate_reference(nb, std::span<const Vec2>(rule.points), max_deriv);
}

/// psi_i(xi_q) = sum_k M_ik Psi_hat_kq.
inline DenseMatrix push_values(const DenseMatrix& m, const BasisTable& table) {
  return m * table.values;
}

struct GradientTable {
  DenseMatrix x, y;
};

/// Contraction with M followed by the chain rule J^T (the two steps commute).
inline GradientTable push_gradients(const DenseMatrix& m, const Mat2& j,
                                    const BasisTable& table) {
  const DenseMatrix gx = m * table.grad_x;
  const DenseMatrix gy = m * table.grad_y;
  GradientTable out{DenseMatrix(gx.rows(), gx.cols()), DenseMatrix(gx.rows(), gx.cols())};
  for (std::size_t i = 0; i < gx.rows(); ++i)
    for (std::size_t q = 0; q < gx.cols(); ++q) {
      out.x(i, q) = j.a00 * gx(i, q) + j.a10 * gy(i, q);
      out.y(i, q) = j.a01 * gx(i, q) + j.a11 * gy(i, q);
    }
  return out;
}

struct SecondDerivTable {
  DenseMatrix xx, xy, yy;
};

/// Affine maps carry no curvature term, so the physical second-derivative
/// triple is Theta applied pointwise after the M contraction.
inline SecondDerivTable push_second_derivs(const DenseMatrix& m, const Mat2& j,
                                           const BasisTable& table) {
  const DenseMatrix xx = m * table.d_xx;
  const DenseMatrix xy = m * table.d_xy;
  const DenseMatrix yy = m * table.d_yy;
  const DenseMatrix th = theta_matrix(j);
  SecondDerivTable out{DenseMatrix(xx.rows(), xx.cols()), DenseMatrix(xx.rows(), xx.cols()),
                       DenseMatrix(xx.rows(), xx.cols())};
  for (std::size_t i = 0; i < xx.rows(); ++i)
    for (std::size_t q = 0; q < xx.cols(); ++q) {
      out.xx(i, q) = th(0, 0) * xx(i, q) + th(0, 1) * xy(i, q) + th(0, 2) * yy(i, q);
      out.xy(i, q) = th(1, 0) * xx(i, q) + th(1, 1) * xy(i, q) + th(1, 2) * yy(i, q);
      out.yy(i, q) = th(2, 0) * xx(i, q) + th(2, 1) * xy(i, q) + th(2, 2) * yy(i, q);
    }
  return out;
}

/// Bilinear form selector for local matrices.
struct Form {
  enum class Kind { Mass, Stiffness, Plate };
  Kind kind = Kind::Mass;
  double poisson = 0.5;

  static Form mass() { return {Kind::Mass, 0.0}; }
  static Form stiffness() { return {Kind::Stiffness, 0.0}; }
  static Form plate(double nu) { return {Kind::Plate, nu}; }

  int derivative_order() const {
    switch (kind) {
      case Kind::Mass: return 0;
      case Kind::Stiffness: return 1;
      case Kind::Plate: return 2;
    }
    return 0;
  }
};

/// Cached per-family machinery: the element, the element actually tabulated
/// (the extended quintic stands in for Bell), its reference nodal basis and
/// the active basis count.
struct ElementOps {
  FiniteElementDef def;
  FiniteElementDef tab_def;
  NodalBasis nodal;
  std::size_t active = 0;

  TransformMatrix transform(const Triangle& k) const { return transform_for(tab_def, k); }
};

inline ElementOps make_element_ops(const FiniteElementDef& el) {
  FiniteElementDef tab = (el.kind == ElementKind::Bell) ? bell_extended() : el;
  NodalBasis nb = build_nodal_basis(tab);
  return ElementOps{el, std::move(tab), std::move(nb), el.nu()};
}

namespace detail {

inline DenseMatrix quadrature_assemble(const Form& form, const DenseMatrix& v,
                                       const GradientTable& g, const SecondDerivTable& h,
                                       std::span<const double> w, std::size_t active) {
  const std::size_t nq = w.size();
  DenseMatrix a(active, active);
  auto accumulate = [&](const DenseMatrix& fi, const DenseMatrix& fj, double c) {
    for (std::size_t i = 0; i < active; ++i)
      for (std::size_t j = 0; j < active; ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < nq; ++q) s += w[q] * fi(i, q) * fj(j, q);
        a(i, j) += c * s;
      }
  };
  switch (form.kind) {
    case Form::Kind::Mass:
      accumulate(v, v, 1.0);
      break;
    case Form::Kind::Stiffness:
      accumulate(g.x, g.x, 1.0);
      accumulate(g.y, g.y, 1.0);
      break;
    case Form::Kind::Plate: {
      const double nu = form.poisson;
      accumulate(h.xx, h.xx, 1.0);
      accumulate(h.yy, h.yy, 1.0);
      accumulate(h.xx, h.yy, 2.0 * nu - 1.0);
      accumulate(h.yy, h.xx, 2.0 * nu - 1.0);
      accumulate(h.xy, h.xy, 4.0 * (1.0 - nu));
      break;
    }
  }
  return a;
}

}  // namespace detail

/// Local form matrix assembled from physically pushed tables; quadrature
/// weights carry |det J|^{-1} because F runs physical -> reference.
inline DenseMatrix local_matrix(const ElementOps& ops, const Triangle& k, const Form& form,
                                const QuadratureRule& rule, const BasisTable* ref_table = nullptr) {
  const AffineMap map = map_to_reference(k);
  BasisTable local;
  const BasisTable& table =
      ref_table ? *ref_table : (local = tabulate_reference(ops.nodal, rule), local);
  const TransformMatrix tm = ops.transform(k);
  const DenseMatrix v = push_values(tm.M, table);
  const GradientTable g = push_gradients(tm.M, map.jacobian(), table);
  const SecondDerivTable h = push_second_derivs(tm.M, map.jacobian(), table);
  Vector w(rule.weights);
  const double scale = 1.0 / std::abs(map.det());
  for (double& wq : w) wq *= scale;
  return detail::quadrature_assemble(form, v, g, h, w, ops.active);
}

/// The "wrong" local matrix built from pulled-back reference basis functions
/// (no M applied); congruence with M recovers the true local matrix.
inline DenseMatrix local_matrix_pulled_back(const ElementOps& ops, const Triangle& k,
                                            const Form& form, const QuadratureRule& rule,
                                            const BasisTable* ref_table = nullptr) {
  const AffineMap map = map_to_reference(k);
  BasisTable local;
  const BasisTable& table =
      ref_table ? *ref_table : (local = tabulate_reference(ops.nodal, rule), local);
  const DenseMatrix eye = DenseMatrix::identity(table.nu());
  const DenseMatrix v = table.values;
  const GradientTable g = push_gradients(eye, map.jacobian(), table);
  const SecondDerivTable h = push_second_derivs(eye, map.jacobian(), table);
  Vector w(rule.weights);
  const double scale = 1.0 / std::abs(map.det());
  for (double& wq : w) wq *= scale;
  return detail::quadrature_assemble(form, v, g, h, w, table.nu());
}

inline DenseMatrix congruence_transform(const DenseMatrix& m, const DenseMatrix& a_tilde) {
  return m * a_tilde * transpose(m);
}

/// Coefficients on the pulled-back reference basis: u = sum_k (V c)_k F*(psi_hat_k).
inline Vector transform_coefficients(const DenseMatrix& v, const Vector& c) {
  return v * c;
}

}  // namespace fet
