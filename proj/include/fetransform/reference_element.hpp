#pragma once

#include <array>
#include <cassert>
#include <span>
#include <string>
#include <vector>

#include "fetransform/geometry.hpp"
#include "fetransform/linalg.hpp"
#include "fetransform/quadrature.hpp"

namespace fet {

struct SingularVandermonde : std::runtime_error {
  explicit SingularVandermonde(const std::string& what) : std::runtime_error(what) {}
};

/// Legendre polynomial of degree n on [-1, 1] by the three-term recurrence.
inline double legendre_eval(int n, double x) {
  assert(n >= 0 && n <= 8);
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// Values and derivatives (through second order) of a set of polynomials at
/// one point, ordered (v, dx, dy, dxx, dxy, dyy) per polynomial.
struct PointValues {
  std::vector<double> v, dx, dy, dxx, dxy, dyy;

  explicit PointValues(std::size_t n)
      : v(n), dx(n), dy(n), dxx(n), dxy(n), dyy(n) {}
  std::size_t size() const { return v.size(); }
};

/// Basis of P_r on the reference triangle: monomials orthonormalized against
/// the quadrature inner product of degree 2r, which keeps generalized
/// Vandermonde matrices uniformly conditioned across the element zoo.
class PrimeBasis {
public:
  explicit PrimeBasis(int degree) : degree_(degree) {
    for (int t = 0; t <= degree; ++t)
      for (int b = 0; b <= t; ++b) exps_.push_back({t - b, b});
    const std::size_t n = exps_.size();
    w_ = DenseMatrix::identity(n);
    const QuadratureRule rule = triangle_rule(2 * degree);
    // Gram-Schmidt in monomial coefficient space.
    std::vector<std::vector<double>> tab(rule.points.size());
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      tab[q].resize(n);
      for (std::size_t j = 0; j < n; ++j)
        tab[q][j] = mono(j, rule.points[q].x, rule.points[q].y);
    }
    auto inner = [&](const double* a, const double* b) {
      double s = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        double pa = 0.0, pb = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          pa += a[j] * tab[q][j];
          pb += b[j] * tab[q][j];
        }
        s += rule.weights[q] * pa * pb;
      }
      return s;
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        const double c = inner(w_.row(i), w_.row(k));
        for (std::size_t j = 0; j < n; ++j) w_(i, j) -= c * w_(k, j);
      }
      const double nrm = std::sqrt(inner(w_.row(i), w_.row(i)));
      for (std::size_t j = 0; j < n; ++j) w_(i, j) /= nrm;
    }
  }

  int degree() const { return degree_; }
  std::size_t size() const { return exps_.size(); }

  PointValues evaluate(Vec2 p) const {
    const std::size_t n = size();
    PointValues mv(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto [a, b] = exps_[j];
      const double xa = ipow(p.x, a), yb = ipow(p.y, b);
      mv.v[j] = xa * yb;
      mv.dx[j] = a ? a * ipow(p.x, a - 1) * yb : 0.0;
      mv.dy[j] = b ? b * xa * ipow(p.y, b - 1) : 0.0;
      mv.dxx[j] = a >= 2 ? a * (a - 1) * ipow(p.x, a - 2) * yb : 0.0;
      mv.dxy[j] = (a >= 1 && b >= 1) ? a * b * ipow(p.x, a - 1) * ipow(p.y, b - 1) : 0.0;
      mv.dyy[j] = b >= 2 ? b * (b - 1) * xa * ipow(p.y, b - 2) : 0.0;
    }
    PointValues out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double* wi = w_.row(i);
      double v = 0, dx = 0, dy = 0, dxx = 0, dxy = 0, dyy = 0;
      for (std::size_t j = 0; j < n; ++j) {
        v += wi[j] * mv.v[j];
        dx += wi[j] * mv.dx[j];
        dy += wi[j] * mv.dy[j];
        dxx += wi[j] * mv.dxx[j];
        dxy += wi[j] * mv.dxy[j];
        dyy += wi[j] * mv.dyy[j];
      }
      out.v[i] = v;
      out.dx[i] = dx;
      out.dy[i] = dy;
      out.dxx[i] = dxx;
      out.dxy[i] = dxy;
      out.dyy[i] = dyy;
    }
    return out;
  }

  /// Gram matrix under a quadrature inner product (identity by construction).
  DenseMatrix gram(const QuadratureRule& rule) const {
    const std::size_t n = size();
    DenseMatrix g(n, n);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const PointValues pv = evaluate(rule.points[q]);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) += rule.weights[q] * pv.v[i] * pv.v[j];
    }
    return g;
  }

private:
  static double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
  }
  double mono(std::size_t j, double x, double y) const {
    return ipow(x, exps_[j][0]) * ipow(y, exps_[j][1]);
  }

  int degree_;
  std::vector<std::array<int, 2>> exps_;
  DenseMatrix w_;  // orthonormal basis coefficients over monomials, row per function
};

/// A node: point evaluation, first or second directional derivative, or an
/// edge moment of a directional derivative against a Legendre polynomial.
struct Functional {
  enum class Kind { PointEval, PointDeriv, PointSecondDeriv, EdgeDerivMoment };
  enum class EdgeDirection { Normal, Tangent };

  Kind kind = Kind::PointEval;
  Vec2 point{};
  Vec2 dir{}, dir2{};
  int edge = -1;
  int legendre_degree = 0;
  EdgeDirection moment_dir = EdgeDirection::Normal;

  static Functional point_eval(Vec2 p) { return {Kind::PointEval, p}; }
  static Functional point_deriv(Vec2 p, Vec2 d) { return {Kind::PointDeriv, p, d}; }
  static Functional point_second_deriv(Vec2 p, Vec2 d1, Vec2 d2) {
    return {Kind::PointSecondDeriv, p, d1, d2};
  }
  static Functional edge_deriv_moment(int edge, int legendre_degree, EdgeDirection dir) {
    Functional f;
    f.kind = Kind::EdgeDerivMoment;
    f.edge = edge;
    f.legendre_degree = legendre_degree;
    f.moment_dir = dir;
    return f;
  }
};

/// Applies a functional on a given cell to anything that can report values,
/// gradients and second derivatives at points. Edge moments use a 6-point
/// Gauss rule, exact through degree 11.
template <class Evaluator>
double apply_functional(const Functional& f, const Triangle& cell, const Evaluator& p) {
  switch (f.kind) {
    case Functional::Kind::PointEval:
      return p.value(f.point);
    case Functional::Kind::PointDeriv: {
      const Vec2 g = p.gradient(f.point);
      return f.dir.dot(g);
    }
    case Functional::Kind::PointSecondDeriv: {
      const std::array<double, 3> h = p.hessian(f.point);  // (xx, xy, yy)
      return f.dir.x * f.dir2.x * h[0] + (f.dir.x * f.dir2.y + f.dir.y * f.dir2.x) * h[1] +
             f.dir.y * f.dir2.y * h[2];
    }
    case Functional::Kind::EdgeDerivMoment: {
      const std::array<EdgeFrame, 3> frames = edge_frames(cell);
      const EdgeFrame& e = frames[f.edge];
      const Vec2 d = (f.moment_dir == Functional::EdgeDirection::Normal) ? e.normal : e.tangent;
      const Vec2 a = cell.v[e.vertex_a], b = cell.v[e.vertex_b];
      static const IntervalRule rule = gauss_interval(6);
      double s = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double u = rule.points[q];
        const Vec2 x = (a + b) * 0.5 + (b - a) * (0.5 * u);
        const Vec2 g = p.gradient(x);
        s += rule.weights[q] * legendre_eval(f.legendre_degree, u) * d.dot(g);
      }
      return s * (e.length / 2.0);
    }
  }
  return 0.0;
}

/// Polynomial given by prime-basis coefficients, evaluated anywhere.
class PrimeExpansion {
public:
  PrimeExpansion(const PrimeBasis& basis, std::span<const double> coeffs)
      : basis_(&basis), c_(coeffs.begin(), coeffs.end()) {}

  double value(Vec2 x) const {
    const PointValues pv = basis_->evaluate(x);
    double s = 0.0;
    for (std::size_t j = 0; j < c_.size(); ++j) s += c_[j] * pv.v[j];
    return s;
  }
  Vec2 gradient(Vec2 x) const {
    const PointValues pv = basis_->evaluate(x);
    Vec2 g{};
    for (std::size_t j = 0; j < c_.size(); ++j) {
      g.x += c_[j] * pv.dx[j];
      g.y += c_[j] * pv.dy[j];
    }
    return g;
  }
  std::array<double, 3> hessian(Vec2 x) const {
    const PointValues pv = basis_->evaluate(x);
    std::array<double, 3> h{};
    for (std::size_t j = 0; j < c_.size(); ++j) {
      h[0] += c_[j] * pv.dxx[j];
      h[1] += c_[j] * pv.dxy[j];
      h[2] += c_[j] * pv.dyy[j];
    }
    return h;
  }

private:
  const PrimeBasis* basis_;
  std::vector<double> c_;
};

/// Action of a functional on the reference cell applied to a polynomial in
/// prime coefficients.
inline double apply_functional(const Functional& f, std::span<const double> coeffs,
                               const PrimeBasis& basis) {
  return apply_functional(f, Triangle::reference(), PrimeExpansion(basis, coeffs));
}

enum class ElementKind {
  Lagrange,      // degree r
  CubicHermite,
  Morley,
  Argyris,
  BellExtended,  // full quintics, 18 vertex nodes + 3 constraint moments
  Bell,          // constrained quintics, first 18 of the extended basis
};

struct FiniteElementDef {
  std::string name;
  ElementKind kind = ElementKind::Lagrange;
  int degree = 1;  // degree of the containing polynomial space
  std::vector<Functional> nodes;
  std::vector<Functional> constraints;  // kappa functionals (Bell family only)

  std::size_t nu() const { return nodes.size(); }
};

namespace detail {

inline void append_vertex_block(std::vector<Functional>& n, Vec2 p, bool second_derivs) {
  const Vec2 ex{1.0, 0.0}, ey{0.0, 1.0};
  n.push_back(Functional::point_eval(p));
  n.push_back(Functional::point_deriv(p, ex));
  n.push_back(Functional::point_deriv(p, ey));
  if (second_derivs) {
    n.push_back(Functional::point_second_deriv(p, ex, ex));
    n.push_back(Functional::point_second_deriv(p, ex, ey));
    n.push_back(Functional::point_second_deriv(p, ey, ey));
  }
}

}  // namespace detail

/// Node set of an element instantiated on an arbitrary cell. Vertex
/// derivatives use Cartesian directions; edge nodes use the cell's own frame
/// convention, so two cells sharing an edge produce the same functionals.
inline std::vector<Functional> element_nodes(ElementKind kind, int degree, const Triangle& cell) {
  std::vector<Functional> n;
  switch (kind) {
    case ElementKind::Lagrange: {
      const int r = degree;
      for (int i = 0; i < 3; ++i) n.push_back(Functional::point_eval(cell.v[i]));
      for (int i = 0; i < 3; ++i) {
        const int a = (i + 1) % 3, b = (i + 2) % 3;  // local order, see dofmap for meshes
        for (int k = 1; k < r; ++k)
          n.push_back(Functional::point_eval(cell.v[a] + (cell.v[b] - cell.v[a]) * (double(k) / r)));
      }
      for (int i = 1; i < r; ++i)
        for (int j = 1; i + j < r; ++j) {
          const Vec2 p = cell.v[0] + (cell.v[1] - cell.v[0]) * (double(i) / r) +
                         (cell.v[2] - cell.v[0]) * (double(j) / r);
          n.push_back(Functional::point_eval(p));
        }
      break;
    }
    case ElementKind::CubicHermite: {
      for (int i = 0; i < 3; ++i) detail::append_vertex_block(n, cell.v[i], false);
      n.push_back(Functional::point_eval(cell.barycenter()));
      break;
    }
    case ElementKind::Morley: {
      const auto frames = edge_frames(cell);
      for (int i = 0; i < 3; ++i) n.push_back(Functional::point_eval(cell.v[i]));
      for (int i = 0; i < 3; ++i)
        n.push_back(Functional::point_deriv(frames[i].midpoint, frames[i].normal));
      break;
    }
    case ElementKind::Argyris: {
      const auto frames = edge_frames(cell);
      for (int i = 0; i < 3; ++i) detail::append_vertex_block(n, cell.v[i], true);
      for (int i = 0; i < 3; ++i)
        n.push_back(Functional::point_deriv(frames[i].midpoint, frames[i].normal));
      break;
    }
    case ElementKind::Bell:
    case ElementKind::BellExtended: {
      for (int i = 0; i < 3; ++i) detail::append_vertex_block(n, cell.v[i], true);
      if (kind == ElementKind::BellExtended)
        for (int i = 0; i < 3; ++i)
          n.push_back(Functional::edge_deriv_moment(i, 4, Functional::EdgeDirection::Normal));
      break;
    }
  }
  return n;
}

inline std::vector<Functional> bell_constraints() {
  std::vector<Functional> c;
  for (int i = 0; i < 3; ++i)
    c.push_back(Functional::edge_deriv_moment(i, 4, Functional::EdgeDirection::Normal));
  return c;
}

inline FiniteElementDef lagrange(int r) {
  FiniteElementDef el;
  el.name = "lagrange" + std::to_string(r);
  el.kind = ElementKind::Lagrange;
  el.degree = r;
  el.nodes = element_nodes(el.kind, r, Triangle::reference());
  return el;
}

inline FiniteElementDef cubic_hermite() {
  FiniteElementDef el;
  el.name = "hermite";
  el.kind = ElementKind::CubicHermite;
  el.degree = 3;
  el.nodes = element_nodes(el.kind, 3, Triangle::reference());
  return el;
}

inline FiniteElementDef morley() {
  FiniteElementDef el;
  el.name = "morley";
  el.kind = ElementKind::Morley;
  el.degree = 2;
  el.nodes = element_nodes(el.kind, 2, Triangle::reference());
  return el;
}

inline FiniteElementDef argyris() {
  FiniteElementDef el;
  el.name = "argyris";
  el.kind = ElementKind::Argyris;
  el.degree = 5;
  el.nodes = element_nodes(el.kind, 5, Triangle::reference());
  return el;
}

inline FiniteElementDef bell_extended() {
  FiniteElementDef el;
  el.name = "bell_extended";
  el.kind = ElementKind::BellExtended;
  el.degree = 5;
  el.nodes = element_nodes(el.kind, 5, Triangle::reference());
  el.constraints = bell_constraints();
  return el;
}

inline FiniteElementDef bell() {
  FiniteElementDef el;
  el.name = "bell";
  el.kind = ElementKind::Bell;
  el.degree = 5;
  el.nodes = element_nodes(el.kind, 5, Triangle::reference());
  el.constraints = bell_constraints();
  return el;
}

/// Nodal basis coefficients over a prime basis: psi_k = sum_j C_kj phi_j.
struct NodalBasis {
  DenseMatrix coefficients;
  PrimeBasis basis;
};

/// Builds A_ij = n_i(phi_j) and returns C = A^{-T}. For the plain Bell
/// element the 21-node extended element is solved and the first 18 rows are
/// kept; those functions carry vanishing constraint moments.
inline NodalBasis build_nodal_basis(const FiniteElementDef& el, const PrimeBasis& basis) {
  if (el.kind == ElementKind::Bell) {
    NodalBasis ext = build_nodal_basis(bell_extended(), basis);
    DenseMatrix c(18, ext.coefficients.cols());
    for (std::size_t i = 0; i < 18; ++i)
      for (std::size_t j = 0; j < ext.coefficients.cols(); ++j) c(i, j) = ext.coefficients(i, j);
    return NodalBasis{std::move(c), basis};
  }
  const std::size_t nu = el.nu();
  const std::size_t dim = basis.size();
  if (nu != dim) throw SingularVandermonde("build_nodal_basis: node count != space dimension");
  DenseMatrix a(nu, dim);
  Vector ej(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    ej[j] = 1.0;
    const PrimeExpansion phi(basis, ej);
    for (std::size_t i = 0; i < nu; ++i)
      a(i, j) = apply_functional(el.nodes[i], Triangle::reference(), phi);
    ej[j] = 0.0;
  }
  try {
    return NodalBasis{transpose(invert(a)), basis};
  } catch (const SingularMatrix&) {
    throw SingularVandermonde("build_nodal_basis: node set is not unisolvent");
  }
}

inline NodalBasis build_nodal_basis(const FiniteElementDef& el) {
  return build_nodal_basis(el, PrimeBasis(el.degree));
}

}  // namespace fet
