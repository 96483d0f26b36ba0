#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fetransform/geometry.hpp"
#include "fetransform/linalg.hpp"
#include "fetransform/reference_element.hpp"

namespace fet {

struct SingularJacobian : std::runtime_error {
  explicit SingularJacobian(const std::string& what) : std::runtime_error(what) {}
};
struct SingularB : std::runtime_error {
  explicit SingularB(const std::string& what) : std::runtime_error(what) {}
};

/// Basis transformation for one cell: Psi = M F*(Psi_hat) with M = V^T.
/// Elements built through a nodal completion also expose the factors of
/// V = E V^c D.
struct TransformMatrix {
  DenseMatrix M;
  std::optional<DenseMatrix> E, Vc, D;

  DenseMatrix V() const { return transpose(M); }
};

/// B^i = (G_i J^T G_hat_i^T)^{-1} = G_hat_i J^{-T} G_i^T: the 2x2 block that
/// carries pushed-forward normal/tangent derivative pairs on edge i back to
/// the reference pair.
inline Mat2 b_matrix(const Mat2& j, const EdgeFrame& phys, const EdgeFrame& ref) {
  if (std::abs(j.det()) < 1e-14) throw SingularJacobian("b_matrix: singular Jacobian");
  return frame_matrix(ref) * j.inverse().transpose() * frame_matrix(phys).transpose();
}

/// Chain-rule matrix for the (xx, xy, yy) second-derivative triple: the
/// triple of psi_hat o F equals Theta times the reference triple.
inline DenseMatrix theta_matrix(const Mat2& j) {
  DenseMatrix t(3, 3);
  t(0, 0) = j.a00 * j.a00;
  t(0, 1) = 2.0 * j.a00 * j.a10;
  t(0, 2) = j.a10 * j.a10;
  t(1, 0) = j.a01 * j.a00;
  t(1, 1) = j.a01 * j.a10 + j.a00 * j.a11;
  t(1, 2) = j.a10 * j.a11;
  t(2, 0) = j.a01 * j.a01;
  t(2, 1) = 2.0 * j.a01 * j.a11;
  t(2, 2) = j.a11 * j.a11;
  return t;
}

namespace detail {

inline void check_jacobian(const AffineMap& map) {
  if (std::abs(map.det()) < 1e-14) throw SingularJacobian("transform: singular Jacobian");
}

inline void place_mat2(DenseMatrix& m, std::size_t r, std::size_t c, const Mat2& b) {
  m(r, c) = b.a00;
  m(r, c + 1) = b.a01;
  m(r + 1, c) = b.a10;
  m(r + 1, c + 1) = b.a11;
}

}  // namespace detail

/// Affine-equivalent elements map with the identity.
inline TransformMatrix transform_lagrange(const FiniteElementDef& el, const AffineMap& map) {
  detail::check_jacobian(map);
  TransformMatrix t;
  t.M = DenseMatrix::identity(el.nu());
  return t;
}

/// V = blockdiag(1, J^{-T}, 1, J^{-T}, 1, J^{-T}, 1): the vertex gradients
/// are the only nodes that do not push forward onto their reference twins.
inline TransformMatrix transform_hermite(const AffineMap& map) {
  detail::check_jacobian(map);
  const Mat2 jit = map.jacobian().inverse().transpose();
  DenseMatrix v = DenseMatrix::identity(10);
  for (std::size_t k = 0; k < 3; ++k) detail::place_mat2(v, 1 + 3 * k, 1 + 3 * k, jit);
  TransformMatrix t;
  t.M = transpose(v);
  return t;
}

/// Morley: explicit V plus the E (6x9), V^c (9x9), D (9x6) factors. The
/// completion adds tangential derivatives at edge midpoints; on quadratics
/// the midpoint tangential derivative equals the endpoint-value difference
/// over the edge length.
inline TransformMatrix transform_morley(const AffineMap& map,
                                        const std::array<EdgeFrame, 3>& frames,
                                        const std::array<EdgeFrame, 3>& ref_frames) {
  detail::check_jacobian(map);
  DenseMatrix e(6, 9), vc(9, 9), d(9, 6);
  for (std::size_t i = 0; i < 3; ++i) {
    e(i, i) = 1.0;
    e(3 + i, 3 + 2 * i) = 1.0;
    vc(i, i) = 1.0;
    d(i, i) = 1.0;
    d(3 + 2 * i, 3 + i) = 1.0;
  }
  DenseMatrix v = DenseMatrix::identity(6);
  for (std::size_t i = 0; i < 3; ++i) {
    const Mat2 b = b_matrix(map.jacobian(), frames[i], ref_frames[i]);
    detail::place_mat2(vc, 3 + 2 * i, 3 + 2 * i, b);
    const EdgeFrame& f = frames[i];
    d(4 + 2 * i, f.vertex_a) = -1.0 / f.length;
    d(4 + 2 * i, f.vertex_b) = 1.0 / f.length;
    v(3 + i, f.vertex_a) = -b.a01 / f.length;
    v(3 + i, f.vertex_b) = b.a01 / f.length;
    v(3 + i, 3 + i) = b.a00;
  }
  TransformMatrix t;
  t.M = transpose(v);
  t.E = std::move(e);
  t.Vc = std::move(vc);
  t.D = std::move(d);
  return t;
}

namespace detail {

/// Shared E / V^c / D assembly for the Argyris element and the extended
/// quintic used to map Bell. Vertex blocks are (1, J^{-T}, Theta^{-1});
/// edge pairs transform by B^i, for Bell scaled by lhat/l to absorb the
/// arclength factor in the moment push-forward. D expresses the completion's
/// tangential edge functionals through vertex data:
///   Argyris midpoint tangential derivative:
///     +-15/(8 l) values, -7/16 t^T both gradients, +-l/32 tau^T seconds;
///   Bell tangential L^4 moments:
///     +-1/21 values, -l/42 t^T both gradients, +-l^2/252 tau^T seconds.
inline TransformMatrix transform_vertex_edge_completion(
    const AffineMap& map, const std::array<EdgeFrame, 3>& frames,
    const std::array<EdgeFrame, 3>& ref_frames, bool bell) {
  check_jacobian(map);
  const Mat2 jit = map.jacobian().inverse().transpose();
  const DenseMatrix theta_inv = invert(theta_matrix(map.jacobian()));
  DenseMatrix e(21, 24), vc(24, 24), d(24, 21);
  for (std::size_t r = 0; r < 18; ++r) {
    e(r, r) = 1.0;
    d(r, r) = 1.0;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    e(18 + i, 18 + 2 * i) = 1.0;
    d(18 + 2 * i, 18 + i) = 1.0;
  }
  for (std::size_t k = 0; k < 3; ++k) {
    vc(6 * k, 6 * k) = 1.0;
    place_mat2(vc, 6 * k + 1, 6 * k + 1, jit);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) vc(6 * k + 3 + r, 6 * k + 3 + c) = theta_inv(r, c);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    Mat2 b = b_matrix(map.jacobian(), frames[i], ref_frames[i]);
    if (bell) b = b * (ref_frames[i].length / frames[i].length);
    place_mat2(vc, 18 + 2 * i, 18 + 2 * i, b);

    const EdgeFrame& f = frames[i];
    const double l = f.length;
    const Vec2 t = f.tangent;
    const std::array<double, 3> tau{t.x * t.x, 2.0 * t.x * t.y, t.y * t.y};
    const double cv = bell ? 1.0 / 21.0 : 15.0 / (8.0 * l);
    const double cg = bell ? -l / 42.0 : -7.0 / 16.0;
    const double ch = bell ? l * l / 252.0 : l / 32.0;
    const std::size_t r = 19 + 2 * i;
    const std::size_t a = 6 * std::size_t(f.vertex_a), bcol = 6 * std::size_t(f.vertex_b);
    d(r, a) = -cv;
    d(r, bcol) = cv;
    d(r, a + 1) = cg * t.x;
    d(r, a + 2) = cg * t.y;
    d(r, bcol + 1) = cg * t.x;
    d(r, bcol + 2) = cg * t.y;
    for (std::size_t c = 0; c < 3; ++c) {
      d(r, a + 3 + c) = -ch * tau[c];
      d(r, bcol + 3 + c) = ch * tau[c];
    }
  }
  TransformMatrix out;
  out.M = transpose(e * vc * d);
  out.E = std::move(e);
  out.Vc = std::move(vc);
  out.D = std::move(d);
  return out;
}

}  // namespace detail

inline TransformMatrix transform_argyris(const AffineMap& map,
                                         const std::array<EdgeFrame, 3>& frames,
                                         const std::array<EdgeFrame, 3>& ref_frames) {
  return detail::transform_vertex_edge_completion(map, frames, ref_frames, false);
}

/// Transform of the 21-node extended quintic element behind Bell. The
/// physical Bell basis is the first 18 entries of M applied to the pulled
/// back extended reference basis.
inline TransformMatrix transform_bell(const AffineMap& map,
                                      const std::array<EdgeFrame, 3>& frames,
                                      const std::array<EdgeFrame, 3>& ref_frames) {
  return detail::transform_vertex_edge_completion(map, frames, ref_frames, true);
}

/// Closed-form transform dispatch for a physical cell against a reference
/// cell (the unit right triangle unless kref is supplied).
inline TransformMatrix transform_for(const FiniteElementDef& el, const Triangle& k,
                                     const Triangle& kref = Triangle::reference()) {
  const AffineMap map = affine_map(k, kref);
  switch (el.kind) {
    case ElementKind::Lagrange:
      return transform_lagrange(el, map);
    case ElementKind::CubicHermite:
      return transform_hermite(map);
    case ElementKind::Morley:
      return transform_morley(map, edge_frames(k), edge_frames(kref));
    case ElementKind::Argyris:
      return transform_argyris(map, edge_frames(k), edge_frames(kref));
    case ElementKind::Bell:
    case ElementKind::BellExtended:
      return transform_bell(map, edge_frames(k), edge_frames(kref));
  }
  throw std::logic_error("transform_for: unknown element kind");
}

/// Linear combination of pulled-back reference basis functions, with
/// physical-space derivatives through the chain rule.
class PulledBackExpansion {
public:
  PulledBackExpansion(const NodalBasis& ref_basis, const AffineMap& map, Vector coeffs)
      : basis_(&ref_basis), map_(map), c_(std::move(coeffs)) {}

  double value(Vec2 x) const {
    const PointValues pv = basis_->basis.evaluate(map_.apply(x));
    double s = 0.0;
    for (std::size_t k = 0; k < c_.size(); ++k) {
      if (c_[k] == 0.0) continue;
      const double* row = basis_->coefficients.row(k);
      double f = 0.0;
      for (std::size_t j = 0; j < basis_->basis.size(); ++j) f += row[j] * pv.v[j];
      s += c_[k] * f;
    }
    return s;
  }

  Vec2 gradient(Vec2 x) const {
    const PointValues pv = basis_->basis.evaluate(map_.apply(x));
    Vec2 ghat{};
    for (std::size_t k = 0; k < c_.size(); ++k) {
      if (c_[k] == 0.0) continue;
      const double* row = basis_->coefficients.row(k);
      for (std::size_t j = 0; j < basis_->basis.size(); ++j) {
        ghat.x += c_[k] * row[j] * pv.dx[j];
        ghat.y += c_[k] * row[j] * pv.dy[j];
      }
    }
    return map_.jacobian().transpose() * ghat;
  }

  std::array<double, 3> hessian(Vec2 x) const {
    const PointValues pv = basis_->basis.evaluate(map_.apply(x));
    std::array<double, 3> hhat{};
    for (std::size_t k = 0; k < c_.size(); ++k) {
      if (c_[k] == 0.0) continue;
      const double* row = basis_->coefficients.row(k);
      for (std::size_t j = 0; j < basis_->basis.size(); ++j) {
        hhat[0] += c_[k] * row[j] * pv.dxx[j];
        hhat[1] += c_[k] * row[j] * pv.dxy[j];
        hhat[2] += c_[k] * row[j] * pv.dyy[j];
      }
    }
    const DenseMatrix th = theta_matrix(map_.jacobian());
    std::array<double, 3> h{};
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) h[r] += th(r, c) * hhat[c];
    return h;
  }

private:
  const NodalBasis* basis_;
  AffineMap map_;
  Vector c_;
};

/// Brute-force transform from the theorem M = V^T: builds
/// B_ij = n_i(F*(psi_hat_j)) by applying the physical nodes to pulled-back
/// reference basis functions and returns M = B^{-T}.
inline TransformMatrix oracle_transform(const FiniteElementDef& el, const Triangle& k,
                                        const Triangle& kref = Triangle::reference()) {
  const AffineMap map = affine_map(k, kref);
  const PrimeBasis prime(el.degree);
  // nodal basis on the "reference" cell kref
  const std::vector<Functional> ref_nodes = element_nodes(el.kind, el.degree, kref);
  const std::size_t nu = ref_nodes.size();
  if (nu != prime.size())
    throw SingularB("oracle_transform: requires F*(P_hat) = P (use the extended Bell element)");
  DenseMatrix a(nu, nu);
  Vector ej(prime.size(), 0.0);
  for (std::size_t j = 0; j < prime.size(); ++j) {
    ej[j] = 1.0;
    const PrimeExpansion phi(prime, ej);
    for (std::size_t i = 0; i < nu; ++i) a(i, j) = apply_functional(ref_nodes[i], kref, phi);
    ej[j] = 0.0;
  }
  NodalBasis ref_basis{transpose(invert(a)), prime};

  const std::vector<Functional> phys_nodes = element_nodes(el.kind, el.degree, k);
  DenseMatrix b(nu, nu);
  Vector unit(nu, 0.0);
  for (std::size_t j = 0; j < nu; ++j) {
    unit[j] = 1.0;
    const PulledBackExpansion pb(ref_basis, map, unit);
    for (std::size_t i = 0; i < nu; ++i) b(i, j) = apply_functional(phys_nodes[i], k, pb);
    unit[j] = 0.0;
  }
  try {
    TransformMatrix t;
    t.M = transpose(invert(b));
    return t;
  } catch (const SingularMatrix&) {
    throw SingularB("oracle_transform: B matrix singular (broken node set or map)");
  }
}

/// One endpoint datum of a univariate interpolation rule on [-1, 1].
struct EndpointFunctional {
  double x = 1.0;  // -1 or +1
  int order = 0;   // 0 value, 1 first derivative, 2 second derivative
};

enum class UnivariateTarget {
  DerivativeAtZero,           // p'(0)
  LegendreMomentOfDerivative  // integral of p'(x) L_n(x) over [-1, 1]
};

/// Regenerates the endpoint-data rules by asserting exactness on the
/// monomial basis 1, x, ..., x^degree and solving the resulting system in
/// least-squares (normal equation) form; the systems used here are
/// consistent, so the solution is exact.
inline Vector derive_univariate_rule(int poly_degree, std::span<const EndpointFunctional> data,
                                     UnivariateTarget target, int legendre_degree = 4) {
  const std::size_t m = std::size_t(poly_degree) + 1, nd = data.size();
  DenseMatrix a(m, nd);
  Vector t(m, 0.0);
  auto dpow = [](double x, int k, int order) {
    double c = 1.0;
    for (int d = 0; d < order; ++d) c *= (k - d);
    if (k - order < 0) return 0.0;
    double r = 1.0;
    for (int d = 0; d < k - order; ++d) r *= x;
    return c * r;
  };
  static const IntervalRule gauss = gauss_interval(8);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < nd; ++j) a(k, j) = dpow(data[j].x, int(k), data[j].order);
    if (target == UnivariateTarget::DerivativeAtZero) {
      t[k] = (k == 1) ? 1.0 : 0.0;
    } else {
      double s = 0.0;
      for (std::size_t q = 0; q < gauss.points.size(); ++q)
        s += gauss.weights[q] * dpow(gauss.points[q], int(k), 1) *
             legendre_eval(legendre_degree, gauss.points[q]);
      t[k] = s;
    }
  }
  const DenseMatrix at = transpose(a);
  return lu_solve(at * a, at * t);
}

/// Structural nonzero count (entries above tol relative to the largest).
inline int structural_nonzeros(const DenseMatrix& m, double rel_tol = 1e-12) {
  const double scale = std::max(max_abs(m), 1e-300);
  int count = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > rel_tol * scale) ++count;
  return count;
}

/// Nonzero entries that are not structurally unit; for Hermite this counts
/// the twelve Jacobian-block entries and skips the four exact ones on the
/// value rows, matching the multiply cost of applying M.
inline int non_unit_structural_nonzeros(const DenseMatrix& m, double rel_tol = 1e-12) {
  const double scale = std::max(max_abs(m), 1e-300);
  int count = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (std::abs(v) > rel_tol * scale && std::abs(v - 1.0) > rel_tol) ++count;
    }
  return count;
}

}  // namespace fet
