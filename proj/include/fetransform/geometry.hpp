#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "fetransform/linalg.hpp"

namespace fet {

struct DegenerateTriangle : std::runtime_error {
  explicit DegenerateTriangle(const std::string& what) : std::runtime_error(what) {}
};

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Mat2 {
  // row-major 2x2
  double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  Vec2 operator*(Vec2 v) const { return {a00 * v.x + a01 * v.y, a10 * v.x + a11 * v.y}; }
  Mat2 operator*(const Mat2& o) const {
    return {a00 * o.a00 + a01 * o.a10, a00 * o.a01 + a01 * o.a11,
            a10 * o.a00 + a11 * o.a10, a10 * o.a01 + a11 * o.a11};
  }
  Mat2 operator*(double s) const { return {a00 * s, a01 * s, a10 * s, a11 * s}; }
  Mat2 transpose() const { return {a00, a10, a01, a11}; }
  double det() const { return a00 * a11 - a01 * a10; }
  Mat2 inverse() const {
    const double d = det();
    return {a11 / d, -a01 / d, -a10 / d, a00 / d};
  }
};

/// Triangle with optional global vertex numbering; the numbering fixes the
/// orientation of edge tangents shared between neighboring cells.
struct Triangle {
  std::array<Vec2, 3> v{};
  std::array<long long, 3> global{0, 1, 2};

  static Triangle reference() {
    return Triangle{{Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}}, {0, 1, 2}};
  }

  double signed_area() const {
    const Vec2 u = v[1] - v[0], w = v[2] - v[0];
    return 0.5 * (u.x * w.y - u.y * w.x);
  }

  double diameter() const {
    return std::max({(v[1] - v[0]).norm(), (v[2] - v[1]).norm(), (v[2] - v[0]).norm()});
  }

  Vec2 barycenter() const {
    return {(v[0].x + v[1].x + v[2].x) / 3.0, (v[0].y + v[1].y + v[2].y) / 3.0};
  }

  void validate() const {
    const double d = diameter();
    if (std::abs(2.0 * signed_area()) <= 1e-14 * d * d)
      throw DegenerateTriangle("triangle has (near-)zero area");
  }
};

/// Affine map F(x) = A x + b taking the physical cell to the reference cell.
struct AffineMap {
  Mat2 A;
  Vec2 b;

  const Mat2& jacobian() const { return A; }
  double det() const { return A.det(); }
  Vec2 apply(Vec2 x) const { return A * x + b; }
  Vec2 apply_inverse(Vec2 xhat) const { return A.inverse() * (xhat - b); }
};

/// Solves the 6x6 system F(v_i) = vhat_i for the map physical -> reference.
inline AffineMap affine_map(const Triangle& k, const Triangle& khat) {
  k.validate();
  khat.validate();
  DenseMatrix m(6, 6);
  Vector rhs(6);
  for (std::size_t i = 0; i < 3; ++i) {
    m(2 * i, 0) = k.v[i].x;
    m(2 * i, 1) = k.v[i].y;
    m(2 * i, 4) = 1.0;
    m(2 * i + 1, 2) = k.v[i].x;
    m(2 * i + 1, 3) = k.v[i].y;
    m(2 * i + 1, 5) = 1.0;
    rhs[2 * i] = khat.v[i].x;
    rhs[2 * i + 1] = khat.v[i].y;
  }
  const Vector s = lu_solve(m, rhs);
  return AffineMap{Mat2{s[0], s[1], s[2], s[3]}, Vec2{s[4], s[5]}};
}

inline AffineMap map_to_reference(const Triangle& k) {
  return affine_map(k, Triangle::reference());
}

/// Unit tangent/normal frame of one edge. Edge i sits opposite vertex i; the
/// tangent runs from the lower- to the higher-numbered global vertex and the
/// normal is R t with R = [[0,1],[-1,0]].
struct EdgeFrame {
  Vec2 tangent, normal, midpoint;
  double length = 0.0;
  int vertex_a = 0, vertex_b = 0;  // local endpoint indices, a = lower global number
};

inline std::array<EdgeFrame, 3> edge_frames(const Triangle& k) {
  k.validate();
  std::array<EdgeFrame, 3> frames;
  for (int i = 0; i < 3; ++i) {
    int a = (i + 1) % 3, b = (i + 2) % 3;
    if (k.global[a] > k.global[b]) std::swap(a, b);
    const Vec2 d = k.v[b] - k.v[a];
    const double len = d.norm();
    const Vec2 t{d.x / len, d.y / len};
    frames[i] = EdgeFrame{t, Vec2{t.y, -t.x}, (k.v[a] + k.v[b]) * 0.5, len, a, b};
  }
  return frames;
}

/// G_i with the normal and tangent in the rows.
inline Mat2 frame_matrix(const EdgeFrame& f) {
  return {f.normal.x, f.normal.y, f.tangent.x, f.tangent.y};
}

}  // namespace fet
