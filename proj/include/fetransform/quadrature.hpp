#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fetransform/geometry.hpp"

namespace fet {

struct UnsupportedDegree : std::runtime_error {
  explicit UnsupportedDegree(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature on [-1, 1].
struct IntervalRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;  // polynomial exactness
};

/// Quadrature on the reference triangle (0,0)-(1,0)-(0,1).
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;
};

namespace detail {

/// Legendre P_n and its derivative at x.
inline std::pair<double, double> legendre_pair(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p0 = 1.0, p1 = x;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace detail

/// n-point Gauss-Legendre rule, exact through degree 2n-1. Nodes are the
/// Legendre roots found by Newton iteration from Chebyshev estimates.
inline IntervalRule gauss_interval(int n) {
  IntervalRule rule;
  rule.degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = -std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_pair(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const auto [p, dp] = detail::legendre_pair(n, x);
    (void)p;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = x;
    rule.weights[i] = w;
    rule.points[n - 1 - i] = -x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

/// Collapsed (Duffy) tensor Gauss rule on the reference triangle with the
/// requested polynomial exactness. The collapse x = u, y = v(1-u) raises the
/// u-degree by one, which the point count accounts for.
inline QuadratureRule triangle_rule(int degree) {
  if (degree < 0 || degree > 20)
    throw UnsupportedDegree("triangle_rule: degree must be in [0, 20]");
  const int nu = (degree + 3) / 2;  // 2nu-1 >= degree+1
  const int nv = (degree + 2) / 2;  // 2nv-1 >= degree
  const IntervalRule gu = gauss_interval(nu);
  const IntervalRule gv = gauss_interval(nv);
  QuadratureRule rule;
  rule.degree = degree;
  rule.points.reserve(std::size_t(nu) * nv);
  rule.weights.reserve(std::size_t(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    const double u = 0.5 * (gu.points[i] + 1.0);
    const double wu = 0.5 * gu.weights[i];
    for (int j = 0; j < nv; ++j) {
      const double v = 0.5 * (gv.points[j] + 1.0);
      const double wv = 0.5 * gv.weights[j];
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(wu * wv * (1.0 - u));
    }
  }
  return rule;
}

}  // namespace fet
