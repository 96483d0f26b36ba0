#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fet {

using Vector = std::vector<double>;

struct SingularMatrix : std::runtime_error {
  explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};
struct NotSymmetric : std::runtime_error {
  explicit NotSymmetric(const std::string& what) : std::runtime_error(what) {}
};
struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};
struct MaxIterations : std::runtime_error {
  explicit MaxIterations(const std::string& what) : std::runtime_error(what) {}
};

/// Dense row-major matrix of doubles.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  const double* row(std::size_t i) const { return a_.data() + i * cols_; }
  double* row(std::size_t i) { return a_.data() + i * cols_; }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      double* crow = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  return c;
}

inline Vector operator*(const DenseMatrix& a, const Vector& x) {
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const double* arow = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) s += arow[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline double norm_inf(const Vector& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline double norm2(const Vector& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double dot(const Vector& x, const Vector& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

/// LU factorization with partial pivoting, kept for repeated solves.
struct LuFactorization {
  DenseMatrix lu;
  std::vector<std::size_t> perm;
};

inline LuFactorization lu_factor(DenseMatrix a, double pivot_threshold = 1e-13) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw SingularMatrix("lu_factor: matrix not square");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > best) { best = std::abs(a(i, k)); p = i; }
    if (best <= pivot_threshold) throw SingularMatrix("lu_factor: pivot below threshold");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(perm[k], perm[p]);
    }
    const double inv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a(i, k) * inv;
      a(i, k) = m;
      if (m == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
    }
  }
  return {std::move(a), std::move(perm)};
}

inline Vector lu_solve(const LuFactorization& f, const Vector& b) {
  const std::size_t n = f.lu.rows();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu(ii, j) * x[j];
    x[ii] = s / f.lu(ii, ii);
  }
  return x;
}

inline Vector lu_solve(const DenseMatrix& a, const Vector& b) {
  return lu_solve(lu_factor(a), b);
}

inline DenseMatrix invert(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  const LuFactorization f = lu_factor(a);
  DenseMatrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    Vector col = lu_solve(f, e);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

namespace detail {

/// Cyclic Jacobi sweeps; adequate for the small matrices it is used on.
inline std::vector<double> jacobi_eigenvalues(DenseMatrix a) {
  const std::size_t n = a.rows();
  const double scale = std::max(max_abs(a), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= 1e-15 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-18 * scale) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Householder reduction to tridiagonal form (eigenvalues only).
inline void tridiagonalize(DenseMatrix& a, Vector& d, Vector& e) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = (f >= 0.0 ? -std::sqrt(h) : std::sqrt(h));
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
}

/// Implicit-shift QL on a symmetric tridiagonal matrix; eigenvalues in d.
inline void tridiagonal_ql(Vector& d, Vector& e) {
  const std::size_t n = d.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (++iter == 50) throw MaxIterations("tridiagonal_ql: too many iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          double f = s * e[ii];
          const double b = c * e[ii];
          r = std::hypot(f, g);
          e[ii + 1] = r;
          if (r == 0.0) {
            d[ii + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[ii + 1] - p;
          r = (d[ii] - g) * s + 2.0 * c * b;
          p = s * r;
          d[ii + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && m >= l + 2) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
}

}  // namespace detail

/// All eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> symmetric_eigenvalues(const DenseMatrix& a) {
  if (a.rows() <= 48) return detail::jacobi_eigenvalues(a);
  DenseMatrix w = a;
  Vector d, e;
  detail::tridiagonalize(w, d, e);
  detail::tridiagonal_ql(d, e);
  return d;
}

/// lambda_max / lambda_min for a symmetric positive definite matrix.
inline double condition_number_spd(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw NotSymmetric("condition_number_spd: matrix not square");
  const double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-10 * scale)
        throw NotSymmetric("condition_number_spd: matrix not symmetric");
  const std::vector<double> ev = symmetric_eigenvalues(a);
  if (ev.front() <= 0.0) throw NotPositiveDefinite("condition_number_spd: lambda_min <= 0");
  return ev.back() / ev.front();
}

/// Least-squares slope of log(err) against log(h).
inline double fit_loglog_slope(const Vector& hs, const Vector& errs) {
  const std::size_t n = hs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(hs[i]);
    my += std::log(errs[i]);
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(hs[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errs[i]) - my);
  }
  return sxy / sxx;
}

/// Compressed-row sparse matrix.
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
               std::vector<std::size_t> col_ind, std::vector<double> values)
      : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)),
        col_ind_(std::move(col_ind)), values_(std::move(values)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_ind() const { return col_ind_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool structurally_symmetric() const { return structurally_symmetric_; }

  /// Sets the symmetric-structure flag after an explicit pattern check.
  bool verify_structural_symmetry() {
    structurally_symmetric_ = false;
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        const std::size_t j = col_ind_[k];
        bool found = false;
        for (std::size_t k2 = row_ptr_[j]; k2 < row_ptr_[j + 1]; ++k2)
          if (col_ind_[k2] == i) { found = true; break; }
        if (!found) return false;
      }
    structurally_symmetric_ = true;
    return true;
  }

  void multiply(const Vector& x, Vector& y) const {
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        s += values_[k] * x[col_ind_[k]];
      y[i] = s;
    }
  }

  Vector operator*(const Vector& x) const {
    Vector y(rows_);
    multiply(x, y);
    return y;
  }

  double coeff(std::size_t i, std::size_t j) const {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      if (col_ind_[k] == j) return values_[k];
    return 0.0;
  }

  DenseMatrix to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        d(i, col_ind_[k]) += values_[k];
    return d;
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_ind_;
  std::vector<double> values_;
  bool structurally_symmetric_ = false;
};

/// Coordinate-triplet accumulator compressed into CSR with duplicate summation.
class TripletBuilder {
public:
  void reserve(std::size_t n) { trips_.reserve(n); }

  void add(std::size_t i, std::size_t j, double v) { trips_.push_back({i, j, v}); }

  SparseMatrix compress(std::size_t rows, std::size_t cols) const {
    std::vector<std::size_t> count(rows + 1, 0);
    for (const auto& t : trips_) ++count[t.i + 1];
    for (std::size_t i = 0; i < rows; ++i) count[i + 1] += count[i];
    std::vector<std::size_t> cind(trips_.size());
    std::vector<double> vals(trips_.size());
    {
      std::vector<std::size_t> next(count.begin(), count.end() - 1);
      for (const auto& t : trips_) {
        const std::size_t k = next[t.i]++;
        cind[k] = t.j;
        vals[k] = t.v;
      }
    }
    std::vector<std::size_t> row_ptr(rows + 1, 0);
    std::vector<std::size_t> out_cind;
    std::vector<double> out_vals;
    out_cind.reserve(trips_.size());
    out_vals.reserve(trips_.size());
    std::vector<std::pair<std::size_t, double>> rowbuf;
    for (std::size_t i = 0; i < rows; ++i) {
      rowbuf.clear();
      for (std::size_t k = count[i]; k < count[i + 1]; ++k)
        rowbuf.emplace_back(cind[k], vals[k]);
      std::sort(rowbuf.begin(), rowbuf.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t k = 0; k < rowbuf.size();) {
        const std::size_t j = rowbuf[k].first;
        double s = 0.0;
        while (k < rowbuf.size() && rowbuf[k].first == j) s += rowbuf[k++].second;
        out_cind.push_back(j);
        out_vals.push_back(s);
      }
      row_ptr[i + 1] = out_cind.size();
    }
    return SparseMatrix(rows, cols, std::move(row_ptr), std::move(out_cind), std::move(out_vals));
  }

private:
  struct Triplet { std::size_t i, j; double v; };
  std::vector<Triplet> trips_;
};

/// Jacobi-preconditioned conjugate gradients for SPD systems.
inline Vector cg_solve(const SparseMatrix& a, const Vector& b, double tol = 1e-12) {
  const std::size_t n = a.rows();
  const double bnorm = norm2(b);
  Vector x(n, 0.0);
  if (bnorm == 0.0) return x;
  Vector dinv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    dinv[i] = (d > 0.0) ? 1.0 / d : 1.0;
  }
  Vector r = b, z(n), p(n), q(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
  p = z;
  double rz = dot(r, z);
  const std::size_t max_it = 50 * n;
  for (std::size_t it = 0; it < max_it; ++it) {
    a.multiply(p, q);
    const double pq = dot(p, q);
    if (pq <= 0.0) throw NotPositiveDefinite("cg_solve: matrix not positive definite");
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (norm2(r) <= tol * bnorm) return x;
    for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw MaxIterations("cg_solve: did not converge within 50*dim iterations");
}

/// Banded Cholesky factorization of an SPD matrix (used for shift-invert).
class BandCholesky {
public:
  explicit BandCholesky(const SparseMatrix& a) : n_(a.rows()) {
    bw_ = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
        const std::size_t j = a.col_ind()[k];
        if (j <= i) bw_ = std::max(bw_, i - j);
      }
    band_.assign((bw_ + 1) * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
        const std::size_t j = a.col_ind()[k];
        if (j <= i) at(i - j, j) = a.values()[k];
      }
    factor();
  }

  std::size_t bandwidth() const { return bw_; }

  Vector solve(Vector b) const {
    for (std::size_t j = 0; j < n_; ++j) {
      b[j] /= at(0, j);
      const std::size_t hi = std::min(n_ - 1, j + bw_);
      for (std::size_t i = j + 1; i <= hi; ++i) b[i] -= at(i - j, j) * b[j];
    }
    for (std::size_t jj = n_; jj-- > 0;) {
      const std::size_t hi = std::min(n_ - 1, jj + bw_);
      double s = b[jj];
      for (std::size_t i = jj + 1; i <= hi; ++i) s -= at(i - jj, jj) * b[i];
      b[jj] = s / at(0, jj);
    }
    return b;
  }

private:
  double& at(std::size_t k, std::size_t j) { return band_[k * n_ + j]; }
  double at(std::size_t k, std::size_t j) const { return band_[k * n_ + j]; }

  void factor() {
    for (std::size_t j = 0; j < n_; ++j) {
      double s = at(0, j);
      const std::size_t lo = (j > bw_) ? j - bw_ : 0;
      for (std::size_t k = lo; k < j; ++k) {
        const double l = at(j - k, k);
        s -= l * l;
      }
      if (s <= 0.0) throw NotPositiveDefinite("BandCholesky: matrix not positive definite");
      const double ljj = std::sqrt(s);
      at(0, j) = ljj;
      const std::size_t hi = std::min(n_ - 1, j + bw_);
      for (std::size_t i = j + 1; i <= hi; ++i) {
        double t = at(i - j, j);
        const std::size_t lo2 = (i > bw_) ? i - bw_ : 0;
        for (std::size_t k = std::max(lo, lo2); k < j; ++k) t -= at(i - k, k) * at(j - k, k);
        at(i - j, j) = t / ljj;
      }
    }
  }

  std::size_t n_ = 0, bw_ = 0;
  std::vector<double> band_;
};

namespace detail {

/// Largest eigenvalue via Lanczos with full reorthogonalization.
template <class Apply>
inline double lanczos_largest(std::size_t n, const Apply& apply, std::size_t max_steps = 400,
                              double tol = 1e-10) {
  max_steps = std::min(max_steps, n);
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> vs;
  Vector v(n);
  for (double& vi : v) vi = u(rng);
  double nv = norm2(v);
  for (double& vi : v) vi /= nv;
  vs.push_back(v);
  Vector alpha, beta;
  Vector w(n);
  double prev = 0.0;
  int stable = 0;
  for (std::size_t j = 0; j < max_steps; ++j) {
    apply(vs[j], w);
    if (j > 0)
      for (std::size_t i = 0; i < n; ++i) w[i] -= beta[j - 1] * vs[j - 1][i];
    const double a = dot(vs[j], w);
    alpha.push_back(a);
    for (std::size_t i = 0; i < n; ++i) w[i] -= a * vs[j][i];
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& q : vs) {
        const double c = dot(q, w);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * q[i];
      }
    const double b = norm2(w);
    Vector d = alpha, e(alpha.size(), 0.0);
    for (std::size_t i = 1; i < alpha.size(); ++i) e[i] = beta[i - 1];
    tridiagonal_ql(d, e);
    const double theta = d.back();
    if (j >= 8) {
      if (std::abs(theta - prev) <= tol * std::max(std::abs(theta), 1e-300)) {
        if (++stable >= 4) return theta;
      } else {
        stable = 0;
      }
    }
    prev = theta;
    if (b <= 1e-13 * std::abs(theta)) return theta;
    beta.push_back(b);
    for (double& wi : w) wi /= b;
    vs.push_back(w);
  }
  return prev;
}

}  // namespace detail

/// Extreme eigenvalues {lambda_min, lambda_max} of a sparse SPD matrix.
/// lambda_max by Lanczos on A, lambda_min by Lanczos on A^{-1} through a
/// banded Cholesky factorization.
inline std::pair<double, double> spd_extreme_eigenvalues(const SparseMatrix& a) {
  const std::size_t n = a.rows();
  const double lmax = detail::lanczos_largest(
      n, [&](const Vector& x, Vector& y) { a.multiply(x, y); });
  const BandCholesky chol(a);
  const double mu_max = detail::lanczos_largest(
      n, [&](const Vector& x, Vector& y) { y = chol.solve(x); });
  return {1.0 / mu_max, lmax};
}

inline double condition_number_spd_sparse(const SparseMatrix& a) {
  const auto [lmin, lmax] = spd_extreme_eigenvalues(a);
  if (lmin <= 0.0) throw NotPositiveDefinite("condition_number_spd_sparse: lambda_min <= 0");
  return lmax / lmin;
}

}  // namespace fet
