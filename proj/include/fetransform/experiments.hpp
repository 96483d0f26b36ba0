#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fetransform/assembly.hpp"

namespace fet {

/// One family's sweep over mesh sizes for a single metric (an L2 error or a
/// mass-matrix condition number).
struct StudyResult {
  std::string family;
  std::string metric;  // "l2_error" or "condition_number"
  std::vector<int> ns;
  std::vector<long> dofs;
  std::vector<double> values;
  std::vector<double> rate_succ;  // between consecutive refinements
  double rate_fit = 0.0;          // global log-log fit

  /// Convergence order (errors, against h) or growth exponent
  /// (condition numbers, against N); both positive in the expected regime.
  void finish_rates() {
    rate_succ.clear();
    const bool growth = (metric == "condition_number");
    for (std::size_t i = 1; i < values.size(); ++i) {
      const double r = std::log(values[i] / values[i - 1]) / std::log(double(ns[i]) / ns[i - 1]);
      rate_succ.push_back(growth ? r : -r);
    }
    Vector xs(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i)
      xs[i] = growth ? double(ns[i]) : 1.0 / double(ns[i]);
    rate_fit = (values.size() >= 2) ? fit_loglog_slope(xs, values) : 0.0;
  }
};

enum class SolverKind { Auto, Cg, Dense };

inline SolverKind solver_from_string(const std::string& s) {
  if (s == "cg") return SolverKind::Cg;
  if (s == "dense") return SolverKind::Dense;
  return SolverKind::Auto;
}

struct StudyOptions {
  SolverKind solver = SolverKind::Auto;
  double tol = 1e-12;
  bool scaled = true;
};

inline Vector solve_spd(const SparseMatrix& a, const Vector& b, SolverKind solver, double tol) {
  const bool dense = (solver == SolverKind::Dense) ||
                     (solver == SolverKind::Auto && a.rows() <= 3000);
  if (dense) return lu_solve(a.to_dense(), b);
  return cg_solve(a, b, tol);
}

inline ElementKind family_from_string(const std::string& s) {
  if (s == "lagrange3" || s == "lagrange") return ElementKind::Lagrange;
  if (s == "hermite") return ElementKind::CubicHermite;
  if (s == "morley") return ElementKind::Morley;
  if (s == "argyris") return ElementKind::Argyris;
  if (s == "bell") return ElementKind::Bell;
  throw std::runtime_error("unknown family: " + s);
}

inline std::string family_name(ElementKind f) {
  switch (f) {
    case ElementKind::Lagrange: return "lagrange3";
    case ElementKind::CubicHermite: return "hermite";
    case ElementKind::Morley: return "morley";
    case ElementKind::Argyris: return "argyris";
    case ElementKind::Bell: return "bell";
    case ElementKind::BellExtended: return "bell_extended";
  }
  return "?";
}

namespace detail {

/// Permutation sorting DOFs by geometric anchor, which keeps the matrix
/// bandwidth proportional to one mesh row for the banded factorization.
inline std::vector<std::size_t> anchor_permutation(const DofMap& dm) {
  std::vector<std::size_t> order(dm.info.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Vec2 pa = dm.info[a].anchor, pb = dm.info[b].anchor;
    if (pa.y != pb.y) return pa.y < pb.y;
    if (pa.x != pb.x) return pa.x < pb.x;
    return a < b;
  });
  std::vector<std::size_t> perm(order.size());  // old -> new
  for (std::size_t k = 0; k < order.size(); ++k) perm[order[k]] = k;
  return perm;
}

inline SparseMatrix permute_symmetric(const SparseMatrix& a, const std::vector<std::size_t>& perm) {
  TripletBuilder t;
  const auto& rp = a.row_ptr();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
      t.add(perm[i], perm[a.col_ind()[k]], a.values()[k]);
  return t.compress(a.rows(), a.cols());
}

}  // namespace detail

/// Condition number of a sparse SPD matrix: dense symmetric eigensolve up to
/// a size cutoff, Lanczos extremes with a banded shift-invert beyond it.
inline double mass_condition_number(const SparseMatrix& a, const DofMap& dm,
                                    std::size_t dense_cutoff = 1500) {
  if (a.rows() <= dense_cutoff) return condition_number_spd(a.to_dense());
  const SparseMatrix p = detail::permute_symmetric(a, detail::anchor_permutation(dm));
  return condition_number_spd_sparse(p);
}

/// Mass-matrix conditioning sweep for Hermite with the cubic Lagrange
/// baseline; with scaling on, derivative DOFs are rescaled by the local h.
inline std::vector<StudyResult> run_conditioning(const std::vector<int>& ns, bool scaled) {
  std::vector<StudyResult> out;
  for (const ElementKind family : {ElementKind::CubicHermite, ElementKind::Lagrange}) {
    StudyResult res;
    res.family = family_name(family);
    res.metric = "condition_number";
    for (const int n : ns) {
      const StructuredMesh mesh = build_mesh(n);
      const Space space(family, mesh);
      SparseMatrix m = space.assemble_matrix(Form::mass());
      if (scaled) {
        Vector b(std::size_t(space.ndofs()), 0.0);
        scale_system(m, b, build_scaling(space.dofs(), mesh));
      }
      res.ns.push_back(n);
      res.dofs.push_back(space.ndofs());
      res.values.push_back(mass_condition_number(m, space.dofs()));
    }
    res.finish_rates();
    out.push_back(std::move(res));
  }
  return out;
}

namespace detail {

inline StudyResult run_error_study(ElementKind family, const std::vector<int>& ns,
                                   const Form& form, BoundaryCondition bc,
                                   const std::function<double(Vec2)>& exact,
                                   const std::function<double(Vec2)>& forcing,
                                   const StudyOptions& opt) {
  StudyResult res;
  res.family = family_name(family);
  res.metric = "l2_error";
  for (const int n : ns) {
    const StructuredMesh mesh = build_mesh(n);
    const Space space(family, mesh);
    const int load_degree = 2 * space.degree() + 2;
    SparseMatrix a = space.assemble_matrix(form);
    Vector b = space.assemble_load(forcing, load_degree);
    Vector scale(std::size_t(space.ndofs()), 1.0);
    if (opt.scaled) scale = build_scaling(space.dofs(), mesh);
    scale_system(a, b, scale);
    apply_dirichlet(a, b, constrained_dofs(space.dofs(), mesh, bc));
    const Vector y = solve_spd(a, b, opt.solver, opt.tol);
    const Vector u = unscale_solution(y, scale);
    res.ns.push_back(n);
    res.dofs.push_back(space.ndofs());
    res.values.push_back(space.l2_error(u, exact, load_degree));
  }
  res.finish_rates();
  return res;
}

}  // namespace detail

/// L2 projection of sin(pi x) sin(2 pi y).
inline StudyResult run_projection(ElementKind family, const std::vector<int>& ns,
                                  const StudyOptions& opt = {}) {
  const auto u = [](Vec2 p) { return std::sin(M_PI * p.x) * std::sin(2.0 * M_PI * p.y); };
  return detail::run_error_study(family, ns, Form::mass(), BoundaryCondition::None, u, u, opt);
}

/// Homogeneous Dirichlet Laplace problem with u = sin(2 pi x) sin(2 pi y).
inline StudyResult run_laplace(ElementKind family, const std::vector<int>& ns,
                               const StudyOptions& opt = {}) {
  const auto u = [](Vec2 p) { return std::sin(2.0 * M_PI * p.x) * std::sin(2.0 * M_PI * p.y); };
  const auto f = [](Vec2 p) {
    return 8.0 * M_PI * M_PI * std::sin(2.0 * M_PI * p.x) * std::sin(2.0 * M_PI * p.y);
  };
  return detail::run_error_study(family, ns, Form::stiffness(), BoundaryCondition::Dirichlet, u, f,
                                 opt);
}

/// Clamped plate problem with nu = 0.5 and u = (x(1-x) y(1-y))^2; the
/// forcing is the closed-form biharmonic of u.
inline StudyResult run_plate(ElementKind family, const std::vector<int>& ns,
                             const StudyOptions& opt = {}) {
  const auto a = [](double x) { return x * x - 2.0 * x * x * x + x * x * x * x; };
  const auto app = [](double x) { return 2.0 - 12.0 * x + 12.0 * x * x; };
  const auto u = [a](Vec2 p) { return a(p.x) * a(p.y); };
  const auto f = [a, app](Vec2 p) {
    return 24.0 * a(p.y) + 2.0 * app(p.x) * app(p.y) + 24.0 * a(p.x);
  };
  StudyOptions o = opt;
  if (o.tol > 1e-13) o.tol = 1e-13;
  return detail::run_error_study(family, ns, Form::plate(0.5), BoundaryCondition::Clamped, u, f, o);
}

/// CSV report (family,N,dofs,metric,value) plus a matplotlib script.
inline void emit_report(std::span<const StudyResult> results, const std::string& dir) {
  const std::string csv_path = dir + "/report.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("emit_report: cannot write " + csv_path);
  csv << "family,N,dofs,metric,value\n";
  csv.precision(16);
  for (const StudyResult& r : results) {
    for (std::size_t i = 0; i < r.ns.size(); ++i) {
      csv << r.family << "," << r.ns[i] << "," << r.dofs[i] << "," << r.metric << ","
          << r.values[i] << "\n";
      if (i >= 1)
        csv << r.family << "," << r.ns[i] << "," << r.dofs[i] << ",rate_succ,"
            << r.rate_succ[i - 1] << "\n";
    }
    if (!r.ns.empty())
      csv << r.family << "," << r.ns.back() << "," << r.dofs.back() << ",rate_fit," << r.rate_fit
          << "\n";
  }
  csv.close();
  std::ofstream plot(dir + "/plot.py");
  plot << R"(#!/usr/bin/env python3
"""Log-log plots for the study report (reads report.csv next to this file)."""
import csv
import os
from collections import defaultdict

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
series = defaultdict(list)
with open(os.path.join(here, "report.csv")) as fh:
    for row in csv.DictReader(fh):
        if row["metric"] in ("l2_error", "condition_number"):
            series[(row["family"], row["metric"])].append(
                (int(row["N"]), float(row["value"])))

fig, ax = plt.subplots()
metric = next(iter(series))[1] if series else "value"
for (family, _), pts in sorted(series.items()):
    pts.sort()
    ax.loglog([n for n, _ in pts], [v for _, v in pts], "o-", label=family)
ax.set_xlabel("N")
ax.set_ylabel(metric)
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.savefig(os.path.join(here, "report.png"), dpi=150, bbox_inches="tight")
print("wrote", os.path.join(here, "report.png"))
)";
}

/// Doubling sweep 2, 4, ..., up to nmax.
inline std::vector<int> default_sweep(int nmax) {
  std::vector<int> ns;
  for (int n = 2; n <= nmax; n *= 2) ns.push_back(n);
  return ns;
}

}  // namespace fet
