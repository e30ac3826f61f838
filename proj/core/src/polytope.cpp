// Copyright 2026 The Repkit Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "repkit/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "repkit/solver.hpp"

namespace repkit::poly {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

qp::Problem as_problem(const LinearSystem& sys) {
  qp::Problem p;
  p.c = Eigen::VectorXd::Zero(sys.dim());
  p.G = sys.A;
  p.g = sys.b;
  p.equality = sys.equality;
  return p;
}

// min c'x over sys; returns -inf if unbounded, +inf if infeasible.
double lp_min(const LinearSystem& sys, const Eigen::VectorXd& c, double tol) {
  qp::Problem p = as_problem(sys);
  p.c = c;
  qp::Options opts;
  opts.feas_tol = tol;
  qp::Result r = qp::solve(p, opts);
  switch (r.status) {
    case qp::Status::kOptimal:
      return r.value;
    case qp::Status::kUnbounded:
      return -kInf;
    case qp::Status::kInfeasible:
      return kInf;
    default:
      throw qp::SolverError("lp_min: unresolved");
  }
}

bool row_redundant(const LinearSystem& sys, int row, double tol) {
  // Row is redundant if max A_row x over the others stays <= b_row.
  LinearSystem rest = sys;
  // Relax the row itself to avoid self-support; drop it.
  std::vector<std::uint8_t> eq;
  Eigen::MatrixXd A(sys.rows() - 1, sys.dim());
  Eigen::VectorXd b(sys.rows() - 1);
  int k = 0;
  for (int i = 0; i < sys.rows(); ++i) {
    if (i == row) continue;
    A.row(k) = sys.A.row(i);
    b[k] = sys.b[i];
    eq.push_back(sys.equality.empty() ? 0 : sys.equality[i]);
    ++k;
  }
  rest.A = A;
  rest.b = b;
  rest.equality = eq;
  const double mx = -lp_min(rest, -sys.A.row(row).transpose(), tol);
  if (mx == kInf) return true;  // rest infeasible: anything is redundant
  return mx <= sys.b[row] + tol * (1.0 + std::abs(sys.b[row]));
}

void prune_redundant(LinearSystem& sys, double tol) {
  bool changed = true;
  while (changed && sys.rows() > 1) {
    changed = false;
    for (int i = 0; i < sys.rows(); ++i) {
      const bool is_eq = !sys.equality.empty() && sys.equality[i];
      if (is_eq) continue;
      if (row_redundant(sys, i, tol)) {
        Eigen::MatrixXd A(sys.rows() - 1, sys.dim());
        Eigen::VectorXd b(sys.rows() - 1);
        std::vector<std::uint8_t> eq;
        int k = 0;
        for (int j = 0; j < sys.rows(); ++j) {
          if (j == i) continue;
          A.row(k) = sys.A.row(j);
          b[k] = sys.b[j];
          eq.push_back(sys.equality.empty() ? 0 : sys.equality[j]);
          ++k;
        }
        sys.A = A;
        sys.b = b;
        sys.equality = eq;
        changed = true;
        break;
      }
    }
  }
}

// Eliminate one variable by Fourier-Motzkin (no equality rows present).
LinearSystem fm_eliminate(const LinearSystem& sys, int var, double tol) {
  std::vector<int> pos, neg, zero;
  for (int i = 0; i < sys.rows(); ++i) {
    const double a = sys.A(i, var);
    if (a > tol)
      pos.push_back(i);
    else if (a < -tol)
      neg.push_back(i);
    else
      zero.push_back(i);
  }
  const int n = sys.dim();
  const int out_rows =
      static_cast<int>(zero.size() + pos.size() * neg.size());
  LinearSystem out;
  out.A = Eigen::MatrixXd::Zero(out_rows, n);
  out.b = Eigen::VectorXd::Zero(out_rows);
  out.equality.assign(out_rows, 0);
  int r = 0;
  for (int i : zero) {
    out.A.row(r) = sys.A.row(i);
    out.b[r] = sys.b[i];
    ++r;
  }
  for (int i : pos) {
    for (int j : neg) {
      const double ai = sys.A(i, var);
      const double aj = -sys.A(j, var);
      Eigen::VectorXd row = aj * sys.A.row(i) + ai * sys.A.row(j);
      double rhs = aj * sys.b[i] + ai * sys.b[j];
      const double nn = row.lpNorm<Eigen::Infinity>();
      if (nn > tol) {
        row /= nn;
        rhs /= nn;
      }
      out.A.row(r) = row;
      out.A(r, var) = 0.0;
      out.b[r] = rhs;
      ++r;
    }
  }
  return out;
}

}  // namespace

LinearSystem LinearSystem::Empty(int dim) {
  LinearSystem s;
  s.A = Eigen::MatrixXd::Zero(0, dim);
  s.b = Eigen::VectorXd::Zero(0);
  return s;
}

void LinearSystem::append(const Eigen::VectorXd& normal, double bound,
                          bool eq) {
  const int r = rows();
  A.conservativeResize(r + 1, normal.size());
  A.row(r) = normal.transpose();
  b.conservativeResize(r + 1);
  b[r] = bound;
  equality.resize(r + 1, 0);
  equality[r] = eq ? 1 : 0;
}

bool feasible(const LinearSystem& sys, double tol) {
  if (sys.rows() == 0) return true;
  qp::Options opts;
  opts.feas_tol = tol;
  return qp::find_feasible(as_problem(sys), opts).status ==
         qp::Status::kOptimal;
}

LinearSystem project(const LinearSystem& sys, const std::vector<int>& keep,
                     double tol) {
  const int n = sys.dim();
  std::vector<std::uint8_t> keep_mask(n, 0);
  for (int k : keep) keep_mask[k] = 1;

  // Substitute equality rows out first to keep FM growth down.
  LinearSystem cur = sys;
  if (cur.equality.empty()) cur.equality.assign(cur.rows(), 0);
  bool subst = true;
  while (subst) {
    subst = false;
    for (int i = 0; i < cur.rows() && !subst; ++i) {
      if (!cur.equality[i]) continue;
      for (int v = 0; v < n && !subst; ++v) {
        if (keep_mask[v]) continue;
        const double a = cur.A(i, v);
        if (std::abs(a) <= tol) continue;
        // v = (b_i - sum_{w != v} A_iw x_w) / a; eliminate from every row.
        for (int j = 0; j < cur.rows(); ++j) {
          if (j == i) continue;
          const double f = cur.A(j, v) / a;
          cur.A.row(j) -= f * cur.A.row(i);
          cur.b[j] -= f * cur.b[i];
          cur.A(j, v) = 0.0;
        }
        // Drop row i; variable v is now absent everywhere.
        Eigen::MatrixXd A(cur.rows() - 1, n);
        Eigen::VectorXd b(cur.rows() - 1);
        std::vector<std::uint8_t> eq;
        int k2 = 0;
        for (int j = 0; j < cur.rows(); ++j) {
          if (j == i) continue;
          A.row(k2) = cur.A.row(j);
          b[k2] = cur.b[j];
          eq.push_back(cur.equality[j]);
          ++k2;
        }
        cur.A = A;
        cur.b = b;
        cur.equality = eq;
        subst = true;
      }
    }
  }

  // Remaining equality rows touch only kept variables; expand to row pairs so
  // FM sees a pure inequality system.
  {
    LinearSystem expanded = LinearSystem::Empty(n);
    for (int i = 0; i < cur.rows(); ++i) {
      expanded.append(cur.A.row(i), cur.b[i], false);
      if (cur.equality[i]) expanded.append(-cur.A.row(i), -cur.b[i], false);
    }
    cur = expanded;
  }

  for (int v = 0; v < n; ++v) {
    if (keep_mask[v]) continue;
    bool used = false;
    for (int i = 0; i < cur.rows(); ++i)
      if (std::abs(cur.A(i, v)) > tol) used = true;
    if (!used) continue;
    cur = fm_eliminate(cur, v, tol);
    if (cur.rows() > 64) prune_redundant(cur, tol);
  }
  prune_redundant(cur, tol);

  // Re-index onto the kept coordinates.
  LinearSystem out = LinearSystem::Empty(static_cast<int>(keep.size()));
  for (int i = 0; i < cur.rows(); ++i) {
    Eigen::VectorXd row(keep.size());
    for (int k = 0; k < static_cast<int>(keep.size()); ++k)
      row[k] = cur.A(i, keep[k]);
    if (row.lpNorm<Eigen::Infinity>() <= tol) {
      // 0 <= b must hold, otherwise the projection is empty; keep as marker.
      if (cur.b[i] < -tol) out.append(row, cur.b[i], false);
      continue;
    }
    out.append(row, cur.b[i], false);
  }
  prune_redundant(out, tol);
  return out;
}

RiReport relative_interior_member(const LinearSystem& sys,
                                  const Eigen::VectorXd& point, double tol) {
  RiReport rep;
  rep.in_set = true;
  for (int i = 0; i < sys.rows(); ++i) {
    const double resid = sys.A.row(i).dot(point) - sys.b[i];
    const bool is_eq = !sys.equality.empty() && sys.equality[i];
    const double scale = 1.0 + std::abs(sys.b[i]);
    if (is_eq ? std::abs(resid) > tol * scale : resid > tol * scale) {
      rep.in_set = false;
      rep.in_ri = false;
      rep.note = "point violates row " + std::to_string(i);
      return rep;
    }
  }
  rep.in_ri = true;
  for (int i = 0; i < sys.rows(); ++i) {
    const bool is_eq = !sys.equality.empty() && sys.equality[i];
    if (is_eq) continue;
    const double resid = sys.A.row(i).dot(point) - sys.b[i];
    const double scale = 1.0 + std::abs(sys.b[i]);
    if (resid < -tol * scale) continue;  // inactive
    // Active row: implicit equality iff the row cannot go strictly slack.
    const double mn = lp_min(sys, sys.A.row(i).transpose(), tol);
    if (mn < sys.b[i] - tol * scale) {
      rep.in_ri = false;
      rep.blocking_rows.push_back(i);
    }
  }
  if (!rep.in_ri) rep.note = "point sits on a non-degenerate face";
  return rep;
}

std::pair<double, double> interval_hull(const std::vector<double>& pts) {
  auto [mn, mx] = std::minmax_element(pts.begin(), pts.end());
  return {*mn, *mx};
}

std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> pts) {
  if (pts.size() <= 2) return pts;
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) -
           (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  int k = 0;
  for (const auto& p : pts) {  // lower
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (int i = static_cast<int>(pts.size()) - 2, t = k + 1; i >= 0; --i) {
    const auto& p = pts[i];  // upper
    while (k >= t && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

bool point_in_hull_2d(const std::vector<Eigen::Vector2d>& hull,
                      const Eigen::Vector2d& p, double tol) {
  if (hull.empty()) return false;
  if (hull.size() == 1) return (hull[0] - p).norm() <= tol;
  for (size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    const double cr = (b.x() - a.x()) * (p.y() - a.y()) -
                      (b.y() - a.y()) * (p.x() - a.x());
    if (cr < -tol) return false;
  }
  return true;
}

double dist_point_segment(const Eigen::VectorXd& p, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b) {
  const Eigen::VectorXd ab = b - a;
  const double denom = ab.squaredNorm();
  double t = denom > 0 ? (p - a).dot(ab) / denom : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double directed_hausdorff(const Eigen::MatrixXd& from,
                          const Eigen::MatrixXd& to) {
  if (from.rows() == 0) return 0.0;
  if (to.rows() == 0) return kInf;
  double worst = 0.0;
  for (int i = 0; i < from.rows(); ++i) {
    double best = kInf;
    for (int j = 0; j < to.rows(); ++j)
      best = std::min(best, (from.row(i) - to.row(j)).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace repkit::poly
