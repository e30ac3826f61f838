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

#include "repkit/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace repkit::qp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double objective(const Eigen::MatrixXd& P, const Eigen::VectorXd& c,
                 double constant, const Eigen::VectorXd& y) {
  return 0.5 * y.dot(P * y) + c.dot(y) + constant;
}

// Basis of the kernel of C (rows = working-set normals).  Columns orthonormal.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& C, int n, double tol) {
  if (C.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double thresh = tol * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++rank;
  if (rank >= n) return Eigen::MatrixXd(n, 0);
  return svd.matrixV().rightCols(n - rank);
}

struct ActiveSetState {
  std::vector<int> working;           // row indices, equalities first
  std::vector<std::uint8_t> in_set;   // per-row membership
};

// Primal active-set loop for min 1/2 y'Py + c'y s.t. Gy <= g (equality rows
// held in the working set permanently).  `y` must be feasible on entry.
Result active_set(const Eigen::MatrixXd& P, const Eigen::VectorXd& c,
                  double constant, const Eigen::MatrixXd& G,
                  const Eigen::VectorXd& g,
                  const std::vector<std::uint8_t>& equality,
                  Eigen::VectorXd y, const Options& options) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(g.size());
  const double feas_tol = options.feas_tol;
  const double opt_tol = options.opt_tol;
  const int max_iter = options.max_iterations > 0
                           ? options.max_iterations
                           : 200 + 30 * (n + m);

  ActiveSetState st;
  st.in_set.assign(m, 0);
  // Equalities always live in the working set.
  for (int i = 0; i < m; ++i) {
    if (!equality.empty() && equality[i]) {
      st.working.push_back(i);
      st.in_set[i] = 1;
    }
  }
  // Greedily add independent active inequality rows (smallest index first).
  {
    Eigen::MatrixXd stacked(0, n);
    for (int i : st.working) {
      stacked.conservativeResize(stacked.rows() + 1, n);
      stacked.row(stacked.rows() - 1) = G.row(i);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    int rank = 0;
    if (stacked.rows() > 0) {
      qr.compute(stacked.transpose());
      rank = static_cast<int>(qr.rank());
    }
    for (int i = 0; i < m; ++i) {
      if (st.in_set[i]) continue;
      const double resid = G.row(i).dot(y) - g[i];
      if (std::abs(resid) > feas_tol * (1.0 + std::abs(g[i]))) continue;
      Eigen::MatrixXd trial(stacked.rows() + 1, n);
      trial << stacked, G.row(i);
      qr.compute(trial.transpose());
      if (static_cast<int>(qr.rank()) > rank) {
        stacked = trial;
        rank += 1;
        st.working.push_back(i);
        st.in_set[i] = 1;
      }
    }
  }

  Result res;
  res.multipliers = Eigen::VectorXd::Zero(m);

  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;
    const Eigen::VectorXd grad = P * y + c;

    Eigen::MatrixXd C(static_cast<int>(st.working.size()), n);
    for (int k = 0; k < C.rows(); ++k) C.row(k) = G.row(st.working[k]);

    const Eigen::MatrixXd NB = kernel_basis(C, n, opt_tol);
    const int k = static_cast<int>(NB.cols());

    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd ray_dir;
    if (k > 0) {
      const Eigen::MatrixXd H = NB.transpose() * P * NB;
      const Eigen::VectorXd rho = NB.transpose() * grad;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
      const auto& lam = es.eigenvalues();
      const auto& V = es.eigenvectors();
      const double lam_max = lam.size() ? std::max(std::abs(lam[0]), std::abs(lam[lam.size() - 1])) : 0.0;
      const double eig_tol = opt_tol * std::max(1.0, lam_max);

      Eigen::VectorXd p_red = Eigen::VectorXd::Zero(k);
      for (int i = 0; i < k; ++i) {
        const double s = V.col(i).dot(rho);
        if (lam[i] > eig_tol) {
          p_red -= (s / lam[i]) * V.col(i);
        } else if (std::abs(s) > opt_tol * (1.0 + grad.cwiseAbs().maxCoeff())) {
          // Zero-curvature descent direction: the face is unbounded below.
          ray_dir = NB * (-(s > 0 ? 1.0 : -1.0) * V.col(i));
          break;
        }
      }
      if (ray_dir.size() == 0) p = NB * p_red;
    }

    if (ray_dir.size() > 0) {
      ray_dir.normalize();
      double alpha = kInf;
      int blocking = -1;
      for (int i = 0; i < m; ++i) {
        if (st.in_set[i]) continue;
        const double gd = G.row(i).dot(ray_dir);
        if (gd > opt_tol) {
          const double a = (g[i] - G.row(i).dot(y)) / gd;
          if (a < alpha - 1e-14) {
            alpha = a;
            blocking = i;
          }
        }
      }
      if (blocking < 0) {
        res.status = Status::kUnbounded;
        res.y = y;
        res.ray = ray_dir;
        res.value = -kInf;
        return res;
      }
      y += std::max(alpha, 0.0) * ray_dir;
      st.working.push_back(blocking);
      st.in_set[blocking] = 1;
      continue;
    }

    if (p.lpNorm<Eigen::Infinity>() > opt_tol) {
      double alpha = 1.0;
      int blocking = -1;
      for (int i = 0; i < m; ++i) {
        if (st.in_set[i]) continue;
        const double gp = G.row(i).dot(p);
        if (gp > opt_tol) {
          const double a = (g[i] - G.row(i).dot(y)) / gp;
          if (a < alpha - 1e-14) {
            alpha = a;
            blocking = i;
          }
        }
      }
      y += std::max(alpha, 0.0) * p;
      if (blocking >= 0) {
        st.working.push_back(blocking);
        st.in_set[blocking] = 1;
      }
      continue;
    }

    // Stationary on the current face: multipliers decide optimality.
    Eigen::VectorXd lambda;
    if (C.rows() > 0) {
      lambda = C.transpose()
                   .completeOrthogonalDecomposition()
                   .solve(-grad)
                   .eval();
      const double kkt_resid =
          (C.transpose() * lambda + grad).lpNorm<Eigen::Infinity>();
      if (kkt_resid > 1e-6 * (1.0 + grad.lpNorm<Eigen::Infinity>())) {
        throw SolverError("active-set: stationarity residual unresolved");
      }
    }
    int drop = -1;
    for (int idx = 0; idx < static_cast<int>(st.working.size()); ++idx) {
      const int row = st.working[idx];
      const bool is_eq = !equality.empty() && equality[row];
      if (is_eq) continue;
      if (lambda[idx] < -opt_tol * 10) {
        if (drop < 0 || row < st.working[drop]) drop = idx;
      }
    }
    if (drop >= 0) {
      st.in_set[st.working[drop]] = 0;
      st.working.erase(st.working.begin() + drop);
      continue;
    }

    res.status = Status::kOptimal;
    res.y = y;
    res.value = objective(P, c, constant, y);
    for (int idx = 0; idx < static_cast<int>(st.working.size()); ++idx) {
      const int row = st.working[idx];
      const bool is_eq = !equality.empty() && equality[row];
      res.multipliers[row] = is_eq ? lambda[idx] : std::max(lambda[idx], 0.0);
    }
    return res;
  }

  res.status = Status::kIterationLimit;
  res.y = y;
  res.value = objective(P, c, constant, y);
  return res;
}

// Phase 1: minimize total violation with one slack per row.
Result phase_one(const Eigen::MatrixXd& G, const Eigen::VectorXd& g,
                 const std::vector<std::uint8_t>& equality, int n,
                 const Options& options) {
  const int m = static_cast<int>(g.size());
  Result res;
  if (m == 0) {
    res.status = Status::kOptimal;
    res.y = Eigen::VectorXd::Zero(n);
    res.value = 0.0;
    res.multipliers = Eigen::VectorXd();
    return res;
  }

  // Variables (y, s); equality rows contribute two inequality copies sharing
  // a slack, so s_j >= |E_j y - b_j|.
  int rows = 0;
  for (int i = 0; i < m; ++i)
    rows += (!equality.empty() && equality[i]) ? 2 : 1;
  rows += m;  // s >= 0

  Eigen::MatrixXd Gp = Eigen::MatrixXd::Zero(rows, n + m);
  Eigen::VectorXd gp = Eigen::VectorXd::Zero(rows);
  int r = 0;
  for (int i = 0; i < m; ++i) {
    Gp.block(r, 0, 1, n) = G.row(i);
    Gp(r, n + i) = -1.0;
    gp[r] = g[i];
    ++r;
    if (!equality.empty() && equality[i]) {
      Gp.block(r, 0, 1, n) = -G.row(i);
      Gp(r, n + i) = -1.0;
      gp[r] = -g[i];
      ++r;
    }
  }
  for (int i = 0; i < m; ++i) {
    Gp(r, n + i) = -1.0;
    gp[r] = 0.0;
    ++r;
  }

  Eigen::VectorXd cp = Eigen::VectorXd::Zero(n + m);
  cp.tail(m).setOnes();

  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(n + m);
  for (int i = 0; i < m; ++i) {
    const bool is_eq = !equality.empty() && equality[i];
    y0[n + i] = is_eq ? std::abs(g[i]) : std::max(0.0, -g[i]);
  }

  Options opt = options;
  opt.max_iterations = options.max_iterations > 0
                           ? options.max_iterations
                           : 200 + 30 * (n + m + rows);
  const Eigen::MatrixXd Pzero = Eigen::MatrixXd::Zero(n + m, n + m);
  Result lp = active_set(Pzero, cp, 0.0, Gp, gp, {}, y0, opt);
  if (lp.status == Status::kIterationLimit) return lp;
  if (lp.status != Status::kOptimal)
    throw SolverError("phase-1: unexpected unbounded feasibility program");

  const double gscale = 1.0 + g.cwiseAbs().maxCoeff();
  if (lp.value > options.feas_tol * gscale * 10) {
    res.status = Status::kInfeasible;
    res.y = lp.y.head(n);
    res.value = lp.value;
    return res;
  }
  res.status = Status::kOptimal;
  res.y = lp.y.head(n);
  res.value = 0.0;
  return res;
}

}  // namespace

Result find_feasible(const Problem& problem, const Options& options) {
  return phase_one(problem.G, problem.g, problem.equality, problem.num_vars(),
                   options);
}

Result solve(const Problem& problem, const Options& options) {
  const int n = problem.num_vars();
  const int m = problem.num_rows();
  if (n <= 0) throw SolverError("solve: empty variable space");
  if (problem.G.rows() != m || (m > 0 && problem.G.cols() != n))
    throw SolverError("solve: inconsistent row dimensions");
  if (!problem.equality.empty() &&
      static_cast<int>(problem.equality.size()) != m)
    throw SolverError("solve: equality flag size mismatch");

  Eigen::MatrixXd P = problem.P;
  if (P.size() == 0) P = Eigen::MatrixXd::Zero(n, n);
  P = 0.5 * (P + P.transpose()).eval();

  Result start = phase_one(problem.G, problem.g, problem.equality, n, options);
  if (start.status != Status::kOptimal) return start;

  Eigen::VectorXd y = start.y;
  // Tighten equality rows before the main loop.
  if (!problem.equality.empty() && m > 0) {
    std::vector<int> eq_rows;
    for (int i = 0; i < m; ++i)
      if (problem.equality[i]) eq_rows.push_back(i);
    if (!eq_rows.empty()) {
      Eigen::MatrixXd E(static_cast<int>(eq_rows.size()), n);
      Eigen::VectorXd b(static_cast<int>(eq_rows.size()));
      for (int k = 0; k < E.rows(); ++k) {
        E.row(k) = problem.G.row(eq_rows[k]);
        b[k] = problem.g[eq_rows[k]];
      }
      y -= E.completeOrthogonalDecomposition().solve(E * y - b);
    }
  }

  Result res = active_set(P, problem.c, problem.constant, problem.G, problem.g,
                          problem.equality, y, options);

  const bool is_lp = P.lpNorm<Eigen::Infinity>() == 0.0;
  if (res.status == Status::kOptimal && is_lp && options.lexicographic) {
    // Pin the optimal value, then minimize coordinates in order.  Each pass
    // shrinks the optimal face; the result is the lexicographically smallest
    // optimal vertex up to solver tolerance.
    Problem sub;
    sub.G = Eigen::MatrixXd(m + n + 1, n);
    sub.g = Eigen::VectorXd(m + n + 1);
    sub.equality.assign(m + n + 1, 0);
    sub.G.topRows(m) = problem.G;
    sub.g.head(m) = problem.g;
    for (int i = 0; i < m; ++i)
      sub.equality[i] = problem.equality.empty() ? 0 : problem.equality[i];
    sub.G.row(m) = problem.c.transpose();
    sub.g[m] = problem.c.dot(res.y) + options.opt_tol;
    int rows_used = m + 1;
    Eigen::VectorXd yy = res.y;
    Options lex_opts = options;
    lex_opts.lexicographic = false;
    for (int kcoord = 0; kcoord < n; ++kcoord) {
      Problem cur;
      cur.G = sub.G.topRows(rows_used);
      cur.g = sub.g.head(rows_used);
      cur.equality.assign(sub.equality.begin(),
                          sub.equality.begin() + rows_used);
      cur.c = Eigen::VectorXd::Zero(n);
      cur.c[kcoord] = 1.0;
      Result step = solve(cur, lex_opts);
      if (step.status != Status::kOptimal) break;
      yy = step.y;
      if (rows_used < m + n + 1) {
        sub.G.row(rows_used).setZero();
        sub.G(rows_used, kcoord) = 1.0;
        sub.g[rows_used] = yy[kcoord] + options.opt_tol;
        ++rows_used;
      }
    }
    res.y = yy;
    res.value = objective(P, problem.c, problem.constant, res.y);
  }
  return res;
}

}  // namespace repkit::qp
