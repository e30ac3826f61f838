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

#include "repkit/conjugate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "repkit/program_builder.hpp"

namespace repkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

ConjugateValue ConjugateEngine::conjugate_full(const ConvexFn& f,
                                               const Eigen::VectorXd& d) const {
  detail::require(static_cast<int>(d.size()) == f.dim(),
                  "conjugate_at: dimension mismatch");
  prog::Builder b;
  const int z0 = b.add_vars(f.dim());
  const int term = b.add_term(f, 1.0, prog::AffineArg::identity(f.dim(), z0));
  for (int i = 0; i < f.dim(); ++i)
    if (d[i] != 0.0) b.obj_linear(z0 + i, -d[i]);

  qp::Options opts;
  opts.opt_tol = tolerance_;
  if (max_pieces_ > 0) opts.max_iterations = max_pieces_;
  const qp::Result res = qp::solve(b.problem(), opts);

  ConjugateValue out;
  switch (res.status) {
    case qp::Status::kOptimal:
      out.value = -res.value;
      out.attained = true;
      out.maximizer = b.term_point(term, res);
      return out;
    case qp::Status::kUnbounded:
      out.value = kInf;
      out.unbounded_ray = res.ray.head(f.dim());
      return out;
    case qp::Status::kInfeasible:
      throw qp::SolverError(
          "conjugate_at: empty domain (function should be proper)");
    default:
      throw qp::SolverError("conjugate_at: unresolved after iteration cap");
  }
}

double ConjugateEngine::conjugate_at_flat(const ConvexFn& f,
                                          const Eigen::VectorXd& d) const {
  return conjugate_full(f, d).value;
}

double ConjugateEngine::conjugate_at(const ConvexFn& f,
                                     const DualPoint& d) const {
  return conjugate_at_flat(f, d.flat());
}

double ConjugateEngine::square_conjugate_at(const ConvexFn& f,
                                            const PairedPoint& z) const {
  return conjugate_at_flat(f, hat(z).flat());
}

ConjugateEngine::BiconjugateReport ConjugateEngine::biconjugate_check(
    const ConvexFn& f, const std::vector<PairedPoint>& samples,
    double tol) const {
  BiconjugateReport rep;
  // Anchor the under-approximation of f* at one subgradient per sample.
  std::vector<Eigen::VectorXd> duals;
  std::vector<double> dual_values;
  for (const PairedPoint& z : samples) {
    const Eigen::VectorXd v = z.flat();
    if (!std::isfinite(f.eval_flat(v))) continue;
    Eigen::VectorXd s = prog::subgradient(f, v);
    duals.push_back(s);
    dual_values.push_back(conjugate_at_flat(f, s));
  }
  for (const PairedPoint& z : samples) {
    const Eigen::VectorXd v = z.flat();
    const double fv = f.eval_flat(v);
    if (!std::isfinite(fv)) continue;
    double best = -kInf;  // max-affine under-approximation of f**
    for (size_t k = 0; k < duals.size(); ++k) {
      if (!std::isfinite(dual_values[k])) continue;
      best = std::max(best, v.dot(duals[k]) - dual_values[k]);
    }
    const double dev = std::abs(fv - best);
    if (dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.worst_point = v;
    }
  }
  rep.ok = rep.max_deviation <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Symbolic conjugation via the dual lift.

namespace {

struct FlatShape {
  bool has_quadratic = false;
  Eigen::MatrixXd Q;
  Eigen::VectorXd q;
  double r = 0.0;
  std::vector<Eigen::MatrixXd> piece_slopes;   // one matrix per max-affine term
  std::vector<Eigen::VectorXd> piece_offsets;
  poly::LinearSystem ineq_rows;   // inequality part of the indicator
  poly::LinearSystem eq_rows;     // equality part
  double constant = 0.0;          // from affine-free additions (none today)
};

void flatten(const fn_detail::Node& n, FlatShape& out) {
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, fn_detail::MaxAffineData>) {
          out.piece_slopes.push_back(d.slopes);
          out.piece_offsets.push_back(d.offsets);
        } else if constexpr (std::is_same_v<T, fn_detail::QuadraticData>) {
          if (out.has_quadratic)
            throw std::invalid_argument(
                "fenchel_conjugate_fn: multiple quadratic terms unsupported");
          out.has_quadratic = true;
          out.Q = d.Q;
          out.q = d.q;
          out.r = d.r;
        } else if constexpr (std::is_same_v<T, fn_detail::IndicatorData>) {
          for (int i = 0; i < d.rows.rows(); ++i) {
            const bool eq = !d.rows.equality.empty() && d.rows.equality[i];
            (eq ? out.eq_rows : out.ineq_rows)
                .append(d.rows.A.row(i), d.rows.b[i], false);
          }
        } else if constexpr (std::is_same_v<T, fn_detail::AddData>) {
          for (const auto& t : d.terms) flatten(*t, out);
        } else {
          throw std::invalid_argument(
              "fenchel_conjugate_fn: only quadratic + max-affine + indicator "
              "sums are supported");
        }
      },
      n.data);
}

}  // namespace

ConvexFn fenchel_conjugate_fn(const ConvexFn& f) {
  const int n = f.dim();
  FlatShape shape;
  shape.ineq_rows = poly::LinearSystem::Empty(n);
  shape.eq_rows = poly::LinearSystem::Empty(n);
  flatten(f.node(), shape);

  Eigen::MatrixXd Qinv;
  if (shape.has_quadratic) {
    Eigen::LLT<Eigen::MatrixXd> llt(shape.Q);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument(
          "fenchel_conjugate_fn: quadratic must be positive definite");
    Qinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  }

  // Multipliers: one simplex block per max-affine term, one nonnegative block
  // for indicator inequalities, one free block for indicator equalities.
  int aux = 0;
  std::vector<int> lam_start;
  for (const auto& s : shape.piece_slopes) {
    lam_start.push_back(aux);
    aux += static_cast<int>(s.rows());
  }
  const int mu_start = aux;
  aux += shape.ineq_rows.rows();
  const int nu_start = aux;
  aux += shape.eq_rows.rows();

  const int inner_dim = n + aux;  // inner coords: (s, lambda, mu, nu)

  // residual(s, multipliers) = s - q - sum A_t' lam_t - G' mu - E' nu.
  Eigen::MatrixXd Mres = Eigen::MatrixXd::Zero(n, inner_dim);
  Mres.leftCols(n) = Eigen::MatrixXd::Identity(n, n);
  for (size_t t = 0; t < shape.piece_slopes.size(); ++t)
    Mres.block(0, n + lam_start[t], n, shape.piece_slopes[t].rows()) =
        -shape.piece_slopes[t].transpose();
  if (shape.ineq_rows.rows() > 0)
    Mres.block(0, n + mu_start, n, shape.ineq_rows.rows()) =
        -shape.ineq_rows.A.transpose();
  if (shape.eq_rows.rows() > 0)
    Mres.block(0, n + nu_start, n, shape.eq_rows.rows()) =
        -shape.eq_rows.A.transpose();
  Eigen::VectorXd mres =
      shape.has_quadratic ? (-shape.q).eval() : Eigen::VectorXd::Zero(n);
  if (!shape.has_quadratic && shape.piece_slopes.empty() &&
      shape.ineq_rows.rows() == 0 && shape.eq_rows.rows() == 0)
    throw std::invalid_argument("fenchel_conjugate_fn: empty function");

  std::vector<ConvexFn> inner_terms;

  // Linear part of the dual objective: sum b_t' lam_t + g' mu + e' nu - r.
  Eigen::VectorXd lin = Eigen::VectorXd::Zero(inner_dim);
  for (size_t t = 0; t < shape.piece_slopes.size(); ++t)
    lin.segment(n + lam_start[t], shape.piece_offsets[t].size()) =
        shape.piece_offsets[t];
  if (shape.ineq_rows.rows() > 0)
    lin.segment(n + mu_start, shape.ineq_rows.rows()) = shape.ineq_rows.b;
  if (shape.eq_rows.rows() > 0)
    lin.segment(n + nu_start, shape.eq_rows.rows()) = shape.eq_rows.b;
  if (lin.lpNorm<Eigen::Infinity>() != 0.0 || shape.r != 0.0)
    inner_terms.push_back(ConvexFn::affine(lin, shape.r));

  if (shape.has_quadratic) {
    inner_terms.push_back(
        ConvexFn::composed(ConvexFn::quadratic(Qinv, Eigen::VectorXd::Zero(n),
                                               0.0),
                           Mres, mres));
  }

  // Multiplier constraints (and, without a quadratic, the residual pin).
  poly::LinearSystem cons = poly::LinearSystem::Empty(inner_dim);
  for (size_t t = 0; t < shape.piece_slopes.size(); ++t) {
    const int cnt = static_cast<int>(shape.piece_slopes[t].rows());
    Eigen::VectorXd onerow = Eigen::VectorXd::Zero(inner_dim);
    for (int k = 0; k < cnt; ++k) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(inner_dim);
      row[n + lam_start[t] + k] = -1.0;
      cons.append(row, 0.0);  // lam >= 0
      onerow[n + lam_start[t] + k] = 1.0;
    }
    cons.append(onerow, 1.0, true);  // sum lam_t = 1
  }
  for (int k = 0; k < shape.ineq_rows.rows(); ++k) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(inner_dim);
    row[n + mu_start + k] = -1.0;
    cons.append(row, 0.0);  // mu >= 0
  }
  if (!shape.has_quadratic) {
    // residual = 0, i.e. s = sum A' lam + G' mu + E' nu.
    for (int k = 0; k < n; ++k) cons.append(Mres.row(k), -mres[k], true);
  }
  if (cons.rows() > 0) inner_terms.push_back(ConvexFn::indicator(cons));

  ConvexFn inner = inner_terms.size() == 1 ? inner_terms[0]
                                           : ConvexFn::add(inner_terms);

  if (aux == 0) {
    // Pure PD quadratic: closed form, no multipliers needed.
    Eigen::MatrixXd outer = Eigen::MatrixXd::Identity(inner_dim, n);
    return ConvexFn::composed(std::move(inner), std::move(outer),
                              Eigen::VectorXd::Zero(inner_dim));
  }

  Eigen::MatrixXd outer_map = Eigen::MatrixXd::Zero(inner_dim, n);
  outer_map.topRows(n) = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd aux_map = Eigen::MatrixXd::Zero(inner_dim, aux);
  aux_map.bottomRows(aux) = Eigen::MatrixXd::Identity(aux, aux);
  return ConvexFn::inf_composed(std::move(inner), std::move(outer_map),
                                std::move(aux_map),
                                Eigen::VectorXd::Zero(inner_dim));
}

}  // namespace repkit
