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

#include "repkit/program_builder.hpp"

#include <cmath>
#include <limits>

namespace repkit::prog {

using fn_detail::AddData;
using fn_detail::ComposedData;
using fn_detail::IndicatorData;
using fn_detail::InfComposedData;
using fn_detail::MaxAffineData;
using fn_detail::Node;
using fn_detail::QuadraticData;
using fn_detail::ScaledData;
using fn_detail::ShiftedData;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd scale_map(int pair_total, double alpha) {
  // diag(I, I/alpha) on a flat paired vector.
  const int half = pair_total / 2;
  Eigen::VectorXd diag(pair_total);
  diag.head(half).setOnes();
  diag.tail(half).setConstant(1.0 / alpha);
  return diag.asDiagonal();
}
}  // namespace

AffineArg AffineArg::constant(const Eigen::VectorXd& value) {
  AffineArg a;
  a.A = Eigen::MatrixXd::Zero(value.size(), 0);
  a.b = value;
  return a;
}

AffineArg AffineArg::identity(int dim, int first_var) {
  AffineArg a;
  a.vars.resize(dim);
  for (int i = 0; i < dim; ++i) a.vars[i] = first_var + i;
  a.A = Eigen::MatrixXd::Identity(dim, dim);
  a.b = Eigen::VectorXd::Zero(dim);
  return a;
}

int Builder::add_vars(int count) {
  const int first = num_vars_;
  num_vars_ += count;
  return first;
}

void Builder::obj_linear(int var, double coeff) {
  linear_.emplace_back(var, coeff);
}

void Builder::obj_quad(int vi, int vj, double coeff) {
  quad_.emplace_back(vi, vj, coeff);
}

void Builder::obj_constant(double value) { constant_ += value; }

int Builder::add_row(std::vector<std::pair<int, double>> entries, double rhs,
                     bool equality) {
  rows_.push_back(Row{std::move(entries), rhs, equality});
  return static_cast<int>(rows_.size()) - 1;
}

int Builder::add_term(const ConvexFn& f, double weight, AffineArg arg) {
  detail::require(arg.A.rows() == f.dim() && arg.b.size() == f.dim() &&
                      arg.A.cols() == static_cast<int>(arg.vars.size()),
                  "add_term: affine argument shape mismatch");
  detail::require(weight > 0.0, "add_term: weight must be positive");
  Term term;
  term.root_arg = arg;
  term.weight = weight;
  term.root_dim = f.dim();
  terms_.push_back(std::move(term));
  walk(f.node(), weight, std::move(arg),
       Eigen::MatrixXd::Identity(f.dim(), f.dim()), terms_.back());
  return static_cast<int>(terms_.size()) - 1;
}

void Builder::walk(const Node& node, double weight, AffineArg arg,
                   Eigen::MatrixXd R, Term& term) {
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, MaxAffineData>) {
          const int t = add_vars(1);
          obj_linear(t, 1.0);
          Leaf leaf;
          leaf.kind = Leaf::Kind::kMaxAffine;
          leaf.weight = weight;
          leaf.R = R;
          leaf.arg = arg;
          leaf.slopes = d.slopes;
          for (int p = 0; p < d.slopes.rows(); ++p) {
            const Eigen::VectorXd s = d.slopes.row(p).transpose();
            const Eigen::VectorXd coeff = arg.A.transpose() * (weight * s);
            std::vector<std::pair<int, double>> entries;
            for (int k = 0; k < coeff.size(); ++k)
              entries.emplace_back(arg.vars[k], coeff[k]);
            entries.emplace_back(t, -1.0);
            const double rhs = weight * (d.offsets[p] - s.dot(arg.b));
            leaf.rows.push_back(add_row(std::move(entries), rhs));
          }
          term.leaves.push_back(std::move(leaf));
        } else if constexpr (std::is_same_v<T, QuadraticData>) {
          const Eigen::MatrixXd AtQ = arg.A.transpose() * (weight * d.Q);
          const Eigen::MatrixXd P = AtQ * arg.A;
          for (int i = 0; i < P.rows(); ++i)
            for (int j = 0; j < P.cols(); ++j)
              if (P(i, j) != 0.0) obj_quad(arg.vars[i], arg.vars[j], P(i, j));
          const Eigen::VectorXd lin =
              AtQ * arg.b + arg.A.transpose() * (weight * d.q);
          for (int i = 0; i < lin.size(); ++i)
            if (lin[i] != 0.0) obj_linear(arg.vars[i], lin[i]);
          obj_constant(weight *
                       (0.5 * arg.b.dot(d.Q * arg.b) + d.q.dot(arg.b) + d.r));
          Leaf leaf;
          leaf.kind = Leaf::Kind::kQuadratic;
          leaf.weight = weight;
          leaf.R = R;
          leaf.arg = arg;
          leaf.Q = d.Q;
          leaf.q = d.q;
          term.leaves.push_back(std::move(leaf));
        } else if constexpr (std::is_same_v<T, IndicatorData>) {
          Leaf leaf;
          leaf.kind = Leaf::Kind::kIndicator;
          leaf.weight = weight;
          leaf.R = R;
          leaf.arg = arg;
          leaf.slopes = d.rows.A;
          for (int rrow = 0; rrow < d.rows.rows(); ++rrow) {
            const Eigen::VectorXd nrm = d.rows.A.row(rrow).transpose();
            const Eigen::VectorXd coeff = arg.A.transpose() * nrm;
            std::vector<std::pair<int, double>> entries;
            for (int k = 0; k < coeff.size(); ++k)
              entries.emplace_back(arg.vars[k], coeff[k]);
            const double rhs = d.rows.b[rrow] - nrm.dot(arg.b);
            const bool eq =
                !d.rows.equality.empty() && d.rows.equality[rrow];
            leaf.rows.push_back(add_row(std::move(entries), rhs, eq));
          }
          term.leaves.push_back(std::move(leaf));
        } else if constexpr (std::is_same_v<T, AddData>) {
          for (const auto& t : d.terms) walk(*t, weight, arg, R, term);
        } else if constexpr (std::is_same_v<T, ShiftedData>) {
          // f_z(w) = f(z + w) - <w, hat z> - c(z).
          AffineArg shifted = arg;
          shifted.b += d.z0;
          walk(*d.inner, weight, std::move(shifted), R, term);
          const Eigen::VectorXd hz = hat_flat(d.z0);
          const Eigen::VectorXd coeff = arg.A.transpose() * (weight * hz);
          for (int k = 0; k < coeff.size(); ++k)
            if (coeff[k] != 0.0) obj_linear(arg.vars[k], -coeff[k]);
          obj_constant(-weight * (hz.dot(arg.b) + coupling_flat(d.z0)));
          Leaf leaf;
          leaf.kind = Leaf::Kind::kShiftLinear;
          leaf.weight = weight;
          leaf.R = R;
          leaf.arg = arg;
          leaf.shift_grad = -weight * hz;
          term.leaves.push_back(std::move(leaf));
        } else if constexpr (std::is_same_v<T, ScaledData>) {
          const Eigen::MatrixXd S = scale_map(node.dim, d.alpha);
          AffineArg scaled;
          scaled.vars = arg.vars;
          scaled.A = S * arg.A;
          scaled.b = S * arg.b;
          walk(*d.inner, weight * d.alpha, std::move(scaled), S * R, term);
        } else if constexpr (std::is_same_v<T, ComposedData>) {
          AffineArg mapped;
          mapped.vars = arg.vars;
          mapped.A = d.B * arg.A;
          mapped.b = d.B * arg.b + d.d;
          walk(*d.inner, weight, std::move(mapped), d.B * R, term);
        } else {
          static_assert(std::is_same_v<T, InfComposedData>);
          const int aux_dim = static_cast<int>(d.aux_map.cols());
          const int first = add_vars(aux_dim);
          for (int k = 0; k < aux_dim; ++k) term.aux_vars.push_back(first + k);
          AffineArg mapped;
          mapped.vars = arg.vars;
          for (int k = 0; k < aux_dim; ++k) mapped.vars.push_back(first + k);
          mapped.A = Eigen::MatrixXd(d.outer_map.rows(),
                                     arg.A.cols() + aux_dim);
          mapped.A << d.outer_map * arg.A, d.aux_map;
          mapped.b = d.outer_map * arg.b + d.d;
          walk(*d.inner, weight, std::move(mapped), d.outer_map * R, term);
        }
      },
      node.data);
}

qp::Problem Builder::problem() const {
  qp::Problem p;
  const int n = num_vars_;
  p.P = Eigen::MatrixXd::Zero(n, n);
  p.c = Eigen::VectorXd::Zero(n);
  p.constant = constant_;
  for (const auto& [i, j, v] : quad_) p.P(i, j) += v;
  p.P = 0.5 * (p.P + p.P.transpose()).eval();
  for (const auto& [i, v] : linear_) p.c[i] += v;
  p.G = Eigen::MatrixXd::Zero(static_cast<int>(rows_.size()), n);
  p.g = Eigen::VectorXd::Zero(static_cast<int>(rows_.size()));
  p.equality.assign(rows_.size(), 0);
  for (int r = 0; r < static_cast<int>(rows_.size()); ++r) {
    for (const auto& [i, v] : rows_[r].entries) p.G(r, i) += v;
    p.g[r] = rows_[r].rhs;
    p.equality[r] = rows_[r].equality ? 1 : 0;
  }
  return p;
}

Eigen::VectorXd Builder::term_point(int term, const qp::Result& res) const {
  const Term& t = terms_.at(term);
  Eigen::VectorXd y(t.root_arg.vars.size());
  for (int k = 0; k < y.size(); ++k) y[k] = res.y[t.root_arg.vars[k]];
  return t.root_arg.A * y + t.root_arg.b;
}

Eigen::VectorXd Builder::term_subgradient(int term,
                                          const qp::Result& res) const {
  const Term& t = terms_.at(term);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(t.root_dim);
  for (const Leaf& leaf : t.leaves) {
    Eigen::VectorXd s;
    switch (leaf.kind) {
      case Leaf::Kind::kMaxAffine: {
        s = Eigen::VectorXd::Zero(leaf.slopes.cols());
        for (size_t p = 0; p < leaf.rows.size(); ++p) {
          const double lam = res.multipliers[leaf.rows[p]];
          if (lam != 0.0)
            s += lam * leaf.slopes.row(static_cast<int>(p)).transpose();
        }
        s *= leaf.weight;
        break;
      }
      case Leaf::Kind::kQuadratic: {
        Eigen::VectorXd y(leaf.arg.vars.size());
        for (int k = 0; k < y.size(); ++k) y[k] = res.y[leaf.arg.vars[k]];
        const Eigen::VectorXd pnt = leaf.arg.A * y + leaf.arg.b;
        s = leaf.weight * (leaf.Q * pnt + leaf.q);
        break;
      }
      case Leaf::Kind::kIndicator: {
        s = Eigen::VectorXd::Zero(leaf.slopes.cols());
        for (size_t p = 0; p < leaf.rows.size(); ++p) {
          const double mu = res.multipliers[leaf.rows[p]];
          if (mu != 0.0)
            s += mu * leaf.slopes.row(static_cast<int>(p)).transpose();
        }
        break;
      }
      case Leaf::Kind::kShiftLinear:
        s = leaf.shift_grad;
        break;
    }
    acc += leaf.R.transpose() * s;
  }
  return acc / t.weight;
}

const std::vector<int>& Builder::term_aux_vars(int term) const {
  return terms_.at(term).aux_vars;
}

// ---------------------------------------------------------------------------

namespace {

void collect_dom_rows(const Node& node, AffineArg arg, poly::LinearSystem& sys,
                      int& next_aux, int max_cols) {
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IndicatorData>) {
          for (int r = 0; r < d.rows.rows(); ++r) {
            const Eigen::VectorXd nrm = d.rows.A.row(r).transpose();
            const Eigen::VectorXd coeff = arg.A.transpose() * nrm;
            Eigen::VectorXd full = Eigen::VectorXd::Zero(max_cols);
            for (int k = 0; k < coeff.size(); ++k)
              full[arg.vars[k]] += coeff[k];
            const bool eq = !d.rows.equality.empty() && d.rows.equality[r];
            sys.append(full, d.rows.b[r] - nrm.dot(arg.b), eq);
          }
        } else if constexpr (std::is_same_v<T, AddData>) {
          for (const auto& t : d.terms)
            collect_dom_rows(*t, arg, sys, next_aux, max_cols);
        } else if constexpr (std::is_same_v<T, ShiftedData>) {
          AffineArg shifted = arg;
          shifted.b += d.z0;
          collect_dom_rows(*d.inner, shifted, sys, next_aux, max_cols);
        } else if constexpr (std::is_same_v<T, ScaledData>) {
          const Eigen::MatrixXd S = scale_map(node.dim, d.alpha);
          AffineArg scaled;
          scaled.vars = arg.vars;
          scaled.A = S * arg.A;
          scaled.b = S * arg.b;
          collect_dom_rows(*d.inner, scaled, sys, next_aux, max_cols);
        } else if constexpr (std::is_same_v<T, ComposedData>) {
          AffineArg mapped;
          mapped.vars = arg.vars;
          mapped.A = d.B * arg.A;
          mapped.b = d.B * arg.b + d.d;
          collect_dom_rows(*d.inner, mapped, sys, next_aux, max_cols);
        } else if constexpr (std::is_same_v<T, InfComposedData>) {
          const int aux_dim = static_cast<int>(d.aux_map.cols());
          AffineArg mapped;
          mapped.vars = arg.vars;
          for (int k = 0; k < aux_dim; ++k) mapped.vars.push_back(next_aux + k);
          next_aux += aux_dim;
          mapped.A = Eigen::MatrixXd(d.outer_map.rows(),
                                     arg.A.cols() + aux_dim);
          mapped.A << d.outer_map * arg.A, d.aux_map;
          mapped.b = d.outer_map * arg.b + d.d;
          collect_dom_rows(*d.inner, mapped, sys, next_aux, max_cols);
        }
        // MaxAffine and Quadratic are finite everywhere.
      },
      node.data);
}

int count_aux(const Node& node) {
  return std::visit(
      [](const auto& d) -> int {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, AddData>) {
          int s = 0;
          for (const auto& t : d.terms) s += count_aux(*t);
          return s;
        } else if constexpr (std::is_same_v<T, InfComposedData>) {
          return static_cast<int>(d.aux_map.cols()) + count_aux(*d.inner);
        } else if constexpr (std::is_same_v<T, ShiftedData> ||
                             std::is_same_v<T, ScaledData> ||
                             std::is_same_v<T, ComposedData>) {
          return count_aux(*d.inner);
        } else {
          return 0;
        }
      },
      node.data);
}

}  // namespace

DomRows dom_rows(const ConvexFn& f) {
  DomRows out;
  out.outer_dim = f.dim();
  out.aux_dim = count_aux(f.node());
  const int total = out.outer_dim + out.aux_dim;
  out.sys = poly::LinearSystem::Empty(total);
  int next_aux = out.outer_dim;
  collect_dom_rows(f.node(), AffineArg::identity(f.dim()), out.sys, next_aux,
                   total);
  return out;
}

double eval_with_solver(const ConvexFn& f, const Eigen::VectorXd& v) {
  Builder b;
  b.add_term(f, 1.0, AffineArg::constant(v));
  const qp::Problem p = b.problem();
  if (p.num_vars() == 0) {
    for (int r = 0; r < p.num_rows(); ++r) {
      const bool eq = !p.equality.empty() && p.equality[r];
      const double scale = 1.0 + std::abs(p.g[r]);
      if (eq ? std::abs(p.g[r]) > 1e-11 * scale : p.g[r] < -1e-11 * scale)
        return kInf;
    }
    return p.constant;
  }
  const qp::Result res = qp::solve(p);
  switch (res.status) {
    case qp::Status::kOptimal:
      return res.value;
    case qp::Status::kInfeasible:
      return kInf;
    case qp::Status::kUnbounded:
      throw qp::SolverError(
          "eval: partial infimum unbounded below (improper slice; check the "
          "constraint qualification)");
    default:
      throw qp::SolverError("eval: inner program unresolved");
  }
}

Eigen::VectorXd subgradient(const ConvexFn& f, const Eigen::VectorXd& v) {
  Builder b;
  const int term = b.add_term(f, 1.0, AffineArg::constant(v));
  const qp::Problem p = b.problem();
  qp::Result res;
  if (p.num_vars() == 0) {
    res.status = qp::Status::kOptimal;
    res.y = Eigen::VectorXd();
    res.multipliers = Eigen::VectorXd::Zero(p.num_rows());
  } else {
    res = qp::solve(p);
    if (res.status != qp::Status::kOptimal)
      throw qp::SolverError("subgradient: function not finite at the point");
  }
  return b.term_subgradient(term, res);
}

FzhResult min_fz_plus_h(const ConvexFn& f, const Eigen::VectorXd& z_flat) {
  const int dim = f.dim();
  detail::require(static_cast<int>(z_flat.size()) == dim,
                  "min_fz_plus_h: dimension mismatch");
  Builder b;
  const int w0 = b.add_vars(dim);
  AffineArg arg = AffineArg::identity(dim, w0);
  arg.b = z_flat;
  b.add_term(f, 1.0, std::move(arg));
  const Eigen::VectorXd hz = hat_flat(z_flat);
  for (int i = 0; i < dim; ++i) {
    b.obj_quad(w0 + i, w0 + i, 1.0);
    if (hz[i] != 0.0) b.obj_linear(w0 + i, -hz[i]);
  }
  b.obj_constant(-coupling_flat(z_flat));

  const qp::Result res = qp::solve(b.problem());
  if (res.status == qp::Status::kInfeasible)
    throw qp::SolverError("min_fz_plus_h: empty domain slice");
  if (res.status != qp::Status::kOptimal)
    throw qp::SolverError("min_fz_plus_h: inner program unresolved");
  FzhResult out;
  out.value = res.value;
  out.step = res.y.head(dim);
  return out;
}

}  // namespace repkit::prog
