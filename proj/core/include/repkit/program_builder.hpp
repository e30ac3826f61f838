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

#ifndef REPKIT_PROGRAM_BUILDER_HPP_
#define REPKIT_PROGRAM_BUILDER_HPP_

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "repkit/convex_fn.hpp"
#include "repkit/solver.hpp"

namespace repkit::prog {

// Compiles expressions  sum_k w_k f_k(A_k y + b_k)  over builder variables y
// into one convex QP: max-affine pieces get epigraph variables, indicators
// become rows, quadratics accumulate into the Hessian, and partial-inf nodes
// splice their auxiliary variables into y.  Every transform in the ConvexFn
// class pushes down to an exact affine change of data, so the compiled
// program is the function, not an approximation of it.

// Affine argument of a term: value = A * y(vars) + b.
struct AffineArg {
  std::vector<int> vars;
  Eigen::MatrixXd A;  // target_dim x vars.size()
  Eigen::VectorXd b;  // target_dim

  static AffineArg constant(const Eigen::VectorXd& value);
  static AffineArg identity(int dim, int first_var = 0);
};

class Builder {
 public:
  int add_vars(int count);
  int num_vars() const { return num_vars_; }

  // Adds weight * f(A y + b); returns a term id for later inspection.
  int add_term(const ConvexFn& f, double weight, AffineArg arg);

  void obj_linear(int var, double coeff);
  void obj_quad(int vi, int vj, double coeff);  // adds coeff to P(vi, vj)
  void obj_constant(double value);
  int add_row(std::vector<std::pair<int, double>> entries, double rhs,
              bool equality = false);

  qp::Problem problem() const;

  // Point at which term `t`'s root function is evaluated, given a solution.
  Eigen::VectorXd term_point(int term, const qp::Result& res) const;
  // A subgradient of term `t`'s root function at term_point, assembled from
  // KKT multipliers of the solved program.
  Eigen::VectorXd term_subgradient(int term, const qp::Result& res) const;
  // Auxiliary (inf-node) variables allocated under term `t`, in order.
  const std::vector<int>& term_aux_vars(int term) const;

 private:
  struct Leaf {
    enum class Kind { kMaxAffine, kQuadratic, kIndicator, kShiftLinear };
    Kind kind;
    double weight = 1.0;
    Eigen::MatrixXd R;  // root coords -> leaf coords (linear part)
    AffineArg arg;      // builder vars -> leaf coords
    std::vector<int> rows;      // global row ids (pieces / facets)
    Eigen::MatrixXd slopes;     // max-affine pieces or indicator normals
    Eigen::MatrixXd Q;          // quadratic
    Eigen::VectorXd q;
    Eigen::VectorXd shift_grad;  // constant gradient, leaf coords
  };

  struct Term {
    AffineArg root_arg;
    double weight = 1.0;
    int root_dim = 0;
    std::vector<Leaf> leaves;
    std::vector<int> aux_vars;
  };

  struct Row {
    std::vector<std::pair<int, double>> entries;
    double rhs = 0.0;
    bool equality = false;
  };

  void walk(const fn_detail::Node& node, double weight, AffineArg arg,
            Eigen::MatrixXd R, Term& term);

  int num_vars_ = 0;
  std::vector<Row> rows_;
  std::vector<std::pair<int, double>> linear_;
  std::vector<std::tuple<int, int, double>> quad_;
  double constant_ = 0.0;
  std::vector<Term> terms_;
};

// Effective-domain rows of f, over (outer coords, then aux coords).
struct DomRows {
  poly::LinearSystem sys;
  int outer_dim = 0;
  int aux_dim = 0;
};
DomRows dom_rows(const ConvexFn& f);

// Exact evaluation; runs a convex program when inf nodes are present.
double eval_with_solver(const ConvexFn& f, const Eigen::VectorXd& v);

// A valid subgradient of f at a point where f is finite.
Eigen::VectorXd subgradient(const ConvexFn& f, const Eigen::VectorXd& v);

// The workhorse program of the whole library:
//   minimize_w  f_z(w) + h(w) = f(z+w) - <w, hat z> + 1/2 ||w||^2 - c(z),
// strictly convex in w, hence a unique minimizer.  For strong representatives
// the optimal value is 0 and z + step lands on M_f.
struct FzhResult {
  double value = 0.0;
  Eigen::VectorXd step;  // the minimizer w
};
FzhResult min_fz_plus_h(const ConvexFn& f, const Eigen::VectorXd& z_flat);

}  // namespace repkit::prog

#endif  // REPKIT_PROGRAM_BUILDER_HPP_
