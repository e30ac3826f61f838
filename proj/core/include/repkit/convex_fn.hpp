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

#ifndef REPKIT_CONVEX_FN_HPP_
#define REPKIT_CONVEX_FN_HPP_

#include <Eigen/Core>
#include <memory>
#include <variant>
#include <vector>

#include "repkit/paired.hpp"
#include "repkit/polytope.hpp"

#include <nlohmann/json_fwd.hpp>

namespace repkit {

// Extended-real convex functions on R^D in a closed representation class:
// max-affine pieces, PSD quadratics, polyhedral indicators, finite sums,
// the paired-space shift f_z and scale f_alpha transforms, affine
// pre-composition, and lazy partial infima (the inf-convolution node used by
// the calculus).  Every value a solver needs from such a function reduces to
// one exact linear or convex quadratic program.
//
// Values are immutable and cheap to copy (shared structure).  When paired
// semantics matter (shift/scale, coupling), D = 2n with x stacked over xs.

namespace fn_detail {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct MaxAffineData {
  Eigen::MatrixXd slopes;   // one piece per row
  Eigen::VectorXd offsets;  // f = max_i slopes.row(i) * v - offsets[i]
};

struct QuadraticData {
  Eigen::MatrixXd Q;  // symmetric PSD
  Eigen::VectorXd q;
  double r = 0.0;
};

struct IndicatorData {
  poly::LinearSystem rows;  // 0 on the polyhedron, +inf outside
};

struct AddData {
  std::vector<NodePtr> terms;
};

struct ShiftedData {
  NodePtr inner;
  Eigen::VectorXd z0;  // flat paired point
};

struct ScaledData {
  NodePtr inner;
  double alpha = 1.0;
};

struct ComposedData {
  NodePtr inner;
  Eigen::MatrixXd B;  // inner arg = B v + d
  Eigen::VectorXd d;
};

struct InfComposedData {
  NodePtr inner;
  Eigen::MatrixXd outer_map;  // inner arg = outer_map v + aux_map w + d
  Eigen::MatrixXd aux_map;    // w ranges over R^{aux_dim}
  Eigen::VectorXd d;
};

using NodeData = std::variant<MaxAffineData, QuadraticData, IndicatorData,
                              AddData, ShiftedData, ScaledData, ComposedData,
                              InfComposedData>;

struct Node {
  int dim = 0;  // outer coordinate count
  NodeData data;
};

}  // namespace fn_detail

class ConvexFn {
 public:
  ConvexFn() = default;

  // ---- Factories.  Each validates its invariants; combinations containing
  // polyhedral pieces get a properness feasibility check.
  static ConvexFn max_affine(Eigen::MatrixXd slopes, Eigen::VectorXd offsets);
  static ConvexFn affine(const Eigen::VectorXd& slope, double offset);
  static ConvexFn quadratic(Eigen::MatrixXd Q, Eigen::VectorXd q, double r);
  static ConvexFn indicator(poly::LinearSystem rows);
  static ConvexFn add(std::vector<ConvexFn> terms);
  static ConvexFn composed(ConvexFn inner, Eigen::MatrixXd B,
                           Eigen::VectorXd d);
  static ConvexFn inf_composed(ConvexFn inner, Eigen::MatrixXd outer_map,
                               Eigen::MatrixXd aux_map, Eigen::VectorXd d);

  // h(z) = 1/2 ||z||^2 on R^n x R^n (a Quadratic with identity matrix).
  static ConvexFn h(int n);

  // Lift a function on R^k into R^D by selecting outer coordinates.
  static ConvexFn lift(ConvexFn inner, const std::vector<int>& coords,
                       int outer_dim);

  // Internal: wrap an existing node (used by the evaluator and transforms).
  static ConvexFn from_node(fn_detail::NodePtr n);

  bool valid() const { return node_ != nullptr; }
  int dim() const;
  int pair_dim() const;  // dim()/2; throws when dim is odd

  // ---- Evaluation (exact; +inf outside the domain).  Functions holding an
  // inf node run one convex program per call.
  double eval(const PairedPoint& z) const;
  double eval_flat(const Eigen::VectorXd& v) const;

  // ---- Paper transforms.  shift: f_z(w) = f(z+w) - c(z+w) + c(w);
  // scale: f_a(y, ys) = a f(y, ys/a), a > 0.
  ConvexFn shift(const PairedPoint& z0) const;
  ConvexFn scale(double alpha) const;

  const fn_detail::Node& node() const;
  const fn_detail::NodePtr& node_ptr() const { return node_; }

  nlohmann::json to_json() const;
  static ConvexFn from_json(const nlohmann::json& j);

 private:
  explicit ConvexFn(fn_detail::NodePtr n) : node_(std::move(n)) {}
  fn_detail::NodePtr node_;
};

// Coupling of a flat paired vector: <head, tail>.
double coupling_flat(const Eigen::VectorXd& v);

// hat as a flat-coordinate block swap.
Eigen::VectorXd hat_flat(const Eigen::VectorXd& v);

// Projections of dom f onto the primal and dual blocks, as 1-d intervals per
// coordinate direction or as polyhedra.  `use_projection` false skips the
// Fourier-Motzkin step and reports only feasibility boxes from sampling.
struct DomProjections {
  poly::LinearSystem x_rows;   // over the primal block
  poly::LinearSystem xs_rows;  // over the dual block
  bool x_whole_space = false;  // unbounded-domain flag, not an error
  bool xs_whole_space = false;
};
DomProjections dom_projections(const ConvexFn& f, bool use_projection = true);

}  // namespace repkit

#endif  // REPKIT_CONVEX_FN_HPP_
