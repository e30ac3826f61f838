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

#ifndef REPKIT_FITZPATRICK_HPP_
#define REPKIT_FITZPATRICK_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "repkit/convex_fn.hpp"
#include "repkit/paired.hpp"

namespace repkit {

// Finite sampled multivalued operators, identified with their graphs.
// A finite graph is never maximal; maximality-flavored statements in this
// library are made about equality sets of certified functions, not about
// sampled graphs.

struct OperatorGraph {
  std::vector<PairedPoint> points;
  std::string label;

  // Validates: nonempty, consistent dimension, no duplicates within 1e-12.
  static OperatorGraph make(std::vector<PairedPoint> points,
                            std::string label = "");

  int dim() const { return points.empty() ? 0 : points.front().dim(); }
  int size() const { return static_cast<int>(points.size()); }

  // CSV: header "dim=n", then one row "x_1,...,x_n,xs_1,...,xs_n" per point.
  static OperatorGraph from_csv(std::istream& in, std::string label = "");
  void to_csv(std::ostream& out) const;
};

// phi_M(z) = sup_{w in M} [<z, w>_pair - c(w)], exact: one max-affine piece
// per graph point with slope hat(w) and offset c(w).
ConvexFn fitzpatrick_fn(const OperatorGraph& M);

struct MonotonicityVerdict {
  bool monotone = true;
  double worst = 0.0;  // min over pairs of c(z_i - z_j)
  std::optional<std::pair<int, int>> witness;  // violating pair when present
};
MonotonicityVerdict is_monotone(const OperatorGraph& M, double tol = 1e-9);

// c(z - w) >= -tol against every graph point.
bool is_monotonically_related(const PairedPoint& z, const OperatorGraph& M,
                              double tol = 1e-9);

// Prop-style approximate monotonicity: given eval(f, z_i) <= c(z_i) + e_i
// (validated), returns c(z1 - z2), which must be >= -2(e1 + e2).
double approx_monotonicity_bound(const ConvexFn& f, const PairedPoint& z1,
                                 double e1, const PairedPoint& z2, double e2,
                                 double tol = 1e-9);

// Axis-aligned box over flat paired coordinates.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
  static Box cube(int dim, double lo, double hi);
};

struct EqualitySet {
  std::vector<PairedPoint> points;
  std::vector<double> residuals;  // |f(z) - c(z)| per point

  Eigen::MatrixXd as_matrix() const;  // one flat point per row
};

// Grid scan of [f = c] over the box; near-hits are pushed onto M_f by the
// exact f_z + h step, so the reported points carry residuals near zero.
// [f = c] is not convex in general, hence the scan instead of one solve.
EqualitySet equality_set(const ConvexFn& f, const Box& box, int resolution,
                         double tol = 1e-6);

}  // namespace repkit

#endif  // REPKIT_FITZPATRICK_HPP_
