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

#ifndef REPKIT_CONJUGATE_HPP_
#define REPKIT_CONJUGATE_HPP_

#include <optional>
#include <vector>

#include "repkit/convex_fn.hpp"
#include "repkit/paired.hpp"

namespace repkit {

// Pointwise Fenchel conjugation over the representation class.  Conjugates
// are computed on demand by one exact concave maximization each; nothing is
// materialized symbolically except through fenchel_conjugate_fn below.

struct ConjugateValue {
  double value = 0.0;             // +inf when the sup is unbounded
  bool attained = false;
  Eigen::VectorXd maximizer;      // valid when attained
  Eigen::VectorXd unbounded_ray;  // valid when value == +inf
};

class ConjugateEngine {
 public:
  explicit ConjugateEngine(double tolerance = 1e-9, int max_pieces = 0)
      : tolerance_(tolerance), max_pieces_(max_pieces) {
    detail::require(tolerance > 0, "ConjugateEngine: tolerance must be > 0");
  }

  double tolerance() const { return tolerance_; }

  // f*(d) = sup_z [<z, d> - f(z)].
  double conjugate_at(const ConvexFn& f, const DualPoint& d) const;
  double conjugate_at_flat(const ConvexFn& f, const Eigen::VectorXd& d) const;
  ConjugateValue conjugate_full(const ConvexFn& f,
                                const Eigen::VectorXd& d) const;

  // f_square(z) = f*(hat z).
  double square_conjugate_at(const ConvexFn& f, const PairedPoint& z) const;

  struct BiconjugateReport {
    bool ok = true;
    double max_deviation = 0.0;
    Eigen::VectorXd worst_point;
  };

  // Fenchel-Moreau sanity gate: checks |f**(z) - f(z)| <= tol at each finite
  // sample point.  f** is evaluated through a max-affine under-approximation
  // of f* anchored at one subgradient per sample (which makes the bound
  // tight) plus the cross-sample anchors.
  BiconjugateReport biconjugate_check(const ConvexFn& f,
                                      const std::vector<PairedPoint>& samples,
                                      double tol) const;

 private:
  double tolerance_;
  int max_pieces_;
};

// Exact symbolic conjugate for one-block functions of the shape
//   f = [PD quadratic] + sum of max-affine terms + [polyhedral indicator]
// (any subset; the quadratic must be positive definite when present).  The
// result is expressed with a partial-inf node over the dual multipliers, so
// it stays inside the representation class.  Throws on unsupported shapes.
ConvexFn fenchel_conjugate_fn(const ConvexFn& f);

}  // namespace repkit

#endif  // REPKIT_CONJUGATE_HPP_
