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

#ifndef REPKIT_CALCULUS_HPP_
#define REPKIT_CALCULUS_HPP_

#include <array>
#include <stdexcept>
#include <vector>

#include "repkit/convex_fn.hpp"
#include "repkit/fitzpatrick.hpp"
#include "repkit/paired.hpp"

namespace repkit {

// Operator calculus: partial inf-projection, the graph transform induced by
// a linear map, and the inf-convolution sum representative, each gated by
// the relative-interior constraint qualification it needs.  Product paired
// coordinates are laid out flat as (x, y, x*, y*).

struct LinearMap {
  Eigen::MatrixXd A;  // Y-dim x X-dim

  static LinearMap make(Eigen::MatrixXd A);
  int in_dim() const { return static_cast<int>(A.cols()); }
  int out_dim() const { return static_cast<int>(A.rows()); }
  Eigen::MatrixXd adjoint() const { return A.transpose(); }
};

struct ProductFn {
  ConvexFn fn;  // over R^{2(n+m)}, coords (x, y, x*, y*)
  int n = 0;    // X block
  int m = 0;    // Y block

  static ProductFn make(ConvexFn fn, int n, int m);
  // phi(x, y, x*, y*) = f(x, x*) + g(y, y*).
  static ProductFn separable(const ConvexFn& f, const ConvexFn& g);
};

class CqError : public std::runtime_error {
 public:
  explicit CqError(const std::string& what) : std::runtime_error(what) {}
};

struct CqReport {
  bool pass = false;    // 0 in ri of the projected set
  bool in_set = false;  // 0 in the projected set at all
  poly::LinearSystem projection;  // explicit rows of the projected set
  // Sampled half of the relative-interior chain, when requested: the same
  // membership decided from conv of projected M_f samples.
  bool sampled_available = false;
  bool sampled_pass = false;
  bool chain_agrees = true;
};

// CQ for partial projection: 0 in ri(Pr_Y(dom f)).
CqReport cq_check(const ProductFn& f);
// Same, additionally comparing against the hull of Pr_Y of sampled M_f
// points (the relative-interior chain of equalities).
CqReport cq_check_sampled(const ProductFn& f, const Box& box, int resolution,
                          double tol = 1e-6);

// g(x, x*) = inf{ f(x, 0, x*, y*) | y* }, exact lazy inf node.
// Throws CqError when cq_check fails.
ConvexFn partial_projection(const ProductFn& f);

// Graph transform: (x, y, x*, y*) with (x* - A'y*, y*) in F(x, Ax + y).
// Each graph point ((u,v),(us,vs)) of F pulls back to
// ((u, v - Au), (us + A'vs, vs)).
OperatorGraph compose_fa_graph(const OperatorGraph& F, const LinearMap& A);

// Function transform f_A = f o L, L = B x (B^-1)': a (strong) representative
// of F_A whenever f is one of F.
ProductFn compose_fa_fn(const ProductFn& f, const LinearMap& A);

// k(x, x*) = inf{ f(x, x* - A'y*) + g(Ax, y*) | y* }, no CQ gate.  Used both
// for the sum representative and for the square-conjugate min formula.
ConvexFn inf_convolution_fn(const ConvexFn& f, const ConvexFn& g,
                            const LinearMap& A);

// CQ for the sum rule: 0 in ri(Pr_Y(dom g) - A(Pr_X(dom f))).
CqReport sum_cq_check(const ConvexFn& f, const ConvexFn& g,
                      const LinearMap& A);

// CQ-gated sum representative; M_f + A' M_g A = M_k under the CQ.
ConvexFn sum_representative(const ConvexFn& f, const ConvexFn& g,
                            const LinearMap& A);

// Direct sampled construction {(x, u* + A'v*) : (x, u*) in Mf,
// (Ax, v*) in Mg} over the x grid; the oracle against M_{sum_representative}.
// May be empty (disjoint domains).
std::vector<PairedPoint> sum_operator_graph(const OperatorGraph& Mf,
                                            const OperatorGraph& Mg,
                                            const LinearMap& A,
                                            const std::vector<Eigen::VectorXd>& x_grid,
                                            double match_tol = 1e-9);

// Attainment cross-check for the partial-projection conjugate formula:
// g*(d) computed by one program, then re-derived through f* at the
// multiplier witness (u*, v*, u**, 0).
struct InfProjConjugateCheck {
  double g_star = 0.0;       // conjugate of the projection at d
  Eigen::VectorXd vstar;     // attaining v* recovered from the subgradient
  double f_star_at_witness = 0.0;  // f*(u*, v*, u**, 0), independent solve
  bool attained = false;
  bool consistent = false;   // |g_star - f_star_at_witness| small
};
InfProjConjugateCheck partial_projection_conjugate_check(
    const ProductFn& f, const Eigen::VectorXd& dual_point, double tol = 1e-7);

struct HullReport {
  // Per-coordinate intervals, clipped to the sampling box.
  std::vector<std::array<double, 2>> dom_sample, dom_proj;
  std::vector<std::array<double, 2>> im_sample, im_proj;
  double dom_hausdorff = 0.0;  // max interval deviation over coordinates
  double im_hausdorff = 0.0;
};

// Compares hulls of dom/Im of M_f (sampled, enriched by scaled refinement)
// against the projections of dom f.  Report-only.
HullReport domain_range_hulls(const ConvexFn& f, const Box& box,
                              int resolution, double tol = 1e-6);

}  // namespace repkit

#endif  // REPKIT_CALCULUS_HPP_
