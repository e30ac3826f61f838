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

#ifndef REPKIT_REFINEMENT_HPP_
#define REPKIT_REFINEMENT_HPP_

#include <stdexcept>
#include <vector>

#include "repkit/convex_fn.hpp"
#include "repkit/paired.hpp"

namespace repkit {

// Iterative refinement of an approximate equality point onto M_f, with the
// error schedule and certified radius of the underlying theorem.  The inner
// step minimizes f_z + h exactly; the exact minimizer satisfies every
// acceptance inequality of the schedule, and for a genuine strong
// representative it lands on M_f immediately, so traces are short and the
// measured step obeys the sharp 2 sqrt(eps) bound, not just gamma beta
// sqrt(eps).

struct EpsSchedule {
  double eps0 = 0.0;
  double beta = 1.05;
  double gamma = 2.05;
  double q = 0.0;  // eps_n = eps0 * q^(2n)

  double term(int n) const;
};

// Requires eps > 0, beta > 1, gamma > 2.  Sets
// q = 0.99 min(sqrt((gamma^2 - 4)/6), 1 - 1/beta), which makes both schedule
// conditions (4 eps_n + 6 eps_{n+1} <= gamma^2 eps_n and sum sqrt(eps_n) <
// beta sqrt(eps0)) hold identically.
EpsSchedule make_schedule(double eps, double beta = 1.05, double gamma = 2.05);

struct RefinementTrace {
  PairedPoint start;
  std::vector<PairedPoint> iterates;  // z_1, ..., z_K (start excluded)
  std::vector<double> gaps;           // gaps[n] = f(z_n) - c(z_n), n = 0..K
  std::vector<double> step_norms;     // ||z_{n+1} - z_n||, n = 0..K-1
  PairedPoint final;
  double certified_radius = 0.0;  // gamma beta sqrt(eps0)
  double ideal_radius = 0.0;      // 2 sqrt(eps0)
  EpsSchedule schedule;
};

class RefinementError : public std::runtime_error {
 public:
  RefinementError(const std::string& what, RefinementTrace trace)
      : std::runtime_error(what), trace(std::move(trace)) {}
  RefinementTrace trace;
};

// Runs the refinement loop from z (finite gap required).  Per-iteration
// assertions check the schedule inequalities; a breach raises
// RefinementError carrying the partial trace, which signals that f is not
// actually a strong representative or the solver tolerance is too loose.
RefinementTrace refine(const ConvexFn& f, const PairedPoint& z,
                       const EpsSchedule& sched, double term_tol = 1e-10);

// Convenience: schedule from the initial gap with default beta, gamma.
RefinementTrace refine(const ConvexFn& f, const PairedPoint& z,
                       double term_tol = 1e-10);

// Bronsted-Rockafellar point: from f(z) < c(z) + eps produces a point of M_f
// within 2 sqrt(eps) of z.
PairedPoint br_point(const ConvexFn& f, const PairedPoint& z, double eps,
                     double term_tol = 1e-10);

struct ScaledRefineResult {
  PairedPoint point;   // (x_a, x_a^*) on M_f
  double lhs = 0.0;    // ||x_a - x||^2 + a^2 ||x_a^* - x^*||^2
  double bound = 0.0;  // gamma * a * gap
};

// Refines on the scaled function f_a at (x, a x^*) and unscales; asserts the
// anisotropic distance bound with the caller's gamma (> 4).
ScaledRefineResult scaled_refine(const ConvexFn& f, const PairedPoint& z,
                                 double alpha, double gamma = 4.5,
                                 double term_tol = 1e-10);

struct AnaPoint {
  PairedPoint point;      // on M_f
  double ratio = 0.0;     // <x_n - x, x_n^* - x^*> normalized
  double quad_form = 0.0; // ||dx||^2 + 2 <dx, dxs> + ||dxs||^2 <= eps
  double eps = 0.0;
  double eps_prime = 0.0; // budget solving 11 e' + 6 r sqrt(2 e') = eps
};

// ANA sequence generator: emits one M_f point per eps with the normalized
// coupling ratio; for strongly representable f the ratios sit at -1.
std::vector<AnaPoint> ana_sequence(const ConvexFn& f, const PairedPoint& z,
                                   const std::vector<double>& eps_list,
                                   double term_tol = 1e-10);

}  // namespace repkit

#endif  // REPKIT_REFINEMENT_HPP_
