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

#include "repkit/refinement.hpp"

#include <cmath>
#include <limits>

#include "repkit/program_builder.hpp"

namespace repkit {
namespace {

constexpr double kAssertTol = 1e-9;
constexpr int kMaxIterations = 200;

}  // namespace

double EpsSchedule::term(int n) const {
  return eps0 * std::pow(q, 2.0 * n);
}

EpsSchedule make_schedule(double eps, double beta, double gamma) {
  detail::require(eps > 0, "make_schedule: eps must be positive");
  detail::require(beta > 1, "make_schedule: beta must exceed 1");
  detail::require(gamma > 2, "make_schedule: gamma must exceed 2");
  EpsSchedule s;
  s.eps0 = eps;
  s.beta = beta;
  s.gamma = gamma;
  s.q = 0.99 * std::min(std::sqrt((gamma * gamma - 4.0) / 6.0),
                        1.0 - 1.0 / beta);
  return s;
}

RefinementTrace refine(const ConvexFn& f, const PairedPoint& z,
                       const EpsSchedule& sched, double term_tol) {
  RefinementTrace trace;
  trace.start = z;
  trace.schedule = sched;
  trace.certified_radius = sched.gamma * sched.beta * std::sqrt(sched.eps0);
  trace.ideal_radius = 2.0 * std::sqrt(sched.eps0);

  PairedPoint cur = z;
  double gap = f.eval(cur) - coupling(cur);
  if (!std::isfinite(gap))
    throw std::invalid_argument("refine: f(z) must be finite");
  if (gap < -kAssertTol)
    throw RefinementError("refine: negative gap; f is not a representative",
                          trace);
  trace.gaps.push_back(gap);

  for (int n = 0; n < kMaxIterations; ++n) {
    if (gap <= term_tol) break;
    const prog::FzhResult inner = prog::min_fz_plus_h(f, cur.flat());
    const PairedPoint next = PairedPoint::FromFlat(cur.flat() + inner.step);
    const double next_gap = f.eval(next) - coupling(next);
    const double step_norm = inner.step.norm();

    if (std::abs(inner.value) > kAssertTol + term_tol) {
      trace.final = cur;
      throw RefinementError(
          "refine: inf(f_z + h) = " + std::to_string(inner.value) +
              " stays away from zero; f is not a strong representative "
              "(or the solver tolerance is too loose)",
          trace);
    }
    if (next_gap > sched.term(n + 1) + kAssertTol) {
      trace.final = next;
      throw RefinementError("refine: iterate gap exceeds the schedule term",
                            trace);
    }
    if (step_norm > sched.gamma * std::sqrt(sched.term(n)) + kAssertTol) {
      trace.final = next;
      throw RefinementError("refine: step norm exceeds gamma sqrt(eps_n)",
                            trace);
    }

    cur = next;
    gap = next_gap;
    trace.iterates.push_back(cur);
    trace.gaps.push_back(gap);
    trace.step_norms.push_back(step_norm);
  }

  if (gap > term_tol) {
    trace.final = cur;
    throw RefinementError("refine: no convergence within the iteration cap",
                          trace);
  }
  trace.final = cur;
  const double travel = znorm(PairedPoint(z.x - cur.x, z.xs - cur.xs));
  if (travel > trace.certified_radius + kAssertTol)
    throw RefinementError("refine: total travel exceeds gamma beta sqrt(eps)",
                          trace);
  return trace;
}

RefinementTrace refine(const ConvexFn& f, const PairedPoint& z,
                       double term_tol) {
  const double gap = f.eval(z) - coupling(z);
  if (!std::isfinite(gap))
    throw std::invalid_argument("refine: f(z) must be finite");
  if (gap <= term_tol) {
    RefinementTrace trace;
    trace.start = z;
    trace.final = z;
    trace.gaps.push_back(std::max(gap, 0.0));
    trace.schedule = make_schedule(std::max(gap, term_tol));
    trace.certified_radius = 0.0;
    trace.ideal_radius = 0.0;
    return trace;
  }
  return refine(f, z, make_schedule(gap), term_tol);
}

PairedPoint br_point(const ConvexFn& f, const PairedPoint& z, double eps,
                     double term_tol) {
  detail::require(eps > 0, "br_point: eps must be positive");
  const double gap = f.eval(z) - coupling(z);
  if (!(gap < eps))
    throw std::invalid_argument(
        "br_point: requires f(z) < c(z) + eps (gap = " + std::to_string(gap) +
        ")");
  const RefinementTrace trace = refine(f, z, term_tol);
  const double dist = znorm(z - trace.final);
  if (dist > 2.0 * std::sqrt(eps) + kAssertTol)
    throw RefinementError("br_point: distance exceeds 2 sqrt(eps)", trace);
  return trace.final;
}

ScaledRefineResult scaled_refine(const ConvexFn& f, const PairedPoint& z,
                                 double alpha, double gamma, double term_tol) {
  detail::require(alpha > 0, "scaled_refine: alpha must be positive");
  detail::require(gamma > 4, "scaled_refine: gamma must exceed 4");
  const double gap = f.eval(z) - coupling(z);
  if (!std::isfinite(gap))
    throw std::invalid_argument("scaled_refine: f(z) must be finite");

  const ConvexFn fa = f.scale(alpha);
  const PairedPoint zs(z.x, alpha * z.xs);
  // f_a(x, a x*) - <x, a x*> = a (f(x,x*) - <x,x*>), so the scaled gap is
  // exactly alpha * gap.
  const RefinementTrace trace = refine(fa, zs, term_tol);

  ScaledRefineResult out;
  out.point = PairedPoint(trace.final.x, trace.final.xs / alpha);
  out.lhs = (trace.final.x - z.x).squaredNorm() +
            (trace.final.xs - alpha * z.xs).squaredNorm();
  out.bound = gamma * alpha * std::max(gap, 0.0);
  if (out.lhs > out.bound + kAssertTol)
    throw RefinementError("scaled_refine: anisotropic bound violated", trace);
  return out;
}

std::vector<AnaPoint> ana_sequence(const ConvexFn& f, const PairedPoint& z,
                                   const std::vector<double>& eps_list,
                                   double term_tol) {
  const double gap = f.eval(z) - coupling(z);
  if (gap <= term_tol)
    throw std::invalid_argument("ana_sequence: z already lies on M_f");
  detail::require(!eps_list.empty(), "ana_sequence: empty eps list");
  for (size_t i = 0; i < eps_list.size(); ++i) {
    detail::require(eps_list[i] > 0, "ana_sequence: eps must be positive");
    if (i > 0)
      detail::require(eps_list[i] <= eps_list[i - 1],
                      "ana_sequence: eps must be non-increasing");
  }

  // Coercivity radius of the level set {f_z + h <= 1} from a dual witness
  // (a subgradient at the inner minimizer, whose conjugate value is exact by
  // the Fenchel equality).
  const ConvexFn fz = f.shift(z);
  const prog::FzhResult inner = prog::min_fz_plus_h(f, z.flat());
  const Eigen::VectorXd wbar = inner.step;
  const Eigen::VectorXd witness = prog::subgradient(fz, wbar);
  const double fz_at_w = fz.eval_flat(wbar);
  const double conj_value = wbar.dot(witness) - fz_at_w;
  const double a = witness.norm();
  const double disc = std::max(0.0, a * a + 2.0 * (1.0 + conj_value));
  const double radius = a + std::sqrt(disc);

  std::vector<AnaPoint> out;
  for (const double eps : eps_list) {
    AnaPoint pt;
    pt.eps = eps;
    // Budget: solve 11 e' + 6 r sqrt(2 e') = eps by bisection (monotone lhs).
    double lo_bis = 0.0, hi_bis = eps / 11.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo_bis + hi_bis);
      const double lhs = 11.0 * mid + 6.0 * radius * std::sqrt(2.0 * mid);
      (lhs < eps ? lo_bis : hi_bis) = mid;
    }
    pt.eps_prime = 0.5 * (lo_bis + hi_bis);

    // The exact minimizer of f_z + h meets any positive budget; push the
    // resulting point onto M_f.
    const PairedPoint approx = PairedPoint::FromFlat(z.flat() + wbar);
    const double approx_gap = f.eval(approx) - coupling(approx);
    const PairedPoint zeps = approx_gap <= term_tol
                                 ? approx
                                 : refine(f, approx, term_tol).final;
    pt.point = zeps;

    const Eigen::VectorXd dx = z.x - zeps.x;
    const Eigen::VectorXd dxs = z.xs - zeps.xs;
    pt.quad_form = dx.squaredNorm() + 2.0 * dx.dot(dxs) + dxs.squaredNorm();
    const double denom = dx.norm() * dxs.norm();
    if (denom < 1e-12)
      throw std::runtime_error(
          "ana_sequence: degenerate displacement; ratio undefined");
    pt.ratio = dx.dot(dxs) / denom;
    if (pt.quad_form > eps + kAssertTol)
      throw std::runtime_error(
          "ana_sequence: quadratic form exceeds the eps budget");
    out.push_back(pt);
  }
  return out;
}

}  // namespace repkit
