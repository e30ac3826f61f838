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

#include "repkit/representability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "repkit/conjugate.hpp"
#include "repkit/program_builder.hpp"
#include "repkit/rng.hpp"

namespace repkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gap_at(const ConvexFn& f, const Eigen::VectorXd& v) {
  const double fv = f.eval_flat(v);
  return std::isfinite(fv) ? fv - coupling_flat(v) : kInf;
}

// One difference-of-convex descent step for the gap f - c inside a box:
// minimize f(z) - <hat z_k, z> + 1/2 ||z - z_k||^2 over the box.
Eigen::VectorXd dca_step(const ConvexFn& f, const Box& box,
                         const Eigen::VectorXd& zk) {
  const int d = f.dim();
  prog::Builder b;
  const int z0 = b.add_vars(d);
  b.add_term(f, 1.0, prog::AffineArg::identity(d, z0));
  const Eigen::VectorXd lin = hat_flat(zk) + zk;
  for (int i = 0; i < d; ++i) {
    b.obj_quad(z0 + i, z0 + i, 1.0);
    b.obj_linear(z0 + i, -lin[i]);
    b.add_row({{z0 + i, 1.0}}, box.hi[i]);
    b.add_row({{z0 + i, -1.0}}, -box.lo[i]);
  }
  const qp::Result res = qp::solve(b.problem());
  if (res.status != qp::Status::kOptimal)
    throw qp::SolverError("check_representative: descent step unresolved");
  return res.y.head(d);
}

}  // namespace

SearchBudget SearchBudget::standard(int pair_dim, double radius) {
  SearchBudget b;
  b.box = Box::cube(2 * pair_dim, -radius, radius);
  if (pair_dim >= 2) b.resolution = 9;
  if (pair_dim >= 3) b.resolution = 5;
  return b;
}

double duality_zero(const ConvexFn& f, const PairedPoint& z) {
  return prog::min_fz_plus_h(f, z.flat()).value;
}

RepresentativeVerdict check_representative(const ConvexFn& f,
                                           const SearchBudget& budget) {
  const int d = f.dim();
  detail::require(budget.box.dim() == d,
                  "check_representative: box dimension mismatch");
  RepresentativeVerdict verdict;
  verdict.resolution = budget.resolution;
  verdict.multistarts = budget.multistarts;
  verdict.tol = budget.class_tol;

  // Grid pass: remember the worst gaps as descent seeds.
  std::vector<std::pair<double, Eigen::VectorXd>> worst;
  long long total = 1;
  for (int k = 0; k < d; ++k) total *= budget.resolution;
  detail::require(total <= 4e6, "check_representative: grid too large");
  Eigen::VectorXd v(d);
  for (long long it = 0; it < total; ++it) {
    long long rest = it;
    for (int k = 0; k < d; ++k) {
      const int i = static_cast<int>(rest % budget.resolution);
      rest /= budget.resolution;
      v[k] = budget.box.lo[k] +
             (budget.box.hi[k] - budget.box.lo[k]) * i /
                 (budget.resolution - 1);
    }
    const double gap = gap_at(f, v);
    if (!std::isfinite(gap)) continue;
    worst.emplace_back(gap, v);
    std::push_heap(worst.begin(), worst.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
    if (static_cast<int>(worst.size()) > budget.multistarts) {
      std::pop_heap(worst.begin(), worst.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
      worst.pop_back();
    }
  }
  Rng rng(budget.seed);
  for (int k = 0; k < budget.multistarts; ++k) {
    Eigen::VectorXd r(d);
    for (int i = 0; i < d; ++i) r[i] = rng.uniform(budget.box.lo[i], budget.box.hi[i]);
    if (std::isfinite(gap_at(f, r))) worst.emplace_back(gap_at(f, r), r);
  }

  double best_gap = kInf;
  Eigen::VectorXd best_point;
  for (auto& [g0, start] : worst) {
    Eigen::VectorXd zk = start;
    double gk = g0;
    for (int iter = 0; iter < 50; ++iter) {
      const Eigen::VectorXd zn = dca_step(f, budget.box, zk);
      const double gn = gap_at(f, zn);
      if (!(gn < gk - 1e-13)) break;
      zk = zn;
      gk = gn;
    }
    if (gk < best_gap) {
      best_gap = gk;
      best_point = zk;
    }
  }

  if (best_gap < -budget.class_tol) {
    verdict.no_violation_found = false;
    verdict.counterexample = Counterexample{best_point, best_gap};
  }
  return verdict;
}

RepresentabilityReport check_strong(const ConvexFn& f,
                                    const SearchBudget& budget) {
  RepresentabilityReport rep;
  rep.class_tol = budget.class_tol;
  rep.f_geq_c = check_representative(f, budget);

  const int d = f.dim();
  Rng rng(budget.seed + 17);

  // Duality-zero sampling: Prop indep-cond turns inf(f_z + h) = 0 over a
  // dense z-sample into the strong-representability criterion (hat(Z) plus
  // gph(-F) exhausts the dual space here).
  rep.z_sample_count = budget.z_samples;
  for (int k = 0; k < budget.z_samples; ++k) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i)
      v[i] = rng.uniform(budget.box.lo[i], budget.box.hi[i]);
    const double val = prog::min_fz_plus_h(f, v).value;
    rep.duality_zero_max_dev = std::max(rep.duality_zero_max_dev,
                                        std::abs(val));
  }

  // Direct f* >= c sampling on dual points (random plus hatted z-samples).
  ConjugateEngine engine;
  rep.dual_sample_count = budget.dual_samples;
  for (int k = 0; k < budget.dual_samples; ++k) {
    Eigen::VectorXd dflat(d);
    for (int i = 0; i < d; ++i)
      dflat[i] = rng.uniform(budget.box.lo[i], budget.box.hi[i]);
    if (k % 2 == 0) dflat = hat_flat(dflat);
    const double fstar = engine.conjugate_at_flat(f, dflat);
    const double cd = coupling_flat(dflat);
    if (fstar < cd - budget.class_tol) {
      rep.conjugate_geq_c = false;
      if (!rep.conjugate_counterexample)
        rep.conjugate_counterexample = Counterexample{dflat, fstar - cd};
    }
  }

  rep.strong = rep.f_geq_c.no_violation_found && rep.conjugate_geq_c &&
               rep.duality_zero_max_dev <= budget.class_tol;
  return rep;
}

MinusJSplit minus_J_split(const ConvexFn& f, const PairedPoint& z,
                          double tol) {
  const prog::FzhResult inner = prog::min_fz_plus_h(f, z.flat());
  if (std::abs(inner.value) > tol)
    throw std::runtime_error(
        "minus_J_split: inf(f_z + h) = " + std::to_string(inner.value) +
        " is not zero; f is not strongly representable at this tolerance");

  MinusJSplit out;
  out.primal_value = inner.value;
  const Eigen::VectorXd hz = hat_flat(z.flat());
  const Eigen::VectorXd zstar_flat = hz - inner.step;
  out.zstar = DualPoint::FromFlat(zstar_flat);

  ConjugateEngine engine;
  out.bracket_fstar =
      engine.conjugate_at_flat(f, zstar_flat) - coupling_flat(zstar_flat);
  const int n = z.dim();
  // h*(w*) + c(w*) collapses to the perfect square 1/2 ||u* + u**||^2.
  out.bracket_h = 0.5 * (inner.step.head(n) + inner.step.tail(n)).squaredNorm();
  out.norm_sq = inner.step.squaredNorm();
  out.fsquare_gap = engine.conjugate_at_flat(f, hz) - coupling_flat(hz);

  if (out.bracket_fstar > tol || out.bracket_h > tol)
    throw std::runtime_error(
        "minus_J_split: bracket residuals exceed tolerance (" +
        std::to_string(out.bracket_fstar) + ", " +
        std::to_string(out.bracket_h) + ")");
  if (out.norm_sq > 2.0 * out.fsquare_gap + tol)
    throw std::logic_error(
        "minus_J_split: ||hat z - z*||^2 exceeds 2 (f*(hat z) - c(hat z))");
  return out;
}

DistanceCertificate distance_certificate(const ConvexFn& f,
                                         const PairedPoint& z, double tol) {
  DistanceCertificate cert;
  cert.z = z;
  cert.gap = f.eval(z) - coupling(z);
  if (cert.gap < -tol)
    throw std::runtime_error(
        "distance_certificate: f(z) < c(z); f fails representativeness");
  if (!std::isfinite(cert.gap))
    throw std::invalid_argument("distance_certificate: z outside dom f");
  cert.primal_bound = 2.0 * std::sqrt(std::max(cert.gap, 0.0));

  const prog::FzhResult inner = prog::min_fz_plus_h(f, z.flat());
  cert.landing = PairedPoint::FromFlat(z.flat() + inner.step);
  cert.measured_distance = inner.step.norm();
  if (cert.measured_distance > cert.primal_bound + tol)
    throw std::logic_error(
        "distance_certificate: measured distance exceeds the 2 sqrt(gap) "
        "bound; certification of f is unsound");

  const MinusJSplit split = minus_J_split(f, z, std::max(tol, 1e-7));
  cert.dual_partner = split.zstar;
  cert.dual_lower = (std::sqrt(2.0) - 1.0) * std::sqrt(split.norm_sq);
  cert.dual_upper = std::sqrt(std::max(0.0, 2.0 * split.fsquare_gap));
  return cert;
}

NIVerdict check_NI(const OperatorGraph& M, const std::vector<DualPoint>& duals,
                   double tol) {
  NIVerdict v;
  v.sample_count = static_cast<int>(duals.size());
  for (const DualPoint& dpt : duals) {
    const Eigen::VectorXd d = dpt.flat();
    double phi = -kInf;  // c_M^*(d): finite max over the graph
    for (const auto& w : M.points)
      phi = std::max(phi, w.flat().dot(d) - coupling(w));
    const double cd = coupling(dpt);
    if (phi < cd - tol) {
      v.pass = false;
      if (!v.counterexample) v.counterexample = Counterexample{d, phi - cd};
    }
  }
  return v;
}

LocallyMaxVerdict check_locally_max(const OperatorGraph& M,
                                    const std::vector<Box>& xs_boxes,
                                    const std::vector<PairedPoint>& z_samples,
                                    double tol, double membership_tol) {
  LocallyMaxVerdict verdict;
  const int n = M.dim();
  auto xs_in_box = [&](const Eigen::VectorXd& xs, const Box& box) {
    for (int i = 0; i < n; ++i)
      if (xs[i] <= box.lo[i] || xs[i] >= box.hi[i]) return false;  // open box
    return true;
  };

  for (size_t bi = 0; bi < xs_boxes.size(); ++bi) {
    const Box& box = xs_boxes[bi];
    detail::require(box.dim() == n,
                    "check_locally_max: box must live on the dual block");
    bool meets_range = false;
    for (const auto& w : M.points)
      if (xs_in_box(w.xs, box)) meets_range = true;
    if (!meets_range) {
      verdict.notes.push_back("box " + std::to_string(bi) +
                              " skipped: does not meet Im M");
      continue;
    }
    for (const auto& z : z_samples) {
      if (!xs_in_box(z.xs, box)) continue;
      double dist = kInf;
      for (const auto& w : M.points) dist = std::min(dist, znorm(z - w));
      if (dist <= membership_tol) continue;  // z on the sampled graph
      ++verdict.tested;
      bool found = false;
      for (const auto& w : M.points) {
        if (!xs_in_box(w.xs, box)) continue;
        if (coupling(z - w) < -tol) {
          found = true;
          break;
        }
      }
      if (!found) {
        verdict.pass = false;
        verdict.failures.emplace_back(z, static_cast<int>(bi));
      }
    }
  }
  return verdict;
}

ExtensionWitnesses maximality_extension_test(
    const std::vector<PairedPoint>& M_points, const Box& grid_box,
    int resolution, double tol, double dist_tol) {
  detail::require(!M_points.empty(), "maximality_extension_test: empty M");
  const int d = grid_box.dim();
  detail::require(d == 2 * M_points.front().dim(),
                  "maximality_extension_test: grid must span the paired space");
  ExtensionWitnesses out;
  long long total = 1;
  for (int k = 0; k < d; ++k) total *= resolution;
  detail::require(total <= 4e6, "maximality_extension_test: grid too large");
  Eigen::VectorXd v(d);
  for (long long it = 0; it < total; ++it) {
    long long rest = it;
    for (int k = 0; k < d; ++k) {
      const int i = static_cast<int>(rest % resolution);
      rest /= resolution;
      v[k] = grid_box.lo[k] +
             (grid_box.hi[k] - grid_box.lo[k]) * i / (resolution - 1);
    }
    ++out.grid_count;
    const PairedPoint z = PairedPoint::FromFlat(v);
    double dist = kInf;
    for (const auto& w : M_points) dist = std::min(dist, znorm(z - w));
    if (dist <= dist_tol) continue;
    bool related = true;
    for (const auto& w : M_points) {
      if (coupling(z - w) < -tol) {
        related = false;
        break;
      }
    }
    if (related) out.witnesses.push_back(z);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {
nlohmann::json vec_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}
}  // namespace

nlohmann::json to_json(const RepresentativeVerdict& v) {
  nlohmann::json j;
  j["verdict"] = v.no_violation_found ? "no-violation-found" : "counterexample";
  j["resolution"] = v.resolution;
  j["multistarts"] = v.multistarts;
  j["tol"] = v.tol;
  if (v.counterexample) {
    j["counterexample"]["point"] = vec_json(v.counterexample->point);
    j["counterexample"]["gap"] = v.counterexample->gap;
  }
  return j;
}

nlohmann::json to_json(const RepresentabilityReport& r) {
  nlohmann::json j;
  j["f_geq_c"] = to_json(r.f_geq_c);
  j["conjugate_geq_c"] = r.conjugate_geq_c ? "certified-by-sampling"
                                           : "counterexample";
  if (r.conjugate_counterexample) {
    j["conjugate_counterexample"]["point"] =
        vec_json(r.conjugate_counterexample->point);
    j["conjugate_counterexample"]["gap"] = r.conjugate_counterexample->gap;
  }
  j["duality_zero_max_dev"] = r.duality_zero_max_dev;
  j["sample_counts"]["z"] = r.z_sample_count;
  j["sample_counts"]["dual"] = r.dual_sample_count;
  j["class_tol"] = r.class_tol;
  j["strong"] = r.strong;
  return j;
}

nlohmann::json to_json(const MinusJSplit& s) {
  nlohmann::json j;
  j["zstar"] = vec_json(s.zstar.flat());
  j["primal_value"] = s.primal_value;
  j["bracket_fstar"] = s.bracket_fstar;
  j["bracket_h"] = s.bracket_h;
  j["norm_sq"] = s.norm_sq;
  j["fsquare_gap"] = s.fsquare_gap;
  return j;
}

nlohmann::json to_json(const DistanceCertificate& c) {
  nlohmann::json j;
  j["z"] = vec_json(c.z.flat());
  j["gap"] = c.gap;
  j["primal_bound"] = c.primal_bound;
  j["landing"] = vec_json(c.landing.flat());
  j["measured_distance"] = c.measured_distance;
  j["dual_partner"] = vec_json(c.dual_partner.flat());
  j["dual_lower"] = c.dual_lower;
  j["dual_upper"] = c.dual_upper;
  return j;
}

}  // namespace repkit
