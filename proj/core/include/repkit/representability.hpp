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

#ifndef REPKIT_REPRESENTABILITY_HPP_
#define REPKIT_REPRESENTABILITY_HPP_

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "repkit/convex_fn.hpp"
#include "repkit/fitzpatrick.hpp"
#include "repkit/paired.hpp"

namespace repkit {

// Certification of representative / strong-representative functions and the
// operator-class predicates.  f >= c admits no finite certificate (the gap
// f - c is indefinite), so those verdicts are explicit about their epistemic
// status: either a reproducible counterexample or "no violation found" at a
// recorded resolution.  Strong representability is operationalized through
// the duality-zero program, which in finite dimensions covers the whole dual
// space criterion.

struct SearchBudget {
  Box box;                 // search region over flat paired coordinates
  int resolution = 21;     // grid points per coordinate
  int multistarts = 8;     // local descents refining the worst grid points
  int z_samples = 32;      // duality-zero sample count
  int dual_samples = 64;   // f* >= c sample count
  std::uint64_t seed = 1;
  double class_tol = 1e-7;

  static SearchBudget standard(int pair_dim, double radius = 2.0);
};

struct Counterexample {
  Eigen::VectorXd point;  // flat coordinates (paired or dual)
  double gap = 0.0;       // reproducible by re-evaluation
};

struct RepresentativeVerdict {
  bool no_violation_found = true;
  std::optional<Counterexample> counterexample;
  int resolution = 0;
  int multistarts = 0;
  double tol = 0.0;
};

struct RepresentabilityReport {
  RepresentativeVerdict f_geq_c;
  bool conjugate_geq_c = true;
  std::optional<Counterexample> conjugate_counterexample;
  double duality_zero_max_dev = 0.0;
  int z_sample_count = 0;
  int dual_sample_count = 0;
  double class_tol = 0.0;
  bool strong = false;
};

// Optimal value of min_w [f_z(w) + h(w)]; 0 (within tolerance) iff f behaves
// as a strong representative at z.
double duality_zero(const ConvexFn& f, const PairedPoint& z);

// Searches for violations of f >= c: grid scan plus multistart local descent
// on the concave-convex gap (a difference-of-convex iteration, each step one
// exact convex program).
RepresentativeVerdict check_representative(const ConvexFn& f,
                                           const SearchBudget& budget);

RepresentabilityReport check_strong(const ConvexFn& f,
                                    const SearchBudget& budget);

struct MinusJSplit {
  DualPoint zstar;          // point of M_{f*} with hat(z) - zstar in gph(-F)
  double primal_value = 0;  // min(f_z + h), ~0 for strong representatives
  double bracket_fstar = 0; // f*(z*) - c(z*), cross-checked by a conjugate solve
  double bracket_h = 0;     // h*(w*) + c(w*) = 1/2 ||u* + u**||^2
  double norm_sq = 0;       // ||hat z - z*||^2
  double fsquare_gap = 0;   // f*(hat z) - c(hat z)
};

// Splits hat(z) across M_{f*} and gph(-F_{X*}) by solving the primal
// duality-zero program and reading the dual point off its optimality system.
// Throws when the optimal value stays away from zero (f not strong).
MinusJSplit minus_J_split(const ConvexFn& f, const PairedPoint& z,
                          double tol = 1e-7);

struct DistanceCertificate {
  PairedPoint z;
  double gap = 0.0;            // f(z) - c(z)
  double primal_bound = 0.0;   // 2 sqrt(gap)
  PairedPoint landing;         // M_f point reached by the exact step
  double measured_distance = 0.0;  // ||z - landing|| <= primal_bound
  DualPoint dual_partner;
  double dual_lower = 0.0;     // (sqrt(2) - 1) ||hat z - z*||
  double dual_upper = 0.0;     // sqrt(2 (f_square(z) - c(z)))
};

DistanceCertificate distance_certificate(const ConvexFn& f,
                                         const PairedPoint& z,
                                         double tol = 1e-7);

struct NIVerdict {
  bool pass = true;
  std::optional<Counterexample> counterexample;  // dual point with Phi < c
  int sample_count = 0;
};

// Phi_M(d) = c_M^*(d) >= c(d) over the supplied dual sample.
NIVerdict check_NI(const OperatorGraph& M, const std::vector<DualPoint>& duals,
                   double tol = 1e-9);

struct LocallyMaxVerdict {
  bool pass = true;
  std::vector<std::string> notes;  // skipped boxes etc.
  // failures: (z, box index) pairs with no witness w.
  std::vector<std::pair<PairedPoint, int>> failures;
  int tested = 0;
};

// For every x*-window U meeting Im M and every sampled z in X x U off the
// graph, demands w in M with dual part in U and c(z - w) < -tol.
LocallyMaxVerdict check_locally_max(const OperatorGraph& M,
                                    const std::vector<Box>& xs_boxes,
                                    const std::vector<PairedPoint>& z_samples,
                                    double tol = 1e-9,
                                    double membership_tol = 1e-6);

struct ExtensionWitnesses {
  std::vector<PairedPoint> witnesses;  // grid points extending M monotonically
  int grid_count = 0;
};

// Finite surrogate for maximality: reports grid candidates that are
// monotonically related to all of M yet far from it.
ExtensionWitnesses maximality_extension_test(
    const std::vector<PairedPoint>& M_points, const Box& grid_box,
    int resolution, double tol = 1e-9, double dist_tol = 1e-6);

nlohmann::json to_json(const RepresentativeVerdict& v);
nlohmann::json to_json(const RepresentabilityReport& r);
nlohmann::json to_json(const MinusJSplit& s);
nlohmann::json to_json(const DistanceCertificate& c);

}  // namespace repkit

#endif  // REPKIT_REPRESENTABILITY_HPP_
