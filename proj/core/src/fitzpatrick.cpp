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

#include "repkit/fitzpatrick.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "repkit/program_builder.hpp"

namespace repkit {

OperatorGraph OperatorGraph::make(std::vector<PairedPoint> points,
                                  std::string label) {
  detail::require(!points.empty(), "OperatorGraph: empty graph");
  const int n = points.front().dim();
  for (const auto& p : points)
    detail::require(p.dim() == n, "OperatorGraph: mixed dimensions");
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      detail::require(znorm(points[i] - points[j]) > 1e-12,
                      "OperatorGraph: duplicate point at indices " +
                          std::to_string(i) + "," + std::to_string(j));
  OperatorGraph g;
  g.points = std::move(points);
  g.label = std::move(label);
  return g;
}

OperatorGraph OperatorGraph::from_csv(std::istream& in, std::string label) {
  std::string line;
  detail::require(static_cast<bool>(std::getline(in, line)),
                  "graph csv: missing header");
  const auto eq = line.find('=');
  detail::require(line.rfind("dim", 0) == 0 && eq != std::string::npos,
                  "graph csv: header must be dim=n");
  const int n = std::stoi(line.substr(eq + 1));
  detail::require(n >= 1, "graph csv: dimension must be >= 1");
  std::vector<PairedPoint> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    Eigen::VectorXd v(2 * n);
    std::string cell;
    for (int k = 0; k < 2 * n; ++k) {
      detail::require(static_cast<bool>(std::getline(ss, cell, ',')),
                      "graph csv: short row");
      v[k] = std::stod(cell);
    }
    pts.push_back(PairedPoint::FromFlat(v));
  }
  return make(std::move(pts), std::move(label));
}

void OperatorGraph::to_csv(std::ostream& out) const {
  out << "dim=" << dim() << "\n";
  for (const auto& p : points) {
    const Eigen::VectorXd v = p.flat();
    for (int k = 0; k < v.size(); ++k) {
      if (k) out << ",";
      out << v[k];
    }
    out << "\n";
  }
}

ConvexFn fitzpatrick_fn(const OperatorGraph& M) {
  const int n = M.dim();
  Eigen::MatrixXd slopes(M.size(), 2 * n);
  Eigen::VectorXd offsets(M.size());
  for (int i = 0; i < M.size(); ++i) {
    slopes.row(i) = hat(M.points[i]).flat().transpose();
    offsets[i] = coupling(M.points[i]);
  }
  return ConvexFn::max_affine(std::move(slopes), std::move(offsets));
}

MonotonicityVerdict is_monotone(const OperatorGraph& M, double tol) {
  MonotonicityVerdict v;
  v.worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < M.size(); ++i) {
    for (int j = i + 1; j < M.size(); ++j) {
      const double c = coupling(M.points[i] - M.points[j]);
      if (c < v.worst) v.worst = c;
      if (c < -tol && !v.witness) {
        v.monotone = false;
        v.witness = {i, j};
      }
    }
  }
  if (M.size() < 2) v.worst = 0.0;
  return v;
}

bool is_monotonically_related(const PairedPoint& z, const OperatorGraph& M,
                              double tol) {
  for (const auto& w : M.points)
    if (coupling(z - w) < -tol) return false;
  return true;
}

double approx_monotonicity_bound(const ConvexFn& f, const PairedPoint& z1,
                                 double e1, const PairedPoint& z2, double e2,
                                 double tol) {
  const double g1 = f.eval(z1) - coupling(z1);
  if (!(g1 <= e1 + tol))
    throw std::invalid_argument(
        "approx_monotonicity_bound: z1 violates f(z1) <= c(z1) + e1 (gap " +
        std::to_string(g1) + ")");
  const double g2 = f.eval(z2) - coupling(z2);
  if (!(g2 <= e2 + tol))
    throw std::invalid_argument(
        "approx_monotonicity_bound: z2 violates f(z2) <= c(z2) + e2 (gap " +
        std::to_string(g2) + ")");
  const double c = coupling(z1 - z2);
  if (c < -2.0 * (e1 + e2) - tol)
    throw std::logic_error(
        "approx_monotonicity_bound: bound violated; representative "
        "certification of f is unsound");
  return c;
}

Box Box::cube(int dim, double lo, double hi) {
  Box b;
  b.lo = Eigen::VectorXd::Constant(dim, lo);
  b.hi = Eigen::VectorXd::Constant(dim, hi);
  return b;
}

Eigen::MatrixXd EqualitySet::as_matrix() const {
  if (points.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(points.size(), 2 * points.front().dim());
  for (size_t i = 0; i < points.size(); ++i)
    m.row(static_cast<int>(i)) = points[i].flat().transpose();
  return m;
}

EqualitySet equality_set(const ConvexFn& f, const Box& box, int resolution,
                         double tol) {
  const int d = f.dim();
  detail::require(box.dim() == d, "equality_set: box dimension mismatch");
  detail::require(resolution >= 2, "equality_set: resolution >= 2");
  double total = 1;
  for (int k = 0; k < d; ++k) total *= resolution;
  detail::require(total <= 4e6, "equality_set: grid too large");

  EqualitySet out;
  std::vector<int> idx(d, 0);
  Eigen::VectorXd v(d);
  const long long count = static_cast<long long>(total);
  for (long long it = 0; it < count; ++it) {
    long long rest = it;
    for (int k = 0; k < d; ++k) {
      const int i = static_cast<int>(rest % resolution);
      rest /= resolution;
      v[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * i / (resolution - 1);
    }
    const double gap = f.eval_flat(v) - coupling_flat(v);
    if (!(gap <= tol)) continue;
    Eigen::VectorXd refined = v;
    double resid = std::abs(gap);
    if (resid > tol / 10) {
      // One exact f_z + h step lands on M_f when f is a strong
      // representative; keep the grid point if it does not help.
      try {
        const prog::FzhResult step = prog::min_fz_plus_h(f, v);
        const Eigen::VectorXd cand = v + step.step;
        const double cand_resid =
            std::abs(f.eval_flat(cand) - coupling_flat(cand));
        if (cand_resid < resid) {
          refined = cand;
          resid = cand_resid;
        }
      } catch (const qp::SolverError&) {
      }
    }
    out.points.push_back(PairedPoint::FromFlat(refined));
    out.residuals.push_back(resid);
  }
  return out;
}

}  // namespace repkit
