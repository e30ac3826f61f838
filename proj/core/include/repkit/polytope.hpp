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

#ifndef REPKIT_POLYTOPE_HPP_
#define REPKIT_POLYTOPE_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace repkit::poly {

// A polyhedron {x : A_i x <= b_i} with optional equality rows.
struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<std::uint8_t> equality;  // empty = all inequalities

  int dim() const { return static_cast<int>(A.cols()); }
  int rows() const { return static_cast<int>(b.size()); }

  static LinearSystem Empty(int dim);
  void append(const Eigen::VectorXd& normal, double bound, bool eq = false);
};

bool feasible(const LinearSystem& sys, double tol = 1e-9);

// Exact projection onto the coordinates listed in `keep` (order preserved):
// equality rows are substituted out by Gaussian elimination, the remaining
// variables leave by Fourier-Motzkin with LP-based redundancy pruning.
LinearSystem project(const LinearSystem& sys, const std::vector<int>& keep,
                     double tol = 1e-9);

struct RiReport {
  bool in_set = false;       // point belongs to the polyhedron
  bool in_ri = false;        // point belongs to the relative interior
  std::vector<int> blocking_rows;  // active non-implicit rows at the point
  std::string note;
};

// Relative-interior membership for a polyhedron in inequality form.  A row
// active at the point blocks membership unless it is an implicit equality of
// the whole set (checked by one LP per active row).
RiReport relative_interior_member(const LinearSystem& sys,
                                  const Eigen::VectorXd& point,
                                  double tol = 1e-9);

// Whether a linear image {Mx : x in sys} is all of its target space is not
// needed; unbounded projections are reported by `project` returning no rows.

// [min, max] of a nonempty 1-d point list.
std::pair<double, double> interval_hull(const std::vector<double>& pts);

// Convex hull of 2-d points, counter-clockwise, no repeated endpoint.
std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> pts);

bool point_in_hull_2d(const std::vector<Eigen::Vector2d>& hull,
                      const Eigen::Vector2d& p, double tol = 1e-9);

double dist_point_segment(const Eigen::VectorXd& p, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b);

// Directed and symmetric Hausdorff distances between finite point sets given
// as rows of a matrix.
double directed_hausdorff(const Eigen::MatrixXd& from, const Eigen::MatrixXd& to);
double hausdorff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace repkit::poly

#endif  // REPKIT_POLYTOPE_HPP_
