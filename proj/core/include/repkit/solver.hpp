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

#ifndef REPKIT_SOLVER_HPP_
#define REPKIT_SOLVER_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace repkit::qp {

// Dense convex quadratic program
//
//    minimize   1/2 y'Py + c'y + constant
//    subject to G_i y <= g_i          (inequality rows)
//               G_j y  = g_j          (equality rows)
//
// with P symmetric positive semidefinite.  P = 0 gives a linear program.
// Solved by a primal active-set method with a phase-1 start; all pivots and
// tie breaks pick the smallest index, so identical inputs produce identical
// iterates.  Sizes here are desk scale (tens of variables, a few hundred
// rows); everything is dense Eigen.

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct Problem {
  Eigen::MatrixXd P;  // N x N, PSD (checked loosely: symmetrized on entry)
  Eigen::VectorXd c;  // N
  double constant = 0.0;
  Eigen::MatrixXd G;  // M x N
  Eigen::VectorXd g;  // M
  std::vector<std::uint8_t> equality;  // M flags; empty means all inequalities

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(g.size()); }
};

struct Options {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  int max_iterations = 0;  // 0 = automatic from problem size
  // After an LP solve, refine the optimizer to the lexicographically
  // smallest optimal vertex (coordinate by coordinate).
  bool lexicographic = false;
};

struct Result {
  Status status = Status::kIterationLimit;
  Eigen::VectorXd y;      // optimizer (or last feasible iterate)
  double value = 0.0;     // objective at y, constant included
  Eigen::VectorXd ray;    // feasible descent ray when kUnbounded
  Eigen::VectorXd multipliers;  // per-row KKT multipliers (0 on inactive rows)
  int iterations = 0;

  bool ok() const { return status == Status::kOptimal; }
};

Result solve(const Problem& problem, const Options& options = {});

// Feasibility of {Gy <= g, equality rows tight}: phase-1 only.
Result find_feasible(const Problem& problem, const Options& options = {});

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace repkit::qp

#endif  // REPKIT_SOLVER_HPP_
