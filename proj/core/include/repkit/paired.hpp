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

#ifndef REPKIT_PAIRED_HPP_
#define REPKIT_PAIRED_HPP_

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace repkit {

// Geometry of the paired space Z = R^n x R^n.  A point z = (x, xs) carries a
// primal block x and a dual block xs of equal length.  All inner products are
// Euclidean; under that norm the duality map of R^n is the identity, which
// keeps every criterion built on it single valued.

struct DualPoint;

struct PairedPoint {
  Eigen::VectorXd x;   // primal block
  Eigen::VectorXd xs;  // dual block

  PairedPoint() = default;
  PairedPoint(Eigen::VectorXd x_in, Eigen::VectorXd xs_in);

  // Builds a point from one flat vector (x stacked over xs).
  static PairedPoint FromFlat(const Eigen::VectorXd& v);

  int dim() const { return static_cast<int>(x.size()); }
  Eigen::VectorXd flat() const;

  PairedPoint operator+(const PairedPoint& o) const;
  PairedPoint operator-(const PairedPoint& o) const;
  PairedPoint operator-() const;
  PairedPoint operator*(double s) const;
};

struct DualPoint {
  Eigen::VectorXd us;   // X* block
  Eigen::VectorXd uss;  // X** block

  DualPoint() = default;
  DualPoint(Eigen::VectorXd us_in, Eigen::VectorXd uss_in);

  static DualPoint FromFlat(const Eigen::VectorXd& v);

  int dim() const { return static_cast<int>(us.size()); }
  Eigen::VectorXd flat() const;

  DualPoint operator+(const DualPoint& o) const;
  DualPoint operator-(const DualPoint& o) const;
};

// c(z) = <x, xs>.
double coupling(const PairedPoint& z);
// Coupling on the dual space, c(d) = <us, uss>.
double coupling(const DualPoint& d);

// <z1, z2> = <x1, xs2> + <x2, xs1>; symmetric, and <z, z> = 2 c(z).
double pairing(const PairedPoint& z1, const PairedPoint& z2);

// ||z|| = (||x||^2 + ||xs||^2)^{1/2}.
double znorm(const PairedPoint& z);
double znorm(const DualPoint& d);

// hat(z) = (xs, x); the canonical injection is the coordinate identity here,
// so hat is a block swap.  unhat inverts it.
DualPoint hat(const PairedPoint& z);
PairedPoint unhat(const DualPoint& d);

// Duality mapping of (R^n, ||.||_2): the identity.
Eigen::VectorXd duality_map(const Eigen::VectorXd& x);

namespace detail {
void require(bool cond, const std::string& what);
void require_finite(const Eigen::VectorXd& v, const std::string& what);
}  // namespace detail

}  // namespace repkit

#endif  // REPKIT_PAIRED_HPP_
