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

#include "repkit/paired.hpp"

#include <cmath>

namespace repkit {

namespace detail {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

void require_finite(const Eigen::VectorXd& v, const std::string& what) {
  if (!v.allFinite()) throw std::invalid_argument(what + ": non-finite entry");
}

}  // namespace detail

PairedPoint::PairedPoint(Eigen::VectorXd x_in, Eigen::VectorXd xs_in)
    : x(std::move(x_in)), xs(std::move(xs_in)) {
  detail::require(x.size() == xs.size() && x.size() >= 1,
                  "PairedPoint: x and xs must share length n >= 1");
  detail::require_finite(x, "PairedPoint.x");
  detail::require_finite(xs, "PairedPoint.xs");
}

PairedPoint PairedPoint::FromFlat(const Eigen::VectorXd& v) {
  detail::require(v.size() % 2 == 0 && v.size() >= 2,
                  "PairedPoint::FromFlat: even length >= 2 required");
  const int n = static_cast<int>(v.size()) / 2;
  return PairedPoint(v.head(n), v.tail(n));
}

Eigen::VectorXd PairedPoint::flat() const {
  Eigen::VectorXd v(2 * dim());
  v << x, xs;
  return v;
}

PairedPoint PairedPoint::operator+(const PairedPoint& o) const {
  detail::require(dim() == o.dim(), "PairedPoint: dimension mismatch");
  return PairedPoint(x + o.x, xs + o.xs);
}

PairedPoint PairedPoint::operator-(const PairedPoint& o) const {
  detail::require(dim() == o.dim(), "PairedPoint: dimension mismatch");
  return PairedPoint(x - o.x, xs - o.xs);
}

PairedPoint PairedPoint::operator-() const { return PairedPoint(-x, -xs); }

PairedPoint PairedPoint::operator*(double s) const {
  return PairedPoint(s * x, s * xs);
}

DualPoint::DualPoint(Eigen::VectorXd us_in, Eigen::VectorXd uss_in)
    : us(std::move(us_in)), uss(std::move(uss_in)) {
  detail::require(us.size() == uss.size() && us.size() >= 1,
                  "DualPoint: us and uss must share length n >= 1");
  detail::require_finite(us, "DualPoint.us");
  detail::require_finite(uss, "DualPoint.uss");
}

DualPoint DualPoint::FromFlat(const Eigen::VectorXd& v) {
  detail::require(v.size() % 2 == 0 && v.size() >= 2,
                  "DualPoint::FromFlat: even length >= 2 required");
  const int n = static_cast<int>(v.size()) / 2;
  return DualPoint(v.head(n), v.tail(n));
}

Eigen::VectorXd DualPoint::flat() const {
  Eigen::VectorXd v(2 * dim());
  v << us, uss;
  return v;
}

DualPoint DualPoint::operator+(const DualPoint& o) const {
  detail::require(dim() == o.dim(), "DualPoint: dimension mismatch");
  return DualPoint(us + o.us, uss + o.uss);
}

DualPoint DualPoint::operator-(const DualPoint& o) const {
  detail::require(dim() == o.dim(), "DualPoint: dimension mismatch");
  return DualPoint(us - o.us, uss - o.uss);
}

double coupling(const PairedPoint& z) { return z.x.dot(z.xs); }

double coupling(const DualPoint& d) { return d.us.dot(d.uss); }

double pairing(const PairedPoint& z1, const PairedPoint& z2) {
  detail::require(z1.dim() == z2.dim(), "pairing: dimension mismatch");
  return z1.x.dot(z2.xs) + z2.x.dot(z1.xs);
}

double znorm(const PairedPoint& z) {
  return std::sqrt(z.x.squaredNorm() + z.xs.squaredNorm());
}

double znorm(const DualPoint& d) {
  return std::sqrt(d.us.squaredNorm() + d.uss.squaredNorm());
}

DualPoint hat(const PairedPoint& z) { return DualPoint(z.xs, z.x); }

PairedPoint unhat(const DualPoint& d) { return PairedPoint(d.uss, d.us); }

Eigen::VectorXd duality_map(const Eigen::VectorXd& x) { return x; }

}  // namespace repkit
