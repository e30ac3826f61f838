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

#include "repkit/convex_fn.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "repkit/program_builder.hpp"

namespace repkit {

using fn_detail::AddData;
using fn_detail::ComposedData;
using fn_detail::IndicatorData;
using fn_detail::InfComposedData;
using fn_detail::MaxAffineData;
using fn_detail::Node;
using fn_detail::NodePtr;
using fn_detail::QuadraticData;
using fn_detail::ScaledData;
using fn_detail::ShiftedData;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

NodePtr make_node(int dim, fn_detail::NodeData data) {
  auto n = std::make_shared<Node>();
  n->dim = dim;
  n->data = std::move(data);
  return n;
}

bool has_indicator(const Node& n) {
  return std::visit(
      [](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IndicatorData>) {
          return true;
        } else if constexpr (std::is_same_v<T, AddData>) {
          for (const auto& t : d.terms)
            if (has_indicator(*t)) return true;
          return false;
        } else if constexpr (std::is_same_v<T, ShiftedData> ||
                             std::is_same_v<T, ScaledData> ||
                             std::is_same_v<T, ComposedData> ||
                             std::is_same_v<T, InfComposedData>) {
          return has_indicator(*d.inner);
        } else {
          return false;
        }
      },
      n.data);
}

ConvexFn wrap(NodePtr n);

void validate_proper(const ConvexFn& f) {
  if (!has_indicator(f.node())) return;
  const prog::DomRows dom = prog::dom_rows(f);
  if (!poly::feasible(dom.sys))
    throw std::invalid_argument(
        "ConvexFn: improper function (empty effective domain)");
}

double eval_node(const Node& n, const Eigen::VectorXd& v);

}  // namespace

double coupling_flat(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size()) / 2;
  return v.head(n).dot(v.tail(n));
}

Eigen::VectorXd hat_flat(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size()) / 2;
  Eigen::VectorXd out(v.size());
  out << v.tail(n), v.head(n);
  return out;
}

namespace {

double eval_node(const Node& n, const Eigen::VectorXd& v) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, MaxAffineData>) {
          return (d.slopes * v - d.offsets).maxCoeff();
        } else if constexpr (std::is_same_v<T, QuadraticData>) {
          return 0.5 * v.dot(d.Q * v) + d.q.dot(v) + d.r;
        } else if constexpr (std::is_same_v<T, IndicatorData>) {
          for (int i = 0; i < d.rows.rows(); ++i) {
            const double resid = d.rows.A.row(i).dot(v) - d.rows.b[i];
            const double scale = 1.0 + std::abs(d.rows.b[i]);
            const bool eq = !d.rows.equality.empty() && d.rows.equality[i];
            if (eq ? std::abs(resid) > 1e-11 * scale : resid > 1e-11 * scale)
              return kInf;
          }
          return 0.0;
        } else if constexpr (std::is_same_v<T, AddData>) {
          double s = 0.0;
          for (const auto& t : d.terms) {
            const double val = eval_node(*t, v);
            if (val == kInf) return kInf;
            s += val;
          }
          return s;
        } else if constexpr (std::is_same_v<T, ShiftedData>) {
          const Eigen::VectorXd w = d.z0 + v;
          const double inner = eval_node(*d.inner, w);
          if (inner == kInf) return kInf;
          return inner - coupling_flat(w) + coupling_flat(v);
        } else if constexpr (std::is_same_v<T, ScaledData>) {
          const int half = n.dim / 2;
          Eigen::VectorXd w(v.size());
          w << v.head(half), v.tail(half) / d.alpha;
          const double inner = eval_node(*d.inner, w);
          if (inner == kInf) return kInf;
          return d.alpha * inner;
        } else if constexpr (std::is_same_v<T, ComposedData>) {
          return eval_node(*d.inner, d.B * v + d.d);
        } else {
          static_assert(std::is_same_v<T, InfComposedData>);
          return prog::eval_with_solver(wrap(std::make_shared<Node>(n)),
                                        v);
        }
      },
      n.data);
}

ConvexFn wrap(NodePtr n) { return ConvexFn::from_node(std::move(n)); }

}  // namespace

ConvexFn ConvexFn::from_node(fn_detail::NodePtr n) {
  return ConvexFn(std::move(n));
}

ConvexFn ConvexFn::max_affine(Eigen::MatrixXd slopes,
                              Eigen::VectorXd offsets) {
  detail::require(slopes.rows() >= 1, "max_affine: at least one piece");
  detail::require(slopes.rows() == offsets.size(),
                  "max_affine: piece count mismatch");
  const int dim = static_cast<int>(slopes.cols());
  return wrap(make_node(dim, MaxAffineData{std::move(slopes),
                                           std::move(offsets)}));
}

ConvexFn ConvexFn::affine(const Eigen::VectorXd& slope, double offset) {
  Eigen::MatrixXd slopes(1, slope.size());
  slopes.row(0) = slope.transpose();
  Eigen::VectorXd offsets(1);
  offsets[0] = offset;
  return max_affine(std::move(slopes), std::move(offsets));
}

ConvexFn ConvexFn::quadratic(Eigen::MatrixXd Q, Eigen::VectorXd q, double r) {
  detail::require(Q.rows() == Q.cols() && Q.rows() == q.size(),
                  "quadratic: dimension mismatch");
  Eigen::MatrixXd S = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  detail::require(es.eigenvalues().minCoeff() >= -1e-9 * scale,
                  "quadratic: Q must be positive semidefinite");
  const int dim = static_cast<int>(q.size());
  return wrap(make_node(dim, QuadraticData{std::move(S), std::move(q), r}));
}

ConvexFn ConvexFn::indicator(poly::LinearSystem rows) {
  detail::require(rows.rows() >= 1, "indicator: at least one inequality");
  const int dim = rows.dim();
  ConvexFn f = wrap(make_node(dim, IndicatorData{std::move(rows)}));
  validate_proper(f);
  return f;
}

ConvexFn ConvexFn::add(std::vector<ConvexFn> terms) {
  detail::require(!terms.empty(), "add: empty term list");
  const int dim = terms.front().dim();
  std::vector<NodePtr> nodes;
  nodes.reserve(terms.size());
  for (const auto& t : terms) {
    detail::require(t.dim() == dim, "add: term dimension mismatch");
    nodes.push_back(t.node_ptr());
  }
  ConvexFn f = wrap(make_node(dim, AddData{std::move(nodes)}));
  validate_proper(f);
  return f;
}

ConvexFn ConvexFn::composed(ConvexFn inner, Eigen::MatrixXd B,
                            Eigen::VectorXd d) {
  detail::require(B.rows() == inner.dim() && B.rows() == d.size(),
                  "composed: map must target the inner dimension");
  const int dim = static_cast<int>(B.cols());
  ConvexFn f = wrap(make_node(
      dim, ComposedData{inner.node_ptr(), std::move(B), std::move(d)}));
  validate_proper(f);
  return f;
}

ConvexFn ConvexFn::inf_composed(ConvexFn inner, Eigen::MatrixXd outer_map,
                                Eigen::MatrixXd aux_map, Eigen::VectorXd d) {
  detail::require(outer_map.rows() == inner.dim() &&
                      aux_map.rows() == inner.dim() &&
                      d.size() == inner.dim(),
                  "inf_composed: maps must target the inner dimension");
  const int dim = static_cast<int>(outer_map.cols());
  ConvexFn f = wrap(make_node(
      dim, InfComposedData{inner.node_ptr(), std::move(outer_map),
                           std::move(aux_map), std::move(d)}));
  validate_proper(f);
  return f;
}

ConvexFn ConvexFn::h(int n) {
  detail::require(n >= 1, "h: n >= 1 required");
  return quadratic(Eigen::MatrixXd::Identity(2 * n, 2 * n),
                   Eigen::VectorXd::Zero(2 * n), 0.0);
}

ConvexFn ConvexFn::lift(ConvexFn inner, const std::vector<int>& coords,
                        int outer_dim) {
  detail::require(static_cast<int>(coords.size()) == inner.dim(),
                  "lift: coordinate list must match the inner dimension");
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(inner.dim(), outer_dim);
  for (int i = 0; i < inner.dim(); ++i) {
    detail::require(coords[i] >= 0 && coords[i] < outer_dim,
                    "lift: coordinate out of range");
    B(i, coords[i]) = 1.0;
  }
  return composed(std::move(inner), std::move(B),
                  Eigen::VectorXd::Zero(inner.dim()));
}

int ConvexFn::dim() const { return node().dim; }

int ConvexFn::pair_dim() const {
  detail::require(dim() % 2 == 0, "pair_dim: odd total dimension");
  return dim() / 2;
}

const Node& ConvexFn::node() const {
  if (!node_) throw std::logic_error("ConvexFn: empty handle");
  return *node_;
}

double ConvexFn::eval_flat(const Eigen::VectorXd& v) const {
  detail::require(static_cast<int>(v.size()) == dim(),
                  "eval: dimension mismatch");
  return eval_node(node(), v);
}

double ConvexFn::eval(const PairedPoint& z) const {
  return eval_flat(z.flat());
}

ConvexFn ConvexFn::shift(const PairedPoint& z0) const {
  detail::require(2 * z0.dim() == dim(), "shift: dimension mismatch");
  return wrap(make_node(dim(), ShiftedData{node_ptr(), z0.flat()}));
}

ConvexFn ConvexFn::scale(double alpha) const {
  detail::require(alpha > 0.0, "scale: alpha must be positive");
  (void)pair_dim();
  return wrap(make_node(dim(), ScaledData{node_ptr(), alpha}));
}

// ---------------------------------------------------------------------------
// JSON (function-spec schema).  Vectors are arrays of numbers, matrices are
// {"rows": r, "cols": c, "data": [row-major]}.

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json a;
  a["rows"] = m.rows();
  a["cols"] = m.cols();
  json data = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j2 = 0; j2 < m.cols(); ++j2) data.push_back(m(i, j2));
  a["data"] = data;
  return a;
}

Eigen::MatrixXd mat_from_json(const json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto& data = j.at("data");
  detail::require(static_cast<int>(data.size()) == rows * cols,
                  "matrix json: size mismatch");
  Eigen::MatrixXd m(rows, cols);
  int k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j2 = 0; j2 < cols; ++j2) m(i, j2) = data[k++].get<double>();
  return m;
}

json node_to_json(const Node& n) {
  json j;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, MaxAffineData>) {
          j["kind"] = "max_affine";
          json pieces = json::array();
          for (int i = 0; i < d.slopes.rows(); ++i) {
            json p;
            p["slope"] = vec_to_json(d.slopes.row(i).transpose());
            p["offset"] = d.offsets[i];
            pieces.push_back(p);
          }
          j["pieces"] = pieces;
        } else if constexpr (std::is_same_v<T, QuadraticData>) {
          j["kind"] = "quadratic";
          j["Q"] = mat_to_json(d.Q);
          j["q"] = vec_to_json(d.q);
          j["r"] = d.r;
        } else if constexpr (std::is_same_v<T, IndicatorData>) {
          j["kind"] = "indicator_polyhedron";
          json rows = json::array();
          for (int i = 0; i < d.rows.rows(); ++i) {
            json r;
            r["normal"] = vec_to_json(d.rows.A.row(i).transpose());
            r["bound"] = d.rows.b[i];
            if (!d.rows.equality.empty() && d.rows.equality[i])
              r["equality"] = true;
            rows.push_back(r);
          }
          j["inequalities"] = rows;
        } else if constexpr (std::is_same_v<T, AddData>) {
          j["kind"] = "add";
          json terms = json::array();
          for (const auto& t : d.terms) terms.push_back(node_to_json(*t));
          j["terms"] = terms;
        } else if constexpr (std::is_same_v<T, ShiftedData>) {
          j["kind"] = "shifted";
          j["inner"] = node_to_json(*d.inner);
          j["z0"] = vec_to_json(d.z0);
        } else if constexpr (std::is_same_v<T, ScaledData>) {
          j["kind"] = "scaled";
          j["inner"] = node_to_json(*d.inner);
          j["alpha"] = d.alpha;
        } else if constexpr (std::is_same_v<T, ComposedData>) {
          j["kind"] = "composed";
          j["inner"] = node_to_json(*d.inner);
          j["B"] = mat_to_json(d.B);
          j["d"] = vec_to_json(d.d);
        } else {
          static_assert(std::is_same_v<T, InfComposedData>);
          j["kind"] = "inf_composed";
          j["inner"] = node_to_json(*d.inner);
          j["outer_map"] = mat_to_json(d.outer_map);
          j["aux_map"] = mat_to_json(d.aux_map);
          j["d"] = vec_to_json(d.d);
        }
      },
      n.data);
  return j;
}

}  // namespace

nlohmann::json ConvexFn::to_json() const { return node_to_json(node()); }

ConvexFn ConvexFn::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "max_affine") {
    const auto& pieces = j.at("pieces");
    detail::require(!pieces.empty(), "max_affine json: empty pieces");
    const int dim = static_cast<int>(pieces[0].at("slope").size());
    Eigen::MatrixXd slopes(pieces.size(), dim);
    Eigen::VectorXd offsets(pieces.size());
    for (size_t i = 0; i < pieces.size(); ++i) {
      slopes.row(static_cast<int>(i)) =
          vec_from_json(pieces[i].at("slope")).transpose();
      offsets[static_cast<int>(i)] = pieces[i].at("offset").get<double>();
    }
    return max_affine(std::move(slopes), std::move(offsets));
  }
  if (kind == "quadratic") {
    return quadratic(mat_from_json(j.at("Q")), vec_from_json(j.at("q")),
                     j.at("r").get<double>());
  }
  if (kind == "indicator_polyhedron") {
    const auto& rows = j.at("inequalities");
    detail::require(!rows.empty(), "indicator json: empty rows");
    poly::LinearSystem sys =
        poly::LinearSystem::Empty(static_cast<int>(rows[0].at("normal").size()));
    for (const auto& r : rows) {
      const bool eq = r.contains("equality") && r.at("equality").get<bool>();
      sys.append(vec_from_json(r.at("normal")), r.at("bound").get<double>(),
                 eq);
    }
    return indicator(std::move(sys));
  }
  if (kind == "add") {
    std::vector<ConvexFn> terms;
    for (const auto& t : j.at("terms")) terms.push_back(from_json(t));
    return add(std::move(terms));
  }
  if (kind == "shifted") {
    return from_json(j.at("inner"))
        .shift(PairedPoint::FromFlat(vec_from_json(j.at("z0"))));
  }
  if (kind == "scaled") {
    return from_json(j.at("inner")).scale(j.at("alpha").get<double>());
  }
  if (kind == "composed") {
    return composed(from_json(j.at("inner")), mat_from_json(j.at("B")),
                    vec_from_json(j.at("d")));
  }
  if (kind == "inf_composed") {
    return inf_composed(from_json(j.at("inner")),
                        mat_from_json(j.at("outer_map")),
                        mat_from_json(j.at("aux_map")),
                        vec_from_json(j.at("d")));
  }
  if (kind == "h") {
    return h(j.at("n").get<int>());
  }
  throw std::invalid_argument("ConvexFn::from_json: unknown kind " + kind);
}

// ---------------------------------------------------------------------------

DomProjections dom_projections(const ConvexFn& f, bool use_projection) {
  const int n = f.pair_dim();
  const prog::DomRows dom = prog::dom_rows(f);
  DomProjections out;

  std::vector<int> x_coords(n), xs_coords(n);
  for (int i = 0; i < n; ++i) {
    x_coords[i] = i;
    xs_coords[i] = n + i;
  }

  if (dom.sys.rows() == 0) {
    out.x_rows = poly::LinearSystem::Empty(n);
    out.xs_rows = poly::LinearSystem::Empty(n);
    out.x_whole_space = true;
    out.xs_whole_space = true;
    return out;
  }

  if (use_projection) {
    out.x_rows = poly::project(dom.sys, x_coords);
    out.xs_rows = poly::project(dom.sys, xs_coords);
  } else {
    // Coordinate bounding boxes from LP extremes; looser but projection-free.
    auto box_of = [&](const std::vector<int>& coords) {
      poly::LinearSystem box = poly::LinearSystem::Empty(n);
      qp::Problem p;
      p.G = dom.sys.A;
      p.g = dom.sys.b;
      p.equality = dom.sys.equality;
      for (int k = 0; k < n; ++k) {
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(dom.sys.dim());
        unit[coords[k]] = 1.0;
        p.c = unit;
        qp::Result lo = qp::solve(p);
        p.c = -unit;
        qp::Result hi = qp::solve(p);
        Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
        row[k] = -1.0;
        if (lo.status == qp::Status::kOptimal) box.append(row, -lo.value);
        row[k] = 1.0;
        if (hi.status == qp::Status::kOptimal) box.append(row, -hi.value);
      }
      return box;
    };
    out.x_rows = box_of(x_coords);
    out.xs_rows = box_of(xs_coords);
  }
  out.x_whole_space = out.x_rows.rows() == 0;
  out.xs_whole_space = out.xs_rows.rows() == 0;
  return out;
}

}  // namespace repkit
