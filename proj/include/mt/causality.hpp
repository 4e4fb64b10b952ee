// Copyright 2026 The mt Authors
//
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

/**
 * @file
 * Markov operators in the Heisenberg picture and sequential causal
 * observables over finite trees.
 *
 * A channel from time t1 to a later time t2 maps effects at t2 to operators at
 * t1. `dim_in` is the t1 side and `dim_out` the t2 side. Quantum channels are
 * stored as Kraus operators K_j : H_t1 -> H_t2 in state-propagation form, so
 *
 *     Phi(F)    = sum_j K_j^dag F K_j       (Heisenberg, unital: Phi(I) = I)
 *     Phi_*(rho) = sum_j K_j rho K_j^dag    (Schrodinger, trace preserving)
 *
 * Classical channels are row-stochastic matrices with dim_in rows and
 * dim_out columns acting on functions f over Omega_t2 by (M f)(w1).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mt/errors.hpp"
#include "mt/measurement.hpp"
#include "mt/operator_core.hpp"

namespace mt {

enum class ChannelKind { quantum, classical };

inline const char *to_string(ChannelKind k) {
  return k == ChannelKind::quantum ? "quantum" : "classical";
}

struct ComposeOptions {
  /// Kraus operators with Frobenius norm below this are dropped.
  double prune_norm = 1e-14;
  /// Above this many Kraus operators the product is formed on the
  /// superoperator instead.
  std::size_t kraus_cap = 4096;
};

class MarkovChannel {
public:
  enum class Form { kraus, superoperator, stochastic };

  /// Quantum channel from Kraus operators (each dim_out x dim_in). Checks
  /// sum_j K_j^dag K_j = I within `tolerance`.
  static MarkovChannel kraus(std::vector<ComplexMatrix> ops, double tolerance = 1e-10) {
    detail::require(!ops.empty(), ErrorKind::InvalidArgument, "empty Kraus family");
    const auto rows = ops.front().rows();
    const auto cols = ops.front().cols();
    detail::require(rows > 0 && cols > 0, ErrorKind::InvalidArgument, "empty Kraus operator");
    ComplexMatrix gram = ComplexMatrix::Zero(cols, cols);
    for (const auto &k : ops) {
      detail::require(k.rows() == rows && k.cols() == cols, ErrorKind::DimensionMismatch,
                      "Kraus operators must share one shape");
      detail::require(all_finite(k), ErrorKind::InvalidArgument, "non-finite Kraus entry");
      gram += k.adjoint() * k;
    }
    const double residual = op_norm(gram - ComplexMatrix::Identity(cols, cols));
    detail::require(residual <= tolerance, ErrorKind::InvalidArgument,
                    "Kraus family is not unital in the Heisenberg picture", residual);
    MarkovChannel ch(ChannelKind::quantum, Form::kraus, static_cast<std::size_t>(cols),
                     static_cast<std::size_t>(rows));
    ch.kraus_ = std::move(ops);
    return ch;
  }

  static MarkovChannel unitary(const ComplexMatrix &u) {
    detail::require(is_unitary(u), ErrorKind::InvalidArgument, "matrix is not unitary");
    return kraus({u});
  }

  /// Row-stochastic matrix, rows indexed by Omega_t1 and columns by Omega_t2.
  static MarkovChannel stochastic(const RealMatrix &m) {
    detail::require(m.rows() > 0 && m.cols() > 0, ErrorKind::InvalidArgument,
                    "empty stochastic matrix");
    detail::require(m.allFinite() && m.minCoeff() >= -1e-12 && m.maxCoeff() <= 1.0 + 1e-12,
                    ErrorKind::InvalidArgument, "stochastic entries must lie in [0, 1]");
    const double err = (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
    detail::require(err <= 1e-12, ErrorKind::InvalidArgument,
                    "stochastic rows must sum to 1", err);
    MarkovChannel ch(ChannelKind::classical, Form::stochastic,
                     static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    ch.stochastic_ = m;
    return ch;
  }

  /// Quantum channel from its Heisenberg transfer matrix S, with
  /// vec(Phi(F)) = S vec(F) under column-stacking vec. S has dim_in^2 rows
  /// and dim_out^2 columns. Complete positivity is checked on the Choi matrix.
  static MarkovChannel superoperator(ComplexMatrix s, std::size_t dim_in, std::size_t dim_out,
                                     double tolerance = 1e-10) {
    detail::require(static_cast<std::size_t>(s.rows()) == dim_in * dim_in &&
                        static_cast<std::size_t>(s.cols()) == dim_out * dim_out,
                    ErrorKind::DimensionMismatch, "superoperator shape mismatch");
    MarkovChannel ch(ChannelKind::quantum, Form::superoperator, dim_in, dim_out);
    ch.superop_ = std::move(s);
    const double unital = ch.unitality_residual();
    detail::require(unital <= tolerance, ErrorKind::InvalidArgument,
                    "superoperator is not unital", unital);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(HermitianOperator(ch.choi()).matrix(),
                                                    Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    detail::require(min_eig >= -tolerance, ErrorKind::InvalidArgument,
                    "superoperator is not completely positive", min_eig);
    return ch;
  }

  static MarkovChannel identity(ChannelKind kind, std::size_t dim) {
    if (kind == ChannelKind::quantum) {
      return kraus({mt::identity(dim)});
    }
    return stochastic(RealMatrix::Identity(static_cast<Eigen::Index>(dim),
                                           static_cast<Eigen::Index>(dim)));
  }

  ChannelKind kind() const { return kind_; }
  Form form() const { return form_; }
  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return dim_out_; }

  const RealMatrix &stochastic_matrix() const {
    require_kind(ChannelKind::classical);
    return stochastic_;
  }

  /// Kraus operators: the stored family, or one derived from the Choi matrix
  /// when the channel is held as a superoperator.
  std::vector<ComplexMatrix> kraus_family() const {
    require_kind(ChannelKind::quantum);
    if (form_ == Form::kraus) {
      return kraus_;
    }
    const auto din = static_cast<Eigen::Index>(dim_in_);
    const auto dout = static_cast<Eigen::Index>(dim_out_);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(HermitianOperator(choi()).matrix());
    const RealVector &vals = es.eigenvalues();
    const double cutoff = 1e-14 * std::max(1.0, vals.cwiseAbs().maxCoeff());
    std::vector<ComplexMatrix> out;
    for (Eigen::Index j = vals.size() - 1; j >= 0; --j) {
      if (vals(j) <= cutoff) {
        continue;
      }
      ComplexMatrix k(dout, din);
      for (Eigen::Index a = 0; a < din; ++a) {
        for (Eigen::Index o = 0; o < dout; ++o) {
          k(o, a) = std::sqrt(vals(j)) * es.eigenvectors()(a * dout + o, j);
        }
      }
      out.push_back(std::move(k));
    }
    return out;
  }

  std::size_t kraus_count() const {
    return form_ == Form::kraus ? kraus_.size() : 0;
  }

  /// Heisenberg transfer matrix (column-stacking vec).
  ComplexMatrix superoperator_matrix() const {
    require_kind(ChannelKind::quantum);
    if (form_ == Form::superoperator) {
      return superop_;
    }
    const auto din = static_cast<Eigen::Index>(dim_in_);
    const auto dout = static_cast<Eigen::Index>(dim_out_);
    ComplexMatrix s = ComplexMatrix::Zero(din * din, dout * dout);
    for (const auto &k : kraus_) {
      s += tensor(ComplexMatrix(k.transpose()), ComplexMatrix(k.adjoint()));
    }
    return s;
  }

  /// Choi matrix of the Schrodinger map, sum_ab |a><b| (x) Phi_*(|a><b|).
  ComplexMatrix choi() const {
    require_kind(ChannelKind::quantum);
    const auto din = static_cast<Eigen::Index>(dim_in_);
    const auto dout = static_cast<Eigen::Index>(dim_out_);
    ComplexMatrix j = ComplexMatrix::Zero(din * dout, din * dout);
    for (Eigen::Index a = 0; a < din; ++a) {
      for (Eigen::Index b = 0; b < din; ++b) {
        ComplexMatrix eab = ComplexMatrix::Zero(din, din);
        eab(a, b) = 1.0;
        j.block(a * dout, b * dout, dout, dout) = apply_predual(eab);
      }
    }
    return j;
  }

  /// Heisenberg action on an operator at the later time.
  ComplexMatrix apply(const ComplexMatrix &f) const {
    require_kind(ChannelKind::quantum);
    detail::require(static_cast<std::size_t>(f.rows()) == dim_out_ &&
                        static_cast<std::size_t>(f.cols()) == dim_out_,
                    ErrorKind::DimensionMismatch, "operator does not match channel output");
    const auto din = static_cast<Eigen::Index>(dim_in_);
    if (form_ == Form::kraus) {
      ComplexMatrix out = ComplexMatrix::Zero(din, din);
      for (const auto &k : kraus_) {
        out.noalias() += k.adjoint() * f * k;
      }
      return out;
    }
    const Eigen::Map<const ComplexVector> vf(f.data(), f.size());
    ComplexVector r = superop_ * vf;
    return Eigen::Map<ComplexMatrix>(r.data(), din, din);
  }

  /// Heisenberg action on a function over Omega_t2.
  RealVector apply(const RealVector &f) const {
    require_kind(ChannelKind::classical);
    detail::require(static_cast<std::size_t>(f.size()) == dim_out_,
                    ErrorKind::DimensionMismatch, "function does not match channel output");
    return stochastic_ * f;
  }

  /// Schrodinger (predual) action on a state at the earlier time.
  ComplexMatrix apply_predual(const ComplexMatrix &rho) const {
    require_kind(ChannelKind::quantum);
    detail::require(static_cast<std::size_t>(rho.rows()) == dim_in_ &&
                        static_cast<std::size_t>(rho.cols()) == dim_in_,
                    ErrorKind::DimensionMismatch, "state does not match channel input");
    const auto dout = static_cast<Eigen::Index>(dim_out_);
    if (form_ == Form::kraus) {
      ComplexMatrix out = ComplexMatrix::Zero(dout, dout);
      for (const auto &k : kraus_) {
        out.noalias() += k * rho * k.adjoint();
      }
      return out;
    }
    // tr(rho Phi(F)) = tr(Phi_*(rho) F) gives vec(Phi_*(rho)^T) = S^T vec(rho^T).
    const ComplexMatrix rho_t = rho.transpose();
    const Eigen::Map<const ComplexVector> v(rho_t.data(), rho_t.size());
    ComplexVector r = superop_.transpose() * v;
    return Eigen::Map<ComplexMatrix>(r.data(), dout, dout).transpose();
  }

  /// Predual action on a classical distribution over Omega_t1 (row vector).
  RealVector apply_predual(const RealVector &p) const {
    require_kind(ChannelKind::classical);
    return stochastic_.transpose() * p;
  }

  /// ||Phi(I_out) - I_in||: zero for a Markov operator.
  double unitality_residual() const {
    if (kind_ == ChannelKind::classical) {
      return (stochastic_.rowwise().sum().array() - 1.0).abs().maxCoeff();
    }
    return op_norm(apply(mt::identity(dim_out_)) - mt::identity(dim_in_));
  }

  /// ||Phi_*(I_in) - I_out||: zero when the Schrodinger map is also unital.
  double predual_unitality_residual() const {
    require_kind(ChannelKind::quantum);
    return op_norm(apply_predual(mt::identity(dim_in_)) - mt::identity(dim_out_));
  }

private:
  MarkovChannel(ChannelKind kind, Form form, std::size_t dim_in, std::size_t dim_out)
      : kind_(kind), form_(form), dim_in_(dim_in), dim_out_(dim_out) {}

  void require_kind(ChannelKind k) const {
    detail::require(kind_ == k, ErrorKind::KindMismatch,
                    std::string("operation needs a ") + to_string(k) + " channel");
  }

  friend MarkovChannel compose(const MarkovChannel &, const MarkovChannel &,
                               const ComposeOptions &);

  ChannelKind kind_;
  Form form_;
  std::size_t dim_in_;
  std::size_t dim_out_;
  std::vector<ComplexMatrix> kraus_;
  ComplexMatrix superop_;
  RealMatrix stochastic_;
};

/// Phi_{t1,t3} = Phi_{t1,t2} Phi_{t2,t3}.
///
/// Quantum channels compose on Kraus families while the product family stays
/// within `opts.kraus_cap`; beyond that the transfer matrices are multiplied.
inline MarkovChannel compose(const MarkovChannel &first, const MarkovChannel &second,
                             const ComposeOptions &opts = {}) {
  detail::require(first.kind() == second.kind(), ErrorKind::KindMismatch,
                  "cannot compose quantum and classical channels");
  detail::require(first.dim_out() == second.dim_in(), ErrorKind::DimensionMismatch,
                  "inner channel dimensions differ");
  if (first.kind() == ChannelKind::classical) {
    MarkovChannel ch(ChannelKind::classical, MarkovChannel::Form::stochastic, first.dim_in(),
                     second.dim_out());
    ch.stochastic_ = first.stochastic_ * second.stochastic_;
    return ch;
  }
  const bool both_kraus = first.form() == MarkovChannel::Form::kraus &&
                          second.form() == MarkovChannel::Form::kraus;
  if (both_kraus && first.kraus_.size() * second.kraus_.size() <= opts.kraus_cap) {
    MarkovChannel ch(ChannelKind::quantum, MarkovChannel::Form::kraus, first.dim_in(),
                     second.dim_out());
    ch.kraus_.reserve(first.kraus_.size() * second.kraus_.size());
    for (const auto &k : first.kraus_) {
      for (const auto &l : second.kraus_) {
        ComplexMatrix lk = l * k;
        if (lk.norm() >= opts.prune_norm) {
          ch.kraus_.push_back(std::move(lk));
        }
      }
    }
    if (ch.kraus_.empty()) {
      detail::fail(ErrorKind::NumericalFailure, "every composed Kraus operator was pruned");
    }
    return ch;
  }
  MarkovChannel ch(ChannelKind::quantum, MarkovChannel::Form::superoperator, first.dim_in(),
                   second.dim_out());
  ch.superop_ = first.superoperator_matrix() * second.superoperator_matrix();
  return ch;
}

/// Observable (X, Phi F) at the earlier time.
inline Observable pullback(const MarkovChannel &phi, const Observable &o) {
  detail::require(phi.dim_out() == o.dim(), ErrorKind::DimensionMismatch,
                  "channel output and observable dimensions differ");
  std::vector<ComplexMatrix> effects;
  effects.reserve(o.size());
  for (const auto &e : o.effects()) {
    effects.push_back(phi.apply(e));
  }
  return {o.outcomes(), std::move(effects)};
}

inline ClassicalObservable pullback(const MarkovChannel &phi, const ClassicalObservable &o) {
  detail::require(phi.dim_out() == o.omega_size(), ErrorKind::DimensionMismatch,
                  "channel output and observable sizes differ");
  std::vector<RealVector> effects;
  effects.reserve(o.size());
  for (const auto &f : o.effects()) {
    effects.push_back(phi.apply(f));
  }
  return {phi.dim_in(), o.outcomes(), std::move(effects)};
}

/// For a classical channel whose every row is a 0/1 indicator within `tolerance`,
/// returns the point map row -> column of the 1. Otherwise std::nullopt.
inline std::optional<std::vector<std::size_t>> is_deterministic(const MarkovChannel &phi,
                                                                double tolerance = 1e-12) {
  const RealMatrix &m = phi.stochastic_matrix();
  std::vector<std::size_t> point_map;
  point_map.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Eigen::Index col = 0;
    m.row(r).maxCoeff(&col);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double target = c == col ? 1.0 : 0.0;
      if (std::abs(m(r, c) - target) > tolerance) {
        return std::nullopt;
      }
    }
    point_map.push_back(static_cast<std::size_t>(col));
  }
  return point_map;
}

// ---------------------------------------------------------------------------
// Causal trees

using AnyObservable = std::variant<Observable, ClassicalObservable>;

struct QuantumSpace {
  std::size_t dim;
};
struct ClassicalSpace {
  std::size_t size;
};
using NodeSpace = std::variant<QuantumSpace, ClassicalSpace>;

inline ChannelKind kind_of(const NodeSpace &s) {
  return std::holds_alternative<QuantumSpace>(s) ? ChannelKind::quantum
                                                 : ChannelKind::classical;
}
inline std::size_t size_of(const NodeSpace &s) {
  return std::visit([](const auto &v) -> std::size_t {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, QuantumSpace>) {
      return v.dim;
    } else {
      return v.size;
    }
  }, s);
}

struct TreeNode {
  std::string id;
  NodeSpace space;
  AnyObservable observable;
};

struct TreeEdge {
  std::string parent;
  std::string child;
  MarkovChannel channel;
};

/// Finite rooted tree of observables linked by Markov operators
/// Phi_{parent, child}.
class CausalTree {
public:
  CausalTree(std::vector<TreeNode> nodes, std::vector<TreeEdge> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    detail::require(!nodes_.empty(), ErrorKind::InvalidArgument, "tree has no nodes");
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      detail::require(index.emplace(nodes_[k].id, k).second, ErrorKind::InvalidArgument,
                      "duplicate node id '" + nodes_[k].id + "'");
      check_observable(nodes_[k]);
    }
    parent_.assign(nodes_.size(), kNone);
    in_edge_.assign(nodes_.size(), kNone);
    children_.assign(nodes_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto &edge = edges_[e];
      const auto p = lookup(index, edge.parent);
      const auto c = lookup(index, edge.child);
      detail::require(parent_[c] == kNone, ErrorKind::InvalidArgument,
                      "node '" + edge.child + "' has more than one parent");
      detail::require(edge.channel.kind() == kind_of(nodes_[p].space) &&
                          edge.channel.kind() == kind_of(nodes_[c].space),
                      ErrorKind::KindMismatch,
                      "edge " + edge.parent + "->" + edge.child + " mixes space kinds");
      detail::require(edge.channel.dim_in() == size_of(nodes_[p].space) &&
                          edge.channel.dim_out() == size_of(nodes_[c].space),
                      ErrorKind::DimensionMismatch,
                      "edge " + edge.parent + "->" + edge.child +
                          " channel does not match node spaces");
      parent_[c] = p;
      in_edge_[c] = e;
      children_[p].push_back(c);
    }
    std::size_t roots = 0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      if (parent_[k] == kNone) {
        root_ = k;
        ++roots;
      }
    }
    detail::require(roots == 1, ErrorKind::InvalidArgument, "tree must have exactly one root");
    order_.clear();
    std::vector<std::size_t> stack{root_};
    while (!stack.empty()) {
      const auto n = stack.back();
      stack.pop_back();
      order_.push_back(n);
      for (auto it = children_[n].rbegin(); it != children_[n].rend(); ++it) {
        stack.push_back(*it);
      }
    }
    detail::require(order_.size() == nodes_.size(), ErrorKind::InvalidArgument,
                    "some nodes are not reachable from the root (cycle or forest)");
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::size_t size() const { return nodes_.size(); }
  std::size_t root() const { return root_; }
  const TreeNode &node(std::size_t k) const { return nodes_.at(k); }
  const std::vector<TreeNode> &nodes() const { return nodes_; }
  const std::vector<TreeEdge> &edges() const { return edges_; }
  std::size_t parent(std::size_t k) const { return parent_.at(k); }
  const std::vector<std::size_t> &children(std::size_t k) const { return children_.at(k); }
  /// Channel Phi_{parent(k), k}; k must not be the root.
  const MarkovChannel &channel_into(std::size_t k) const { return edges_.at(in_edge_.at(k)).channel; }
  /// Depth-first preorder from the root, children in edge order. This is
  /// the coordinate order of realized outcome tuples.
  const std::vector<std::size_t> &preorder() const { return order_; }

  std::vector<std::string> node_order() const {
    std::vector<std::string> ids;
    for (auto k : order_) {
      ids.push_back(nodes_[k].id);
    }
    return ids;
  }

  bool is_classical() const {
    return std::all_of(nodes_.begin(), nodes_.end(), [](const TreeNode &n) {
      return kind_of(n.space) == ChannelKind::classical;
    });
  }

private:
  static std::size_t lookup(const std::map<std::string, std::size_t> &index,
                            const std::string &id) {
    auto it = index.find(id);
    detail::require(it != index.end(), ErrorKind::InvalidArgument,
                    "edge references unknown node '" + id + "'");
    return it->second;
  }

  static void check_observable(const TreeNode &n) {
    const bool quantum = kind_of(n.space) == ChannelKind::quantum;
    if (const auto *q = std::get_if<Observable>(&n.observable)) {
      detail::require(quantum, ErrorKind::KindMismatch,
                      "node '" + n.id + "' has a quantum observable on a classical space");
      detail::require(q->dim() == size_of(n.space), ErrorKind::DimensionMismatch,
                      "node '" + n.id + "' observable dimension mismatch");
    } else {
      const auto &c = std::get<ClassicalObservable>(n.observable);
      detail::require(!quantum, ErrorKind::KindMismatch,
                      "node '" + n.id + "' has a classical observable on a quantum space");
      detail::require(c.omega_size() == size_of(n.space), ErrorKind::DimensionMismatch,
                      "node '" + n.id + "' observable size mismatch");
    }
  }

  std::vector<TreeNode> nodes_;
  std::vector<TreeEdge> edges_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> in_edge_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> order_;
  std::size_t root_ = 0;
};

namespace detail {

struct QuantumAlgebra {
  using Obs = Observable;
  using Effect = ComplexMatrix;

  static Effect product(const Effect &a, const Effect &b) {
    const ComplexMatrix ab = a * b;
    return (ab + ab.adjoint()) / 2.0;
  }
  static double commutation_excess(const Effect &a, const Effect &b, double tolerance,
                                   double &residual) {
    residual = op_norm(commutator(a, b));
    return residual - tolerance * std::max(1.0, op_norm(a) * op_norm(b));
  }
  static Obs build(std::size_t, std::vector<Label> labels, std::vector<Effect> effects) {
    return {std::move(labels), std::move(effects)};
  }
};

struct ClassicalAlgebra {
  using Obs = ClassicalObservable;
  using Effect = RealVector;

  static Effect product(const Effect &a, const Effect &b) { return a.cwiseProduct(b); }
  static double commutation_excess(const Effect &, const Effect &, double, double &residual) {
    residual = 0.0;
    return -1.0;
  }
  static Obs build(std::size_t omega, std::vector<Label> labels, std::vector<Effect> effects) {
    return {omega, std::move(labels), std::move(effects)};
  }
};

/// Joint outcomes as flat tuples, one coordinate per node in preorder.
template <class Algebra> struct PartialRealization {
  std::vector<Label::Tuple> outcomes;
  std::vector<typename Algebra::Effect> effects;
};

template <class Algebra>
PartialRealization<Algebra> realize_node(const CausalTree &tree, std::size_t s,
                                         double tolerance) {
  using Part = PartialRealization<Algebra>;
  const auto &own = std::get<typename Algebra::Obs>(tree.node(s).observable);

  std::vector<Part> factors;
  Part own_part;
  for (std::size_t k = 0; k < own.size(); ++k) {
    own_part.outcomes.push_back({own.outcomes()[k]});
    own_part.effects.push_back(own.effects()[k]);
  }
  factors.push_back(std::move(own_part));
  for (auto t : tree.children(s)) {
    Part child = realize_node<Algebra>(tree, t, tolerance);
    const auto &phi = tree.channel_into(t);
    for (auto &e : child.effects) {
      e = phi.apply(e);
    }
    factors.push_back(std::move(child));
  }

  // Product observable exists only if every pair of factors commutes.
  double worst = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    for (std::size_t j = i + 1; j < factors.size(); ++j) {
      for (const auto &a : factors[i].effects) {
        for (const auto &b : factors[j].effects) {
          double residual = 0.0;
          if (Algebra::commutation_excess(a, b, tolerance, residual) > 0.0) {
            ok = false;
          }
          worst = std::max(worst, residual);
        }
      }
    }
  }
  if (!ok) {
    throw NonCommutingError(worst, tree.node(s).id);
  }

  Part joint = std::move(factors.front());
  for (std::size_t f = 1; f < factors.size(); ++f) {
    Part next;
    for (std::size_t a = 0; a < joint.effects.size(); ++a) {
      for (std::size_t b = 0; b < factors[f].effects.size(); ++b) {
        Label::Tuple label = joint.outcomes[a];
        label.insert(label.end(), factors[f].outcomes[b].begin(), factors[f].outcomes[b].end());
        next.outcomes.push_back(std::move(label));
        next.effects.push_back(Algebra::product(joint.effects[a], factors[f].effects[b]));
      }
    }
    joint = std::move(next);
  }
  return joint;
}

template <class Algebra>
typename Algebra::Obs realize_as(const CausalTree &tree, double tolerance) {
  auto part = realize_node<Algebra>(tree, tree.root(), tolerance);
  std::vector<Label> labels;
  labels.reserve(part.outcomes.size());
  for (auto &t : part.outcomes) {
    labels.push_back(Label::tuple(std::move(t)));
  }
  return Algebra::build(size_of(tree.node(tree.root()).space), std::move(labels),
                        std::move(part.effects));
}

} // namespace detail

/// Realized causal observable at the root. Each internal node s contributes
/// O_s x (x_t Phi_{s,t} realized_t) over its children; leaves contribute O_s.
/// Outcomes are tuples with one coordinate per node in `tree.preorder()`.
///
/// Throws NonCommutingError naming the node where the product fails to exist.
inline AnyObservable realize(const CausalTree &tree, double tolerance = tol::commute) {
  if (kind_of(tree.node(tree.root()).space) == ChannelKind::classical) {
    return detail::realize_as<detail::ClassicalAlgebra>(tree, tolerance);
  }
  return detail::realize_as<detail::QuantumAlgebra>(tree, tolerance);
}

/// Joint outcome distribution of a classical tree measured at the root point
/// `root_point`, by enumerating every assignment of points to nodes and
/// multiplying transition weights with effect values. Independent of
/// `realize`.
inline OutcomeDistribution brute_force_tree_distribution(const CausalTree &tree,
                                                         std::size_t root_point) {
  detail::require(tree.is_classical(), ErrorKind::NotClassical,
                  "brute-force enumeration needs an all-classical tree");
  const auto &order = tree.preorder();
  const std::size_t n = order.size();
  std::vector<std::size_t> position(tree.size());
  for (std::size_t i = 0; i < n; ++i) {
    position[order[i]] = i;
  }
  std::vector<const ClassicalObservable *> obs(n);
  std::vector<std::size_t> points(n), outcomes(n);
  for (std::size_t i = 0; i < n; ++i) {
    obs[i] = &std::get<ClassicalObservable>(tree.node(order[i]).observable);
    points[i] = obs[i]->omega_size();
    outcomes[i] = obs[i]->size();
  }
  detail::require(root_point < points[0], ErrorKind::IndexOutOfRange,
                  "root point out of range");

  std::size_t n_outcomes = 1;
  for (auto k : outcomes) {
    n_outcomes *= k;
  }
  std::vector<double> probs(n_outcomes, 0.0);

  // Odometer over point assignments; the root stays at root_point.
  std::vector<std::size_t> w(n, 0);
  w[0] = root_point;
  for (;;) {
    double path = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
      const auto node = order[i];
      const auto p = position[tree.parent(node)];
      path *= tree.channel_into(node).stochastic_matrix()(
          static_cast<Eigen::Index>(w[p]), static_cast<Eigen::Index>(w[i]));
    }
    if (path != 0.0) {
      std::vector<std::size_t> x(n, 0);
      for (std::size_t flat = 0; flat < n_outcomes; ++flat) {
        double weight = path;
        for (std::size_t i = 0; i < n; ++i) {
          weight *= obs[i]->effects()[x[i]](static_cast<Eigen::Index>(w[i]));
        }
        probs[flat] += weight;
        for (std::size_t i = n; i-- > 0;) {
          if (++x[i] < outcomes[i]) {
            break;
          }
          x[i] = 0;
        }
      }
    }
    std::size_t i = n;
    while (i-- > 1) {
      if (++w[i] < points[i]) {
        break;
      }
      w[i] = 0;
    }
    if (i == 0) {
      break;
    }
  }

  std::vector<Label> labels;
  labels.reserve(n_outcomes);
  std::vector<std::size_t> x(n, 0);
  for (std::size_t flat = 0; flat < n_outcomes; ++flat) {
    Label::Tuple t;
    for (std::size_t i = 0; i < n; ++i) {
      t.push_back(obs[i]->outcomes()[x[i]]);
    }
    labels.push_back(Label::tuple(std::move(t)));
    for (std::size_t k = n; k-- > 0;) {
      if (++x[k] < outcomes[k]) {
        break;
      }
      x[k] = 0;
    }
  }
  return {std::move(labels), std::move(probs)};
}

} // namespace mt
