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
 * States, finite observables (quantum effects and classical fuzzy sets), the
 * Born rule, product observables of commuting pairs, and seeded sampling.
 *
 * Outcome sets are finite and every subset is measurable; an observable
 * stores one effect per outcome and the effect of a subset is the sum over
 * its members. Every effect of a finite-dimensional observable is continuous
 * at every state, so no continuity guard is needed before applying the Born
 * rule.
 */

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mt/errors.hpp"
#include "mt/operator_core.hpp"
#include "mt/random.hpp"

namespace mt {

/// Outcome label: a real, a string, or a tuple of labels (joint outcomes).
struct Label {
  using Tuple = std::vector<Label>;
  std::variant<double, std::string, Tuple> value;

  Label() : value(0.0) {}
  Label(double v) : value(v) {}
  Label(int v) : value(static_cast<double>(v)) {}
  Label(std::string v) : value(std::move(v)) {}
  Label(const char *v) : value(std::string(v)) {}
  Label(Tuple v) : value(std::move(v)) {}

  static Label tuple(Tuple parts) { return Label(std::move(parts)); }

  bool is_tuple() const { return std::holds_alternative<Tuple>(value); }
  bool is_number() const { return std::holds_alternative<double>(value); }
  const Tuple &parts() const { return std::get<Tuple>(value); }
  double number() const { return std::get<double>(value); }

  /// Tuple labels flattened one level; atoms become a 1-tuple.
  Tuple flattened() const { return is_tuple() ? parts() : Tuple{*this}; }

  std::string str() const {
    if (const auto *d = std::get_if<double>(&value)) {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, *d);
      return std::string(buf, res.ptr);
    }
    if (const auto *s = std::get_if<std::string>(&value)) {
      return *s;
    }
    std::string out = "(";
    const auto &items = parts();
    for (std::size_t k = 0; k < items.size(); ++k) {
      out += (k ? "," : "") + items[k].str();
    }
    return out + ")";
  }

  friend bool operator==(const Label &a, const Label &b) { return a.value == b.value; }
};

/// Pure (unit vector) or mixed (unit-trace PSD density) state.
class State {
public:
  enum class Kind { pure, mixed };

  static State pure(const ComplexVector &u) {
    detail::require(u.size() > 0, ErrorKind::InvalidArgument, "empty state vector");
    const double err = std::abs(u.norm() - 1.0);
    detail::require(err <= 1e-12, ErrorKind::InvalidArgument,
                    "pure state must have unit norm", err);
    State s;
    s.kind_ = Kind::pure;
    s.vector_ = u;
    return s;
  }

  static State mixed(const ComplexMatrix &rho) {
    const HermitianOperator h(rho);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    detail::require(min_eig >= -1e-10, ErrorKind::InvalidArgument,
                    "density operator is not positive semidefinite", min_eig);
    const double trace_err = std::abs(h.matrix().trace() - Complex(1.0));
    detail::require(trace_err <= 1e-10, ErrorKind::InvalidArgument,
                    "density operator must have unit trace", trace_err);
    State s;
    s.kind_ = Kind::mixed;
    s.density_ = h.matrix();
    return s;
  }

  /// Computational basis state |index>.
  static State basis(std::size_t dim, std::size_t index) {
    detail::require(index < dim, ErrorKind::IndexOutOfRange, "basis index out of range");
    return pure(basis_vector(dim, index));
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const {
    return static_cast<std::size_t>(kind_ == Kind::pure ? vector_.size() : density_.rows());
  }
  const ComplexVector &vector() const { return vector_; }
  ComplexMatrix density() const {
    return kind_ == Kind::pure ? projector_onto(vector_) : density_;
  }

  /// <u, E u> for pure states, tr(rho E) for mixed ones.
  Complex expectation(const ComplexMatrix &e) const {
    detail::require(static_cast<std::size_t>(e.rows()) == dim() && e.rows() == e.cols(),
                    ErrorKind::DimensionMismatch, "operator and state dimensions differ");
    if (kind_ == Kind::pure) {
      return vector_.dot(e * vector_);
    }
    return (density_ * e).trace();
  }

private:
  State() = default;
  Kind kind_ = Kind::pure;
  ComplexVector vector_;
  ComplexMatrix density_;
};

namespace detail {
inline void require_labels(std::size_t n_outcomes, std::size_t n_effects) {
  require(n_outcomes == n_effects && n_outcomes > 0, ErrorKind::InvalidArgument,
          "observable needs one effect per outcome and at least one outcome");
}
} // namespace detail

/// Quantum observable (POVM): one effect 0 <= E <= I per outcome, summing to I.
class Observable {
public:
  Observable(std::vector<Label> outcomes, std::vector<ComplexMatrix> effects)
      : outcomes_(std::move(outcomes)) {
    detail::require_labels(outcomes_.size(), effects.size());
    const auto dim = effects.front().rows();
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    effects_.reserve(effects.size());
    for (const auto &e : effects) {
      detail::require(e.rows() == dim && e.cols() == dim, ErrorKind::DimensionMismatch,
                      "all effects must share one square dimension");
      HermitianOperator h(e);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues().minCoeff();
      const double hi = es.eigenvalues().maxCoeff();
      detail::require(lo >= -1e-10 && hi <= 1.0 + 1e-10, ErrorKind::InvalidArgument,
                      "effect spectrum leaves [0, 1]", std::max(-lo, hi - 1.0));
      total += h.matrix();
      effects_.push_back(h.matrix());
    }
    const double completeness = op_norm(total - ComplexMatrix::Identity(dim, dim));
    detail::require(completeness <= 1e-10, ErrorKind::InvalidArgument,
                    "effects do not sum to the identity", completeness);
  }

  /// The one-outcome observable {I}.
  static Observable trivial(std::size_t dim, Label label = Label("*")) {
    return Observable({std::move(label)}, {identity(dim)});
  }

  std::size_t dim() const { return static_cast<std::size_t>(effects_.front().rows()); }
  std::size_t size() const { return effects_.size(); }
  const std::vector<Label> &outcomes() const { return outcomes_; }
  const std::vector<ComplexMatrix> &effects() const { return effects_; }
  const ComplexMatrix &effect(std::size_t k) const { return effects_.at(k); }

  /// F(subset) = sum of the effects of the listed outcome indices.
  ComplexMatrix effect_of(std::span<const std::size_t> subset) const {
    ComplexMatrix out = ComplexMatrix::Zero(effects_.front().rows(), effects_.front().cols());
    for (auto k : subset) {
      detail::require(k < size(), ErrorKind::IndexOutOfRange, "outcome index out of range");
      out += effects_[k];
    }
    return out;
  }

private:
  std::vector<Label> outcomes_;
  std::vector<ComplexMatrix> effects_;
};

/// Observable on a finite point set Omega: one fuzzy indicator in [0,1]^Omega
/// per outcome, summing pointwise to 1.
class ClassicalObservable {
public:
  ClassicalObservable(std::size_t omega_size, std::vector<Label> outcomes,
                      std::vector<RealVector> effects)
      : omega_size_(omega_size), outcomes_(std::move(outcomes)), effects_(std::move(effects)) {
    detail::require(omega_size_ > 0, ErrorKind::InvalidArgument, "omega_size must be positive");
    detail::require_labels(outcomes_.size(), effects_.size());
    RealVector total = RealVector::Zero(static_cast<Eigen::Index>(omega_size_));
    for (const auto &f : effects_) {
      detail::require(static_cast<std::size_t>(f.size()) == omega_size_,
                      ErrorKind::DimensionMismatch, "effect length differs from omega_size");
      detail::require(f.allFinite() && f.minCoeff() >= -1e-12 && f.maxCoeff() <= 1.0 + 1e-12,
                      ErrorKind::InvalidArgument, "classical effect leaves [0, 1]");
      total += f;
    }
    const double err = (total.array() - 1.0).abs().maxCoeff();
    detail::require(err <= 1e-12, ErrorKind::InvalidArgument,
                    "classical effects do not sum to 1 pointwise", err);
  }

  /// Outcomes labelled 0, 1, ... in effect order.
  ClassicalObservable(std::size_t omega_size, const std::vector<RealVector> &effects)
      : ClassicalObservable(omega_size, index_labels(effects.size()), effects) {}

  /// Crisp observable from a point -> outcome-index assignment.
  static ClassicalObservable crisp(std::vector<Label> outcomes,
                                   std::span<const std::size_t> cell_of_point) {
    const auto n = static_cast<Eigen::Index>(cell_of_point.size());
    std::vector<RealVector> effects(outcomes.size(), RealVector::Zero(n));
    for (Eigen::Index w = 0; w < n; ++w) {
      const auto cell = cell_of_point[static_cast<std::size_t>(w)];
      detail::require(cell < outcomes.size(), ErrorKind::IndexOutOfRange,
                      "crisp cell index out of range");
      effects[cell](w) = 1.0;
    }
    return {cell_of_point.size(), std::move(outcomes), std::move(effects)};
  }

  std::size_t omega_size() const { return omega_size_; }
  std::size_t size() const { return effects_.size(); }
  const std::vector<Label> &outcomes() const { return outcomes_; }
  const std::vector<RealVector> &effects() const { return effects_; }

  /// Diagonal embedding into the |Omega|-dimensional matrix algebra.
  Observable to_quantum() const {
    std::vector<ComplexMatrix> mats;
    mats.reserve(effects_.size());
    for (const auto &f : effects_) {
      mats.emplace_back(f.cast<Complex>().asDiagonal());
    }
    return {outcomes_, std::move(mats)};
  }

private:
  static std::vector<Label> index_labels(std::size_t n) {
    std::vector<Label> labels;
    for (std::size_t k = 0; k < n; ++k) {
      labels.emplace_back(static_cast<double>(k));
    }
    return labels;
  }

  std::size_t omega_size_;
  std::vector<Label> outcomes_;
  std::vector<RealVector> effects_;
};

class OutcomeDistribution {
public:
  OutcomeDistribution(std::vector<Label> outcomes, std::vector<double> probabilities)
      : outcomes_(std::move(outcomes)), probabilities_(std::move(probabilities)) {
    detail::require(outcomes_.size() == probabilities_.size() && !outcomes_.empty(),
                    ErrorKind::InvalidArgument, "one probability per outcome required");
    double total = 0.0;
    for (double p : probabilities_) {
      detail::require(std::isfinite(p) && p >= -1e-12, ErrorKind::InvalidArgument,
                      "negative probability", p);
      total += p;
    }
    detail::require(std::abs(total - 1.0) <= 1e-10, ErrorKind::InvalidArgument,
                    "probabilities do not sum to 1", total - 1.0);
  }

  const std::vector<Label> &outcomes() const { return outcomes_; }
  const std::vector<double> &probabilities() const { return probabilities_; }
  std::size_t size() const { return outcomes_.size(); }

  double probability(const Label &outcome) const {
    for (std::size_t k = 0; k < outcomes_.size(); ++k) {
      if (outcomes_[k] == outcome) {
        return probabilities_[k];
      }
    }
    detail::fail(ErrorKind::IndexOutOfRange, "unknown outcome " + outcome.str());
  }

private:
  std::vector<Label> outcomes_;
  std::vector<double> probabilities_;
};

/// Observable whose outcomes are the distinct eigenvalues of `a` (ascending)
/// and whose effects are the matching spectral projectors.
inline Observable pvm_from_hermitian(const HermitianOperator &a,
                                     double group_tol = tol::group) {
  auto spec = spectral_decomposition(a, group_tol);
  std::vector<Label> outcomes(spec.eigenvalues.begin(), spec.eigenvalues.end());
  return {std::move(outcomes), std::move(spec.projectors)};
}

/// Born rule: P(x) = <u, E_x u> or tr(rho E_x).
inline OutcomeDistribution born_distribution(const Observable &o, const State &rho) {
  detail::require(o.dim() == rho.dim(), ErrorKind::DimensionMismatch,
                  "observable and state dimensions differ");
  std::vector<double> probs;
  probs.reserve(o.size());
  for (const auto &e : o.effects()) {
    probs.push_back(rho.expectation(e).real());
  }
  return {o.outcomes(), std::move(probs)};
}

struct CommuteReport {
  bool commute;
  double max_residual;
};

/// Checks ||[E, G]|| <= tol * max(1, ||E|| ||G||) over every effect pair.
inline CommuteReport commute_check(const Observable &a, const Observable &b,
                                   double tolerance = tol::commute) {
  detail::require(a.dim() == b.dim(), ErrorKind::DimensionMismatch,
                  "observables act on different dimensions");
  CommuteReport out{true, 0.0};
  for (const auto &e : a.effects()) {
    const double ne = op_norm(e);
    for (const auto &g : b.effects()) {
      const double residual = op_norm(commutator(e, g));
      out.max_residual = std::max(out.max_residual, residual);
      if (residual > tolerance * std::max(1.0, ne * op_norm(g))) {
        out.commute = false;
      }
    }
  }
  return out;
}

namespace detail {
inline std::vector<ComplexMatrix> pairwise_products(const Observable &a, const Observable &b) {
  std::vector<ComplexMatrix> effects;
  effects.reserve(a.size() * b.size());
  for (const auto &e : a.effects()) {
    for (const auto &g : b.effects()) {
      const ComplexMatrix eg = e * g;
      effects.emplace_back((eg + eg.adjoint()) / 2.0);
    }
  }
  return effects;
}
} // namespace detail

/// Simultaneous measurement of two commuting observables. Outcomes are the
/// pairs (x, y), x-major; the effect of (x, y) is E_x G_y.
inline Observable product_observable(const Observable &a, const Observable &b,
                                     double tolerance = tol::commute) {
  const auto report = commute_check(a, b, tolerance);
  if (!report.commute) {
    throw NonCommutingError(report.max_residual);
  }
  std::vector<Label> outcomes;
  outcomes.reserve(a.size() * b.size());
  for (const auto &x : a.outcomes()) {
    for (const auto &y : b.outcomes()) {
      outcomes.push_back(Label::tuple({x, y}));
    }
  }
  return {std::move(outcomes), detail::pairwise_products(a, b)};
}

/// Born rule at the point measure delta_omega.
inline OutcomeDistribution classical_born(const ClassicalObservable &o,
                                          std::size_t omega_index) {
  detail::require(omega_index < o.omega_size(), ErrorKind::IndexOutOfRange,
                  "omega index out of range");
  std::vector<double> probs;
  probs.reserve(o.size());
  for (const auto &f : o.effects()) {
    probs.push_back(f(static_cast<Eigen::Index>(omega_index)));
  }
  return {o.outcomes(), std::move(probs)};
}

/// Inverse-CDF draw in stored outcome order. Returns the outcome index.
///
/// Probabilities in [-1e-12, 0) are treated as 0.
inline std::size_t sample_index(const OutcomeDistribution &dist, Rng &rng) {
  const auto &p = dist.probabilities();
  double total = 0.0;
  for (double v : p) {
    total += std::max(0.0, v);
  }
  const double target = rng.uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double w = std::max(0.0, p[k]);
    if (w > 0.0) {
      last_positive = k;
    }
    cumulative += w;
    if (target < cumulative) {
      return k;
    }
  }
  // Rounding can leave target == cumulative at the very end.
  return last_positive;
}

inline Label sample(const OutcomeDistribution &dist, Rng &rng) {
  return dist.outcomes()[sample_index(dist, rng)];
}

inline Label sample(const Observable &o, const State &rho, Rng &rng) {
  return sample(born_distribution(o, rho), rng);
}

inline Label sample(const ClassicalObservable &o, std::size_t omega_index, Rng &rng) {
  return sample(classical_born(o, omega_index), rng);
}

} // namespace mt
