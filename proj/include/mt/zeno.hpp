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
 * Quantum Zeno ("brake") effect: N rounds of a projective Lueders channel
 * followed by a Schrodinger step of length total_time / N, and the survival
 * probability of the initial state psi under that channel.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mt/causality.hpp"
#include "mt/errors.hpp"
#include "mt/measurement.hpp"
#include "mt/operator_core.hpp"

namespace mt {

/// Complete family of mutually orthogonal projections.
class SpectralResolution {
public:
  explicit SpectralResolution(std::vector<ComplexMatrix> projections, double tolerance = 1e-10)
      : projections_(std::move(projections)) {
    if (projections_.empty()) {
      detail::fail(ErrorKind::InvalidResolution, "empty resolution");
    }
    const auto d = projections_.front().rows();
    ComplexMatrix total = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < projections_.size(); ++i) {
      const auto &p = projections_[i];
      if (p.rows() != d || p.cols() != d) {
        detail::fail(ErrorKind::InvalidResolution, "projections differ in dimension");
      }
      const double herm = op_norm(p - p.adjoint());
      const double idem = op_norm(p * p - p);
      if (herm > tolerance || idem > tolerance) {
        detail::fail(ErrorKind::InvalidResolution,
                     "element " + std::to_string(i) + " is not an orthogonal projection",
                     std::max(herm, idem));
      }
      for (std::size_t j = i + 1; j < projections_.size(); ++j) {
        const double overlap = op_norm(p * projections_[j]);
        if (overlap > tolerance) {
          detail::fail(ErrorKind::InvalidResolution,
                       "elements " + std::to_string(i) + " and " + std::to_string(j) +
                           " are not orthogonal",
                       overlap);
        }
      }
      total += p;
    }
    const double completeness = op_norm(total - ComplexMatrix::Identity(d, d));
    if (completeness > tolerance) {
      detail::fail(ErrorKind::InvalidResolution, "projections do not sum to the identity",
                   completeness);
    }
  }

  /// [|psi><psi|, I - |psi><psi|].
  static SpectralResolution of_state(const ComplexVector &psi) {
    const ComplexMatrix p1 = projector_onto(psi);
    return SpectralResolution({p1, identity(static_cast<std::size_t>(psi.size())) - p1});
  }

  std::size_t dim() const { return static_cast<std::size_t>(projections_.front().rows()); }
  const std::vector<ComplexMatrix> &projections() const { return projections_; }

private:
  std::vector<ComplexMatrix> projections_;
};

struct ZenoConfig {
  HermitianOperator hamiltonian;
  double hbar = 1.0;
  ComplexVector psi;
  double total_time = 1.0;
  std::size_t n = 1;

  void validate() const {
    detail::require(hbar > 0.0, ErrorKind::InvalidArgument, "hbar must be positive");
    detail::require(n >= 1, ErrorKind::InvalidArgument, "N must be positive");
    detail::require(static_cast<std::size_t>(psi.size()) == hamiltonian.dim(),
                    ErrorKind::DimensionMismatch, "psi and Hamiltonian dimensions differ");
    const double err = std::abs(psi.norm() - 1.0);
    detail::require(err <= 1e-12, ErrorKind::InvalidArgument, "psi must have unit norm", err);
  }

  double step() const { return total_time / static_cast<double>(n); }
};

/// rho -> sum_n P_n rho P_n.
inline MarkovChannel lueders_channel(const SpectralResolution &p) {
  return MarkovChannel::kraus(p.projections());
}

/// rho -> U rho U^dag with U = exp(-i H dt / hbar).
inline MarkovChannel schrodinger_channel(const HermitianOperator &h, double dt,
                                         double hbar = 1.0) {
  return MarkovChannel::kraus({unitary_evolution(h, dt, hbar)});
}

/// N rounds of (project, then evolve by total_time / N), as one Markov
/// operator. On states the projection of each round acts before its
/// evolution step.
inline MarkovChannel zeno_channel(const ZenoConfig &cfg, const SpectralResolution &p,
                                  const ComposeOptions &opts = {}) {
  cfg.validate();
  detail::require(p.dim() == cfg.hamiltonian.dim(), ErrorKind::DimensionMismatch,
                  "resolution and Hamiltonian dimensions differ");
  const MarkovChannel round =
      compose(lueders_channel(p), schrodinger_channel(cfg.hamiltonian, cfg.step(), cfg.hbar),
              opts);
  MarkovChannel acc = round;
  for (std::size_t k = 1; k < cfg.n; ++k) {
    acc = compose(acc, round, opts);
  }
  return acc;
}

/// Two-outcome observable {x1: |psi><psi|, x2: I - |psi><psi|}.
inline Observable survival_observable(const ComplexVector &psi) {
  const auto p = SpectralResolution::of_state(psi);
  return Observable({Label("x1"), Label("x2")}, p.projections());
}

/// Probability of x1 when the survival observable at time total_time is
/// pulled back through the Zeno channel and measured in psi.
inline double survival_probability(const ZenoConfig &cfg, const ComposeOptions &opts = {}) {
  cfg.validate();
  const auto phi = zeno_channel(cfg, SpectralResolution::of_state(cfg.psi), opts);
  const auto pulled = pullback(phi, survival_observable(cfg.psi));
  return born_distribution(pulled, State::pure(cfg.psi)).probability(Label("x1"));
}

/// |<psi, exp(-i H dt / hbar) psi>|^(2N): the probability that every one of
/// the N intermediate projections finds psi.
inline double zeno_lower_bound(const ZenoConfig &cfg) {
  cfg.validate();
  const ComplexMatrix u = unitary_evolution(cfg.hamiltonian, cfg.step(), cfg.hbar);
  const double amplitude = std::abs(inner(cfg.psi, u, cfg.psi));
  return std::pow(amplitude, 2.0 * static_cast<double>(cfg.n));
}

struct NonCommutativityReport {
  /// ||[P1, U^dag P1 U]|| for one evolution step U.
  double residual;
  /// Whether realizing the two-time tree raised NonCommuting.
  bool realize_rejected;
  /// Residual carried by that error.
  double realize_residual;
  std::string failing_node;
};

/// Builds the two-time causal tree (survival observable at both times, one
/// Schrodinger step between them) and confirms that its realization does not
/// exist because the projections fail to commute.
inline NonCommutativityReport check_zeno_noncommutativity(const ZenoConfig &cfg,
                                                          double threshold = 1e-9) {
  cfg.validate();
  const ComplexMatrix u = unitary_evolution(cfg.hamiltonian, cfg.step(), cfg.hbar);
  const ComplexMatrix p1 = projector_onto(cfg.psi);
  NonCommutativityReport out{};
  out.residual = op_norm(commutator(p1, u.adjoint() * p1 * u));
  if (out.residual <= threshold) {
    detail::fail(ErrorKind::UnexpectedCommutation,
                 "projection commutes with its evolved copy; the configuration is degenerate",
                 out.residual);
  }

  const auto d = cfg.hamiltonian.dim();
  const auto obs = survival_observable(cfg.psi);
  CausalTree tree({{"t0", QuantumSpace{d}, obs}, {"t1", QuantumSpace{d}, obs}},
                  {{"t0", "t1", schrodinger_channel(cfg.hamiltonian, cfg.step(), cfg.hbar)}});
  try {
    (void)realize(tree);
  } catch (const NonCommutingError &e) {
    out.realize_rejected = true;
    out.realize_residual = e.residual();
    out.failing_node = e.node();
  }
  return out;
}

} // namespace mt
