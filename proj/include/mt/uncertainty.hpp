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
 * Approximate joint measurement of two observables A1, A2 on H through a
 * commuting pair Ahat1, Ahat2 on H (x) K with ancilla state s, the noise
 * operators N_i = Ahat_i - A_i (x) I, and certification of the uncertainty
 * inequalities that bound their magnitudes:
 *
 *  - Robertson, applied to the noise pair:
 *      2 dbar_1 dbar_2 >= |<u(x)s, [N_1, N_2] u(x)s>|
 *  - with the same-average condition <u(x)s, N_i u(x)s> = 0 for all u:
 *      d_1 d_2 >= 1/2 |<u, [A1, A2] u>|
 *  - without it:
 *      d_1 d_2 + d_2 sigma(A1; u) + d_1 sigma(A2; u) >= 1/2 |<u, [A1, A2] u>|
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>

#include "mt/errors.hpp"
#include "mt/operator_core.hpp"
#include "mt/random.hpp"

namespace mt {

inline constexpr double kSameAverageTol = 1e-9;

/// Validated joint-measurement setup. The Ahat pair must commute to
/// tol::commute * max(1, ||Ahat1|| ||Ahat2||).
class JointScenario {
public:
  JointScenario(HermitianOperator a1, HermitianOperator a2, ComplexVector s,
                HermitianOperator ahat1, HermitianOperator ahat2, double hbar = 1.0)
      : a1_(std::move(a1)), a2_(std::move(a2)), s_(std::move(s)), ahat1_(std::move(ahat1)),
        ahat2_(std::move(ahat2)), hbar_(hbar) {
    detail::require(a1_.dim() == a2_.dim(), ErrorKind::DimensionMismatch,
                    "A1 and A2 act on different spaces");
    detail::require(s_.size() > 0, ErrorKind::DimensionMismatch, "empty ancilla state");
    const auto joint = a1_.dim() * static_cast<std::size_t>(s_.size());
    detail::require(ahat1_.dim() == joint && ahat2_.dim() == joint,
                    ErrorKind::DimensionMismatch, "Ahat must act on H (x) K");
    const double norm_err = std::abs(s_.norm() - 1.0);
    detail::require(norm_err <= 1e-12, ErrorKind::ScenarioInvalid,
                    "ancilla state must have unit norm", norm_err);
    detail::require(hbar_ > 0.0, ErrorKind::ScenarioInvalid, "hbar must be positive");
    commutator_residual_ = op_norm(commutator(ahat1_.matrix(), ahat2_.matrix()));
    const double bound =
        tol::commute * std::max(1.0, op_norm(ahat1_.matrix()) * op_norm(ahat2_.matrix()));
    if (commutator_residual_ > bound) {
      detail::fail(ErrorKind::ScenarioInvalid,
                   "[Ahat1, Ahat2] != 0 (residual " + std::to_string(commutator_residual_) + ")",
                   commutator_residual_);
    }
  }

  std::size_t dim_h() const { return a1_.dim(); }
  std::size_t dim_k() const { return static_cast<std::size_t>(s_.size()); }
  const HermitianOperator &a(int i) const { return i == 1 ? a1_ : a2_; }
  const HermitianOperator &ahat(int i) const { return i == 1 ? ahat1_ : ahat2_; }
  const ComplexVector &ancilla() const { return s_; }
  double hbar() const { return hbar_; }
  double commutator_residual() const { return commutator_residual_; }

  /// A_i (x) I_K.
  ComplexMatrix lifted(int i) const { return tensor(a(i).matrix(), identity(dim_k())); }

private:
  HermitianOperator a1_, a2_;
  ComplexVector s_;
  HermitianOperator ahat1_, ahat2_;
  double hbar_;
  double commutator_residual_ = 0.0;
};

/// N_i = Ahat_i - A_i (x) I.
inline HermitianOperator noise_operator(const JointScenario &scn, int i) {
  detail::require(i == 1 || i == 2, ErrorKind::InvalidArgument, "index must be 1 or 2");
  return HermitianOperator(scn.ahat(i).matrix() - scn.lifted(i));
}

struct NoiseMagnitudes {
  double delta[2];     // ||N_i (u (x) s)||
  double delta_bar[2]; // ||(N_i - <N_i>) (u (x) s)||
};

namespace detail {
inline ComplexVector checked_joint_state(const JointScenario &scn, const ComplexVector &u) {
  require(static_cast<std::size_t>(u.size()) == scn.dim_h(), ErrorKind::DimensionMismatch,
          "state does not live on H");
  const double err = std::abs(u.norm() - 1.0);
  require(err <= 1e-12, ErrorKind::InvalidArgument, "state must have unit norm", err);
  return tensor(u, scn.ancilla());
}
} // namespace detail

inline NoiseMagnitudes deltas(const JointScenario &scn, const ComplexVector &u) {
  const ComplexVector psi = detail::checked_joint_state(scn, u);
  NoiseMagnitudes out{};
  for (int i = 1; i <= 2; ++i) {
    const ComplexVector npsi = noise_operator(scn, i).matrix() * psi;
    const Complex mean = psi.dot(npsi);
    out.delta[i - 1] = npsi.norm();
    out.delta_bar[i - 1] = (npsi - mean * psi).norm();
  }
  return out;
}

struct SameAverageReport {
  bool holds;
  double max_violation;
};

/// Same-average condition in polarized form: every entry
/// <e_j (x) s, N_i (e_k (x) s)> of the ancilla compression of N_i vanishes.
inline SameAverageReport check_same_average(const JointScenario &scn,
                                            double tolerance = kSameAverageTol) {
  const ComplexMatrix embed = tensor(identity(scn.dim_h()), ComplexMatrix(scn.ancilla()));
  double worst = 0.0;
  for (int i = 1; i <= 2; ++i) {
    const ComplexMatrix compressed = embed.adjoint() * noise_operator(scn, i).matrix() * embed;
    worst = std::max(worst, compressed.cwiseAbs().maxCoeff());
  }
  return {worst <= tolerance, worst};
}

/// Standard deviation ||(A - <u, A u>) u||.
inline double sigma(const HermitianOperator &a, const ComplexVector &u) {
  detail::require(static_cast<std::size_t>(u.size()) == a.dim(), ErrorKind::DimensionMismatch,
                  "state and operator dimensions differ");
  const double err = std::abs(u.norm() - 1.0);
  detail::require(err <= 1e-12, ErrorKind::InvalidArgument, "state must have unit norm", err);
  const ComplexVector au = a.matrix() * u;
  return (au - u.dot(au) * u).norm();
}

/// 2 sigma(A; u) sigma(B; u) - |<u, [A, B] u>|; non-negative for every state.
inline double robertson_margin(const HermitianOperator &a, const HermitianOperator &b,
                               const ComplexVector &u) {
  return 2.0 * sigma(a, u) * sigma(b, u) -
         std::abs(inner(u, commutator(a.matrix(), b.matrix()), u));
}

struct NoiseReport {
  double delta[2];
  double delta_bar[2];
  double sigma[2];
  double commutator_bound; // 1/2 |<u, [A1, A2] u>|
  double identity9_residual;
  bool same_average;

  /// Error and disturbance in the error-disturbance rewrite of the rough bound.
  double epsilon() const { return delta[0]; }
  double eta() const { return delta[1]; }
};

struct Certificate {
  NoiseReport report;
  /// 2 dbar_1 dbar_2 - |<[N_1, N_2]>|.
  double margin_robertson;
  /// d_1 d_2 - 1/2 |<u, [A1, A2] u>|; present only under the same-average condition.
  std::optional<double> margin_same_average;
  /// d_1 d_2 + d_2 sigma_1 + d_1 sigma_2 - 1/2 |<u, [A1, A2] u>|.
  double margin_rough;
  /// |<[N_1, A2 (x) I]>| and |<[A1 (x) I, N_2]>|; vanish under the same-average condition.
  double cross_term[2];
  /// |<u(x)s, [A1(x)I, A2(x)I] u(x)s> - <u, [A1, A2] u>|.
  double lift_residual;
  /// True when the cross terms vanish within `cross_tol`; only meaningful
  /// when same_average holds.
  bool cross_terms_vanish;
};

inline Certificate certify(const JointScenario &scn, const ComplexVector &u,
                           double cross_tol = 1e-10) {
  const double scale =
      std::max(1.0, op_norm(scn.ahat(1).matrix()) * op_norm(scn.ahat(2).matrix()));
  if (scn.commutator_residual() > tol::commute * scale) {
    detail::fail(ErrorKind::ScenarioInvalid, "[Ahat1, Ahat2] != 0", scn.commutator_residual());
  }
  const ComplexVector psi = detail::checked_joint_state(scn, u);
  const ComplexMatrix n1 = noise_operator(scn, 1).matrix();
  const ComplexMatrix n2 = noise_operator(scn, 2).matrix();
  const ComplexMatrix l1 = scn.lifted(1);
  const ComplexMatrix l2 = scn.lifted(2);

  const ComplexMatrix c_nn = commutator(n1, n2);
  const ComplexMatrix c_nl = commutator(n1, l2);
  const ComplexMatrix c_ln = commutator(l1, n2);
  const ComplexMatrix c_ll = commutator(l1, l2);

  const auto mags = deltas(scn, u);
  const auto avg = check_same_average(scn);
  const Complex a_comm = inner(u, commutator(scn.a(1).matrix(), scn.a(2).matrix()), u);
  const double bound = 0.5 * std::abs(a_comm);

  Certificate out{};
  auto &r = out.report;
  for (int k = 0; k < 2; ++k) {
    r.delta[k] = mags.delta[k];
    r.delta_bar[k] = mags.delta_bar[k];
    r.sigma[k] = sigma(scn.a(k + 1), u);
  }
  r.commutator_bound = bound;
  r.identity9_residual = op_norm(c_nn + c_nl + c_ln + c_ll);
  r.same_average = avg.holds;

  out.margin_robertson = 2.0 * r.delta_bar[0] * r.delta_bar[1] - std::abs(psi.dot(c_nn * psi));
  if (avg.holds) {
    out.margin_same_average = r.delta[0] * r.delta[1] - bound;
  }
  out.margin_rough = r.delta[0] * r.delta[1] + r.delta[1] * r.sigma[0] +
                     r.delta[0] * r.sigma[1] - bound;
  out.cross_term[0] = std::abs(psi.dot(c_nl * psi));
  out.cross_term[1] = std::abs(psi.dot(c_ln * psi));
  out.lift_residual = std::abs(psi.dot(c_ll * psi) - a_comm);
  out.cross_terms_vanish = out.cross_term[0] <= cross_tol && out.cross_term[1] <= cross_tol;
  return out;
}

/// A1 = sigma_x, A2 = sigma_z on a qubit, read through correlated Pauli
/// pointers Ahat1 = sqrt2 sigma_x (x) sigma_x, Ahat2 = sqrt2 sigma_z (x) sigma_z
/// with ancilla s = cos(pi/8)|0> + sin(pi/8)|1>, so <s, sigma_x s> =
/// <s, sigma_z s> = 1/sqrt2 and both noise magnitudes equal 1 for every u.
inline JointScenario builtin_qubit_scenario(double hbar = 1.0) {
  const double r2 = std::numbers::sqrt2;
  ComplexVector s(2);
  s << std::cos(std::numbers::pi / 8), std::sin(std::numbers::pi / 8);
  return JointScenario(HermitianOperator(pauli::x()), HermitianOperator(pauli::z()), s,
                       HermitianOperator(r2 * tensor(pauli::x(), pauli::x())),
                       HermitianOperator(r2 * tensor(pauli::z(), pauli::z())), hbar);
}

/// Random commuting scenario. Ahat1 and Ahat2 are independent real functions
/// of one GUE operator on H (x) K (shared eigenbasis), and s is Haar random.
///
/// With `enforce_same_average`, A_i is the ancilla compression
/// (I (x) <s|) Ahat_i (I (x) |s>), which makes the same-average condition
/// exact. Otherwise A_i is that compression plus a GUE perturbation of random
/// strength, so the condition generically fails.
inline JointScenario random_scenario(std::size_t dim_h, std::size_t dim_k, Rng &rng,
                                     bool enforce_same_average, int max_attempts = 8) {
  detail::require(dim_h >= 2 && dim_k >= 2, ErrorKind::InvalidArgument,
                  "random scenarios need dimensions >= 2");
  const std::size_t joint = dim_h * dim_k;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(random_hermitian(joint, rng));
    if (es.info() != Eigen::Success) {
      continue;
    }
    const ComplexMatrix &v = es.eigenvectors();
    RealVector f1(static_cast<Eigen::Index>(joint)), f2(static_cast<Eigen::Index>(joint));
    for (Eigen::Index k = 0; k < f1.size(); ++k) {
      f1(k) = rng.normal();
      f2(k) = rng.normal();
    }
    const ComplexMatrix ahat1 = v * f1.cast<Complex>().asDiagonal() * v.adjoint();
    const ComplexMatrix ahat2 = v * f2.cast<Complex>().asDiagonal() * v.adjoint();
    const ComplexVector s = haar_state(dim_k, rng);
    const ComplexMatrix embed = tensor(identity(dim_h), ComplexMatrix(s));
    ComplexMatrix a1 = embed.adjoint() * ahat1 * embed;
    ComplexMatrix a2 = embed.adjoint() * ahat2 * embed;
    if (!enforce_same_average) {
      a1 += rng.uniform() * random_hermitian(dim_h, rng);
      a2 += rng.uniform() * random_hermitian(dim_h, rng);
    }
    try {
      JointScenario scn(HermitianOperator(a1), HermitianOperator(a2), s,
                        HermitianOperator(ahat1), HermitianOperator(ahat2));
      if (enforce_same_average && !check_same_average(scn).holds) {
        continue;
      }
      return scn;
    } catch (const Error &) {
      continue;
    }
  }
  detail::fail(ErrorKind::ConstructionFailed,
               "random scenario failed verification after " + std::to_string(max_attempts) +
                   " attempts");
}

} // namespace mt
