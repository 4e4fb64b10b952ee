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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "mt/uncertainty.hpp"

namespace mt {
namespace {

using Catch::Matchers::WithinAbs;

ComplexVector y_eigenstate() {
  ComplexVector u(2);
  u << 1.0 / std::numbers::sqrt2, kI / std::numbers::sqrt2;
  return u;
}

JointScenario pointer_without_bias() {
  // Ahat1 = sigma_x (x) sigma_x read with s = |0>: the compression of N_1 is -I.
  return JointScenario(HermitianOperator(pauli::x()), HermitianOperator(pauli::z()),
                       basis_vector(2, 0), HermitianOperator(tensor(pauli::x(), pauli::x())),
                       HermitianOperator(tensor(pauli::z(), pauli::z())));
}

TEST_CASE("scenario validation", "[uncertainty]") {
  const HermitianOperator x(pauli::x()), z(pauli::z());
  CHECK_THROWS_AS(JointScenario(x, z, basis_vector(2, 0), HermitianOperator(tensor(pauli::x(), identity(2))),
                                HermitianOperator(tensor(pauli::z(), identity(2)))),
                  Error);
  CHECK_THROWS_AS(JointScenario(x, z, ComplexVector::Ones(2), HermitianOperator(identity(4)),
                                HermitianOperator(identity(4))),
                  Error);
  CHECK_THROWS_AS(JointScenario(x, z, basis_vector(3, 0), HermitianOperator(identity(4)),
                                HermitianOperator(identity(4))),
                  Error);
  CHECK_THROWS_AS(JointScenario(x, z, basis_vector(2, 0), HermitianOperator(identity(4)),
                                HermitianOperator(identity(4)), 0.0),
                  Error);
}

TEST_CASE("noise operators of the built-in scenario", "[uncertainty]") {
  const auto scn = builtin_qubit_scenario();
  CHECK(scn.commutator_residual() < 1e-15);
  const ComplexMatrix bias = std::numbers::sqrt2 * pauli::x() - identity(2);
  CHECK(op_norm(noise_operator(scn, 1).matrix() - tensor(pauli::x(), bias)) < 1e-15);
  CHECK_THROWS_AS(noise_operator(scn, 3), Error);

  const auto avg = check_same_average(scn);
  CHECK(avg.holds);
  CHECK(avg.max_violation < 1e-15);

  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = deltas(scn, haar_state(2, rng));
    CHECK_THAT(m.delta[0], WithinAbs(1.0, 1e-12));
    CHECK_THAT(m.delta[1], WithinAbs(1.0, 1e-12));
    CHECK_THAT(m.delta_bar[0], WithinAbs(1.0, 1e-12));
    CHECK_THAT(m.delta_bar[1], WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("same-average condition can fail", "[uncertainty]") {
  const auto scn = pointer_without_bias();
  const auto avg = check_same_average(scn);
  CHECK_FALSE(avg.holds);
  CHECK_THAT(avg.max_violation, WithinAbs(1.0, 1e-15));
  const auto cert = certify(scn, basis_vector(2, 0));
  CHECK_FALSE(cert.margin_same_average.has_value());
  CHECK_FALSE(cert.report.same_average);
}

TEST_CASE("standard deviations", "[uncertainty]") {
  const HermitianOperator x(pauli::x()), z(pauli::z()), y(pauli::y());
  CHECK_THAT(sigma(z, basis_vector(2, 0)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(sigma(x, basis_vector(2, 0)), WithinAbs(1.0, 1e-15));
  ComplexVector u(2);
  u << std::cos(0.3), std::sin(0.3);
  // sigma_z on (cos a, sin a): <Z> = cos 2a, sigma = |sin 2a|.
  CHECK_THAT(sigma(z, u), WithinAbs(std::sin(0.6), 1e-15));
  CHECK_THROWS_AS(sigma(z, ComplexVector::Ones(2)), Error);

  // Equality case: both sides of the Robertson relation equal 2.
  CHECK_THAT(2.0 * sigma(x, basis_vector(2, 0)) * sigma(y, basis_vector(2, 0)),
             WithinAbs(2.0, 1e-12));
  CHECK_THAT(robertson_margin(x, y, basis_vector(2, 0)), WithinAbs(0.0, 1e-12));
}

TEST_CASE("certificates for the built-in scenario", "[uncertainty]") {
  const auto scn = builtin_qubit_scenario();
  SECTION("sigma_y eigenstate attains equality") {
    const auto c = certify(scn, y_eigenstate());
    REQUIRE(c.margin_same_average.has_value());
    CHECK_THAT(*c.margin_same_average, WithinAbs(0.0, 1e-10));
    CHECK_THAT(c.report.commutator_bound, WithinAbs(1.0, 1e-12));
  }
  SECTION("ground state of sigma_z") {
    const auto c = certify(scn, basis_vector(2, 0));
    REQUIRE(c.margin_same_average.has_value());
    CHECK_THAT(*c.margin_same_average, WithinAbs(1.0, 1e-12));
    CHECK_THAT(c.margin_rough, WithinAbs(2.0, 1e-12));
    CHECK_THAT(c.report.sigma[0], WithinAbs(1.0, 1e-12));
    CHECK_THAT(c.report.sigma[1], WithinAbs(0.0, 1e-12));
    CHECK(c.cross_terms_vanish);
    CHECK(c.report.identity9_residual < 1e-12);
  }
  SECTION("hbar is carried but does not rescale the bound") {
    const auto c = certify(builtin_qubit_scenario(2.0), y_eigenstate());
    CHECK_THAT(c.report.commutator_bound, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("noiseless measurement of one observable", "[uncertainty]") {
  const HermitianOperator z(pauli::z());
  const HermitianOperator lifted(tensor(pauli::z(), identity(2)));
  const JointScenario scn(z, z, basis_vector(2, 1), lifted, lifted);
  Rng rng(6);
  const auto c = certify(scn, haar_state(2, rng));
  CHECK(c.report.delta[0] == 0.0);
  CHECK(c.report.delta[1] == 0.0);
  REQUIRE(c.margin_same_average.has_value());
  CHECK_THAT(*c.margin_same_average, WithinAbs(0.0, 1e-15));
  CHECK_THAT(c.margin_rough, WithinAbs(0.0, 1e-15));
}

TEST_CASE("random scenarios honour their construction contract", "[uncertainty]") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dh = 2 + trial % 2, dk = 2 + (trial / 2) % 2;
    const auto enforced = random_scenario(dh, dk, rng, true);
    CHECK(enforced.dim_h() == dh);
    CHECK(enforced.dim_k() == dk);
    CHECK(check_same_average(enforced).holds);
    const double scale =
        op_norm(enforced.ahat(1).matrix()) * op_norm(enforced.ahat(2).matrix());
    CHECK(enforced.commutator_residual() <= 1e-9 * std::max(1.0, scale));

    const auto loose = random_scenario(dh, dk, rng, false);
    CHECK_FALSE(check_same_average(loose).holds);
  }
  CHECK_THROWS_AS(random_scenario(1, 2, rng, true), Error);

  Rng a(7), b(7);
  const auto sa = random_scenario(2, 2, a, true);
  const auto sb = random_scenario(2, 2, b, true);
  CHECK(sa.ahat(1).matrix() == sb.ahat(1).matrix());
  CHECK(sa.ancilla() == sb.ancilla());
}

TEST_CASE("uncertainty invariants on random scenarios", "[uncertainty][property]") {
  Rng rng(314);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dh = 2 + trial % 3, dk = 2 + (trial / 3) % 2;
    const bool enforce = trial % 2 == 0;
    const auto scn = random_scenario(dh, dk, rng, enforce);
    const auto u = haar_state(dh, rng);
    const auto c = certify(scn, u);
    const double scale =
        std::max(1.0, op_norm(scn.ahat(1).matrix()) * op_norm(scn.ahat(2).matrix()));

    CHECK(c.report.identity9_residual <= 1e-12 * scale);
    CHECK(c.margin_robertson >= -1e-10);
    CHECK(c.margin_rough >= -1e-10);
    CHECK(c.lift_residual <= 1e-12 * scale);
    for (int i = 0; i < 2; ++i) {
      CHECK(c.report.delta_bar[i] <= c.report.delta[i] + 1e-12);
    }
    if (enforce) {
      REQUIRE(c.margin_same_average.has_value());
      CHECK(*c.margin_same_average >= -1e-10);
      CHECK(c.cross_terms_vanish);
      for (int i = 0; i < 2; ++i) {
        CHECK_THAT(c.report.delta_bar[i], WithinAbs(c.report.delta[i], 1e-10));
      }
    }

    const HermitianOperator a(random_hermitian(dh, rng)), b(random_hermitian(dh, rng));
    CHECK(robertson_margin(a, b, u) >= -1e-10);
  }
}

} // namespace
} // namespace mt
