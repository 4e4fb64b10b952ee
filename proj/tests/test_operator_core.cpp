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

#include "mt/operator_core.hpp"
#include "mt/random.hpp"

namespace mt {
namespace {

using Catch::Matchers::WithinAbs;

// Independent of the spectral path: sum_{k<terms} (-i t H)^k / k!.
ComplexMatrix taylor_exp(const ComplexMatrix &h, double t, int terms = 40) {
  ComplexMatrix term = identity(static_cast<std::size_t>(h.rows()));
  ComplexMatrix sum = term;
  for (int k = 1; k < terms; ++k) {
    term = term * (-kI * t * h) / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

TEST_CASE("spectral decomposition of Pauli operators", "[operator_core]") {
  SECTION("sigma_z is already diagonal") {
    const auto spec = spectral_decomposition(HermitianOperator(pauli::z()));
    REQUIRE(spec.eigenvalues.size() == 2);
    CHECK(spec.eigenvalues[0] == -1.0);
    CHECK(spec.eigenvalues[1] == 1.0);
    CHECK(op_norm(spec.projectors[0] - projector_onto(basis_vector(2, 1))) < 1e-12);
    CHECK(op_norm(spec.projectors[1] - projector_onto(basis_vector(2, 0))) < 1e-12);
  }
  SECTION("identity collapses to one projector") {
    const auto spec = spectral_decomposition(HermitianOperator(identity(3)), 1e-8);
    REQUIRE(spec.eigenvalues.size() == 1);
    CHECK_THAT(spec.eigenvalues[0], WithinAbs(1.0, 1e-12));
    CHECK(op_norm(spec.projectors[0] - identity(3)) < 1e-12);
  }
  SECTION("sigma_x projects onto (1, -+1)/sqrt2") {
    const auto spec = spectral_decomposition(HermitianOperator(pauli::x()));
    REQUIRE(spec.eigenvalues.size() == 2);
    ComplexVector minus(2), plus(2);
    minus << 1.0 / std::numbers::sqrt2, -1.0 / std::numbers::sqrt2;
    plus << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    CHECK(op_norm(spec.projectors[0] - projector_onto(minus)) < 1e-12);
    CHECK(op_norm(spec.projectors[1] - projector_onto(plus)) < 1e-12);
    // -P_minus + P_plus multiplied out entrywise
    const ComplexMatrix recon = -1.0 * spec.projectors[0] + 1.0 * spec.projectors[1];
    CHECK(op_norm(recon - pauli::x()) < 1e-12);
  }
}

TEST_CASE("Hermitian operators reject non-Hermitian input", "[operator_core]") {
  ComplexMatrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS(HermitianOperator(m), Error);
  try {
    HermitianOperator bad(m);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::NonHermitian);
    CHECK(e.residual() > 0.5);
  }
  CHECK_THROWS_AS(HermitianOperator(ComplexMatrix(2, 3)), Error);
}

TEST_CASE("commutators", "[operator_core]") {
  CHECK(op_norm(commutator(pauli::x(), pauli::z()) - (-2.0 * kI) * pauli::y()) < 1e-15);
  CHECK(commutator(pauli::y(), pauli::y()).isZero());
  const ComplexMatrix xx = tensor(pauli::x(), pauli::x());
  const ComplexMatrix zz = tensor(pauli::z(), pauli::z());
  // xx * zz and zz * xx written out: both equal (xz) (x) (xz) = (-i y) (x) (-i y).
  ComplexMatrix expected(4, 4);
  expected << 0, 0, 0, 1, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 0;
  CHECK(op_norm(xx * zz - expected) < 1e-15);
  CHECK(op_norm(zz * xx - expected) < 1e-15);
  CHECK(commutator(xx, zz).isZero());
  CHECK_THROWS_AS(commutator(pauli::x(), identity(3)), Error);
}

TEST_CASE("tensor products", "[operator_core]") {
  CHECK(tensor(identity(2), identity(2)) == identity(4));
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.diagonal() << 1, 1, -1, -1;
  CHECK(tensor(pauli::z(), identity(2)) == expected);

  ComplexVector s(2);
  s << Complex(0.6, 0.0), Complex(0.0, 0.8);
  ComplexVector want(4);
  want << s(0), s(1), 0.0, 0.0;
  CHECK(tensor(basis_vector(2, 0), s) == want);
}

TEST_CASE("unitary evolution", "[operator_core]") {
  const HermitianOperator sx(pauli::x());
  CHECK(op_norm(unitary_evolution(sx, 0.0) - identity(2)) < 1e-15);
  CHECK(op_norm(unitary_evolution(sx, std::numbers::pi) + identity(2)) < 1e-14);

  const ComplexMatrix closed = std::cos(0.1) * identity(2) - kI * std::sin(0.1) * pauli::x();
  CHECK(op_norm(unitary_evolution(sx, 0.1) - closed) < 1e-14);
  CHECK(op_norm(unitary_evolution(sx, 0.1) - taylor_exp(pauli::x(), 0.1)) < 1e-14);

  CHECK_THROWS_AS(unitary_evolution(sx, 1.0, 0.0), Error);
}

TEST_CASE("unitary evolution matches a Taylor series on random generators", "[operator_core]") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + trial % 4;
    const ComplexMatrix h = random_hermitian(d, rng) / static_cast<double>(d);
    const double t = 0.5 * rng.uniform();
    CHECK(op_norm(unitary_evolution(HermitianOperator(h), t) - taylor_exp(h, t)) < 1e-12);
  }
}

TEST_CASE("operator-core invariants on random inputs", "[operator_core][property]") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 7;
    const HermitianOperator a(random_hermitian(d, rng));
    const HermitianOperator b(random_hermitian(d, rng));

    const auto spec = spectral_decomposition(a);
    CHECK(op_norm(spec.reconstruct() - a.matrix()) <= 1e-10 * scale_of(a.matrix()));
    ComplexMatrix total = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < spec.projectors.size(); ++i) {
      const auto &p = spec.projectors[i];
      CHECK(op_norm(p * p - p) <= 1e-10);
      for (std::size_t j = i + 1; j < spec.projectors.size(); ++j) {
        CHECK(op_norm(p * spec.projectors[j]) <= 1e-10);
      }
      total += p;
    }
    CHECK(op_norm(total - identity(d)) <= 1e-10);
    for (std::size_t i = 1; i < spec.eigenvalues.size(); ++i) {
      CHECK(spec.eigenvalues[i] > spec.eigenvalues[i - 1]);
    }

    const ComplexMatrix c = commutator(a, b);
    CHECK(op_norm(c.adjoint() + c) <= 1e-12 * scale_of(a.matrix()) * scale_of(b.matrix()));

    const ComplexMatrix u = unitary_evolution(a, rng.normal(), 0.5 + rng.uniform());
    CHECK(op_norm(u.adjoint() * u - identity(d)) <= 1e-10);
  }
}

TEST_CASE("tensor is associative and obeys the mixed-product rule", "[operator_core][property]") {
  Rng rng(5);
  const auto random_matrix = [&](std::size_t r, std::size_t c) {
    ComplexMatrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      m.data()[k] = rng.complex_normal();
    }
    return m;
  };
  const auto integer_matrix = [&](std::size_t r, std::size_t c) {
    ComplexMatrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      m.data()[k] = Complex(std::floor(10 * rng.normal()), std::floor(10 * rng.normal()));
    }
    return m;
  };
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 2;
    const std::size_t m = 2 + (trial / 2) % 2;
    const auto a = random_matrix(n, n), b = random_matrix(m, m);
    const auto c = random_matrix(n, n), d = random_matrix(m, m);
    // Gaussian-integer entries keep every product exact, so equality is bitwise.
    const auto ia = integer_matrix(n, n), ib = integer_matrix(m, m), ie = integer_matrix(2, 3);
    CHECK(tensor(tensor(ia, ib), ie) == tensor(ia, tensor(ib, ie)));
    const ComplexMatrix lhs = tensor(a, b) * tensor(c, d);
    const ComplexMatrix rhs = tensor(ComplexMatrix(a * c), ComplexMatrix(b * d));
    CHECK(op_norm(lhs - rhs) <= 1e-12 * std::max(1.0, op_norm(rhs)));
  }
}

TEST_CASE("derived seeds are stable and order independent", "[random]") {
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  CHECK(derive_seed(7, 3) != derive_seed(7, 4));
  CHECK(derive_seed(7, 3) != derive_seed(8, 3));
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) {
    CHECK(a.normal() == b.normal());
  }
  Rng r(3);
  const auto u = random_unitary(4, r);
  CHECK(is_unitary(u));
  CHECK_THAT(haar_state(5, r).norm(), WithinAbs(1.0, 1e-14));
}

} // namespace
} // namespace mt
