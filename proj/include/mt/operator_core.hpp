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
 * Dense complex matrix foundation: Hermitian operators, spectral
 * decompositions, Kronecker products, commutators and unitary evolution.
 *
 * Every tolerance is relative to max(1, ||A||) where ||.|| is the operator
 * (spectral) norm.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mt/errors.hpp"

namespace mt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};

namespace tol {
inline constexpr double herm = 1e-9;
inline constexpr double recon = 1e-10;
inline constexpr double unitary = 1e-10;
inline constexpr double group = 1e-8;
inline constexpr double commute = 1e-9;
} // namespace tol

/// Spectral norm (largest singular value).
inline double op_norm(const ComplexMatrix &m) {
  if (m.size() == 0) {
    return 0.0;
  }
  // Gram matrix is Hermitian PSD; its largest eigenvalue is ||m||^2.
  const ComplexMatrix gram = m.rows() <= m.cols() ? ComplexMatrix(m * m.adjoint())
                                                  : ComplexMatrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double scale_of(const ComplexMatrix &m) { return std::max(1.0, op_norm(m)); }

inline bool all_finite(const ComplexMatrix &m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      return false;
    }
  }
  return true;
}

inline void require_square(const ComplexMatrix &m, const char *what) {
  detail::require(m.rows() == m.cols() && m.rows() > 0,
                  ErrorKind::DimensionMismatch,
                  std::string(what) + " must be a non-empty square matrix");
}

/// Square complex matrix certified to satisfy ||A - A^dag|| <= tol * max(1, ||A||).
///
/// The stored matrix is the exact Hermitian part (A + A^dag) / 2, so downstream
/// eigen-solvers never see the residual anti-Hermitian noise.
class HermitianOperator {
public:
  HermitianOperator() = default;

  explicit HermitianOperator(const ComplexMatrix &m, double tolerance = tol::herm) {
    require_square(m, "Hermitian operator");
    detail::require(all_finite(m), ErrorKind::InvalidArgument,
                    "matrix has non-finite entries");
    const double residual = op_norm(m - m.adjoint());
    if (residual > tolerance * scale_of(m)) {
      detail::fail(ErrorKind::NonHermitian,
                   "||A - A^dag|| = " + std::to_string(residual), residual);
    }
    matrix_ = (m + m.adjoint()) / 2.0;
  }

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix &matrix() const { return matrix_; }
  operator const ComplexMatrix &() const { return matrix_; }

private:
  ComplexMatrix matrix_;
};

struct SpectralDecomposition {
  std::vector<double> eigenvalues; // ascending, distinct after grouping
  std::vector<ComplexMatrix> projectors;

  ComplexMatrix reconstruct() const {
    ComplexMatrix out = ComplexMatrix::Zero(projectors.front().rows(),
                                            projectors.front().cols());
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
      out += eigenvalues[k] * projectors[k];
    }
    return out;
  }
};

/// Eigen-decomposes `a`, merging eigenvalues that lie within
/// group_tol * max(1, ||A||) of their ascending neighbour into one projector.
/// A merged group reports the mean of its members.
inline SpectralDecomposition spectral_decomposition(const HermitianOperator &a,
                                                    double group_tol = tol::group) {
  detail::require(group_tol >= 0.0, ErrorKind::InvalidArgument,
                  "group_tol must be non-negative");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
  if (es.info() != Eigen::Success) {
    detail::fail(ErrorKind::NumericalFailure, "Hermitian eigensolver did not converge");
  }
  const RealVector &vals = es.eigenvalues();
  const ComplexMatrix &vecs = es.eigenvectors();
  const double threshold = group_tol * std::max(1.0, vals.cwiseAbs().maxCoeff());

  SpectralDecomposition out;
  const Eigen::Index n = vals.size();
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && vals(stop) - vals(stop - 1) <= threshold) {
      ++stop;
    }
    const auto block = vecs.middleCols(start, stop - start);
    out.eigenvalues.push_back(vals.segment(start, stop - start).mean());
    out.projectors.emplace_back(block * block.adjoint());
    start = stop;
  }
  return out;
}

/// AB - BA.
inline ComplexMatrix commutator(const ComplexMatrix &a, const ComplexMatrix &b) {
  detail::require(a.rows() == a.cols() && b.rows() == b.cols() && a.rows() == b.rows(),
                  ErrorKind::DimensionMismatch, "commutator needs equal square dimensions");
  return a * b - b * a;
}

/// Kronecker product with row index i_A * rows_B + i_B.
inline ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline ComplexVector tensor(const ComplexVector &a, const ComplexVector &b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

inline HermitianOperator tensor(const HermitianOperator &a, const HermitianOperator &b) {
  return HermitianOperator(tensor(a.matrix(), b.matrix()));
}

/// exp(-i H t / hbar), evaluated on the spectral resolution of H.
inline ComplexMatrix unitary_evolution(const HermitianOperator &h, double t,
                                       double hbar = 1.0) {
  detail::require(hbar > 0.0, ErrorKind::InvalidArgument, "hbar must be positive");
  const auto spec = spectral_decomposition(h, 0.0);
  ComplexMatrix u = ComplexMatrix::Zero(h.dim(), h.dim());
  for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
    u += std::exp(-kI * (spec.eigenvalues[k] * t / hbar)) * spec.projectors[k];
  }
  return u;
}

inline ComplexMatrix identity(std::size_t dim) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim),
                                 static_cast<Eigen::Index>(dim));
}

inline bool is_unitary(const ComplexMatrix &u, double tolerance = tol::unitary) {
  return u.rows() == u.cols() &&
         op_norm(u.adjoint() * u - identity(static_cast<std::size_t>(u.rows()))) <=
             tolerance;
}

/// |psi><psi|.
inline ComplexMatrix projector_onto(const ComplexVector &psi) {
  return psi * psi.adjoint();
}

/// <u, A v>.
inline Complex inner(const ComplexVector &u, const ComplexMatrix &a, const ComplexVector &v) {
  return u.dot(a * v);
}

namespace pauli {
inline ComplexMatrix x() { return (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished(); }
inline ComplexMatrix y() { return (ComplexMatrix(2, 2) << 0, -kI, kI, 0).finished(); }
inline ComplexMatrix z() { return (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished(); }
} // namespace pauli

inline ComplexVector basis_vector(std::size_t dim, std::size_t index) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

} // namespace mt
