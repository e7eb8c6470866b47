// Copyright 2026 The qmarkov Authors
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

#pragma once

// Dense complex-Hermitian linear algebra: eigendecomposition, kernel and
// support frames, subspace containment and numerical rank.  Everything is
// templated on the real scalar and accepts arbitrary Eigen expressions.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qmarkov {
namespace linops {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename DerivedA, typename DerivedB>
auto kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::kroneckerProduct(a.eval(), b.eval());
  return out;
}

/// Entrywise tolerance under which asymmetric drift is silently symmetrized.
inline constexpr double kHermitianTol = 1e-12;
/// Default relative eigenvalue threshold for kernel extraction.
inline constexpr double kRankRelTol = 1e-10;
/// Eigenvalues below this are reported as a PSD violation.
inline constexpr double kPsdErrorFloor = -1e-8;

class NotHermitianError : public std::invalid_argument {
 public:
  explicit NotHermitianError(double max_asymmetry)
      : std::invalid_argument(
            "matrix is not Hermitian: max |H - H^dagger| = " +
            std::to_string(max_asymmetry)),
        max_asymmetry_(max_asymmetry) {}
  double max_asymmetry() const { return max_asymmetry_; }

 private:
  double max_asymmetry_;
};

class NotPsdError : public std::domain_error {
 public:
  explicit NotPsdError(double eigenvalue)
      : std::domain_error(
            "matrix is not positive semidefinite: eigenvalue " +
            std::to_string(eigenvalue)),
        eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Orthonormal columns spanning a kernel, support or arbitrary subspace.
template <typename Real>
struct SubspaceBasis {
  Eigen::Index ambient_dim = 0;
  CMatrix<Real> vectors;  // ambient_dim x size()
  Real tol = 0;

  Eigen::Index size() const { return vectors.cols(); }
  bool empty() const { return vectors.cols() == 0; }

  CMatrix<Real> projector() const {
    if (empty()) return CMatrix<Real>::Zero(ambient_dim, ambient_dim);
    return vectors * vectors.adjoint();
  }

  /// Gram-matrix deviation from the identity, max-abs.
  Real orthonormality_error() const {
    if (empty()) return 0;
    CMatrix<Real> gram = vectors.adjoint() * vectors;
    gram -= CMatrix<Real>::Identity(size(), size());
    return gram.cwiseAbs().maxCoeff();
  }

  static SubspaceBasis from_columns(const CMatrix<Real>& columns, Real tol = 0) {
    SubspaceBasis out;
    out.ambient_dim = columns.rows();
    out.tol = tol;
    if (columns.cols() == 0) {
      out.vectors.resize(columns.rows(), 0);
      return out;
    }
    // Orthonormalize; dependent columns are dropped.
    Eigen::ColPivHouseholderQR<CMatrix<Real>> qr(columns);
    qr.setThreshold(Real(1e-12));
    const auto rank = qr.rank();
    CMatrix<Real> q = qr.householderQ() *
                      CMatrix<Real>::Identity(columns.rows(), rank);
    out.vectors = std::move(q);
    return out;
  }
};

template <typename Derived>
auto max_asymmetry(const Eigen::MatrixBase<Derived>& h) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (h.rows() != h.cols()) {
    throw DimensionMismatch("matrix is not square");
  }
  if (h.size() == 0) return Real(0);
  return Real((h - h.adjoint()).cwiseAbs().maxCoeff());
}

/// (H + H^dagger)/2, or NotHermitianError when the asymmetry exceeds tol.
template <typename Derived>
auto hermitize(const Eigen::MatrixBase<Derived>& h, double tol = kHermitianTol) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const Real asym = max_asymmetry(h);
  if (asym > Real(tol)) throw NotHermitianError(double(asym));
  CMatrix<Real> out = h.template cast<std::complex<Real>>();
  CMatrix<Real> adj = out.adjoint();
  out = (out + adj) * Real(0.5);
  return out;
}

template <typename Real>
struct EigenDecomposition {
  RVector<Real> values;   // ascending
  CMatrix<Real> vectors;  // columns are eigenvectors

  Real min() const { return values.size() ? values(0) : Real(0); }
  Real max() const { return values.size() ? values(values.size() - 1) : Real(0); }

  CMatrix<Real> reconstruct() const {
    return vectors * values.template cast<std::complex<Real>>().asDiagonal() *
           vectors.adjoint();
  }
};

template <typename Derived>
auto eigh(const Eigen::MatrixBase<Derived>& h, double tol = kHermitianTol) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const CMatrix<Real> sym = hermitize(h, tol);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Hermitian eigensolver did not converge");
  }
  return EigenDecomposition<Real>{solver.eigenvalues(), solver.eigenvectors()};
}

/// Kernel and support of a PSD matrix, split at rel_tol * lambda_max.
template <typename Real>
struct KernelSplit {
  SubspaceBasis<Real> kernel;
  SubspaceBasis<Real> support;
  RVector<Real> eigenvalues;
};

template <typename Derived>
auto kernel_split(
    const Eigen::MatrixBase<Derived>& h, double rel_tol = kRankRelTol) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const auto dec = eigh(h);
  const Eigen::Index n = dec.values.size();
  if (n > 0 && dec.min() < Real(kPsdErrorFloor)) {
    throw NotPsdError(double(dec.min()));
  }
  const Real threshold =
      Real(rel_tol) * std::max(dec.max(), Real(1e-300));
  Eigen::Index k = 0;
  while (k < n && dec.values(k) <= threshold) ++k;

  KernelSplit<Real> out;
  out.eigenvalues = dec.values;
  out.kernel.ambient_dim = n;
  out.kernel.tol = Real(rel_tol);
  out.kernel.vectors = dec.vectors.leftCols(k);
  out.support.ambient_dim = n;
  out.support.tol = Real(rel_tol);
  out.support.vectors = dec.vectors.rightCols(n - k);
  return out;
}

template <typename Derived>
auto kernel_basis(
    const Eigen::MatrixBase<Derived>& h, double rel_tol = kRankRelTol) {
  return kernel_split(h, rel_tol).kernel;
}

template <typename Derived>
auto support_basis(
    const Eigen::MatrixBase<Derived>& h, double rel_tol = kRankRelTol) {
  return kernel_split(h, rel_tol).support;
}

template <typename Derived>
Eigen::Index rank_of(
    const Eigen::MatrixBase<Derived>& h, double rel_tol = kRankRelTol) {
  return h.rows() - kernel_basis(h, rel_tol).size();
}

template <typename Real>
struct Containment {
  bool contained = true;
  Real max_leak = 0;
  /// Unit vector of span(A) with the largest component outside span(B).
  /// Empty when A is the zero subspace.
  CVector<Real> worst_vector;
};

/// Whether span(a) lies inside span(b).  The leak is the largest singular
/// value of (I - P_b) A, i.e. the worst case over all unit vectors of span(a).
template <typename Real>
Containment<Real> subspace_contained(
    const SubspaceBasis<Real>& a, const SubspaceBasis<Real>& b, double tol) {
  if (a.ambient_dim != b.ambient_dim) {
    throw DimensionMismatch(
        "subspace ambient dimensions differ: " + std::to_string(a.ambient_dim) +
        " vs " + std::to_string(b.ambient_dim));
  }
  Containment<Real> out;
  if (a.empty()) return out;

  CMatrix<Real> outside = a.vectors;
  if (!b.empty()) outside -= b.vectors * (b.vectors.adjoint() * a.vectors);

  Eigen::JacobiSVD<CMatrix<Real>> svd(outside, Eigen::ComputeFullV);
  out.max_leak = svd.singularValues()(0);
  out.worst_vector = a.vectors * svd.matrixV().col(0);
  out.contained = out.max_leak <= Real(tol);
  return out;
}

template <typename Real>
SubspaceBasis<Real> orthogonal_complement(const SubspaceBasis<Real>& s) {
  const Eigen::Index n = s.ambient_dim;
  CMatrix<Real> p = CMatrix<Real>::Identity(n, n) - s.projector();
  auto split = kernel_split(p, 1e-8);
  split.support.tol = s.tol;
  return split.support;
}

}  // namespace linops
}  // namespace qmarkov
