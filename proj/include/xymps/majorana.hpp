/*
 * Copyright 2025-2026 The xymps authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef XYMPS_MAJORANA_HPP
#define XYMPS_MAJORANA_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "xymps/errors.hpp"

namespace xymps::majorana {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Entanglement energies above this are treated as saturated (tanh underflows
/// double precision well before e^{-2*19} matters for any Schmidt value).
inline constexpr double kDeltaCap = 19.0;

/// Hyperbolic 2x2 block [[cosh x, i sinh x], [-i sinh x, cosh x]].
/// The adjoint action of exp[(x/2) i c1 c2] on the Majorana pair (c1, c2).
Eigen::Matrix2cd u_block(double x);

/// Matrix of the adjoint action of a Gaussian operator on Majorana modes,
/// T c T^{-1} = c R[T] with c a row vector of 2n Majoranas.
struct TransformationMatrix {
    Matrix entries;

    TransformationMatrix() = default;
    explicit TransformationMatrix(Matrix m) : entries(std::move(m)) {}
    static TransformationMatrix identity(Eigen::Index dim);

    Eigen::Index dim() const { return entries.rows(); }

    double orthogonality_defect() const; ///< ||R R^T - 1|| / ||R||
    double hermiticity_defect() const;   ///< ||R - R^dag|| / ||R||
};

/// Ordinary matrix product of transformation matrices (left to right).
TransformationMatrix compose(const std::vector<TransformationMatrix>& factors);

/// R = U (sum_n u(eps_n)) U^T with U in SO(dim) and eps ascending.
struct CanonicalDecomposition {
    Vector energies;     ///< dim/2 values, ascending, >= 0
    RealMatrix rotation; ///< columns hold the canonical Majorana pairs
};

/// Canonical form of a Hermitian complex-orthogonal matrix.  Splits R = X + iY,
/// pairs the skew part's eigenvectors, and resolves (near-)zero modes on the
/// kernel of Y where any orthonormal real pairing reconstructs R.
CanonicalDecomposition canonical_form(const TransformationMatrix& r);

/// B = U (sum_n [[0, -tanh d_n], [tanh d_n, 0]]) U^T, deltas ascending.
struct SkewCanonical {
    Vector deltas;       ///< arctanh of the canonical entries, capped at kDeltaCap
    Vector tanh_deltas;  ///< raw canonical entries in [0, 1]
    RealMatrix rotation;
};

SkewCanonical skew_canonical(const RealMatrix& b);

namespace detail {
template <typename Scalar>
Scalar pfaffian_impl(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a);
} // namespace detail

/// Pfaffian by Parlett-Reid tridiagonalization with partial pivoting.
/// Throws on odd dimension or if the input is not skew-symmetric within
/// 1e-10 relative.
template <typename Derived>
typename Derived::Scalar pfaffian(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a = m;
    const double scale = std::max(1.0, a.norm());
    if ((a + a.transpose()).norm() > 1e-10 * scale)
        throw numeric_error("NotSkew", "pfaffian requires a skew-symmetric matrix");
    return detail::pfaffian_impl<Scalar>(a);
}

/// Pfaffian of a matrix already known to be skew; no symmetry check, in place.
Complex pfaffian_unchecked(Matrix& m);

} // namespace xymps::majorana

#endif
