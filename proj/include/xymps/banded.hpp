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

#ifndef XYMPS_BANDED_HPP
#define XYMPS_BANDED_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "xymps/errors.hpp"

namespace xymps::banded {

using SparseReal = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Cholesky factorization of a symmetric positive-definite band matrix,
/// wrapping the LAPACK packed-band routines.
class BandCholesky {
  public:
    BandCholesky(const SparseReal& a, double diagonal_shift);
    void solve_in_place(Vector& x) const;
    Eigen::Index dim() const { return n_; }

  private:
    Eigen::Index n_ = 0;
    int kd_ = 0;
    std::vector<double> band_; // LAPACK upper band storage, column-major
};

/// Rational approximation of s^{-1/2} on [lo, hi] as sum_j w_j (s + t_j^2)^{-1},
/// from the integral representation with a log-substituted trapezoid rule.
struct InverseSqrtQuadrature {
    std::vector<double> nodes;   // t_j
    std::vector<double> weights; // w_j
    /// Relative accuracy ~1e-12 for spectra inside [lo, hi].
    static InverseSqrtQuadrature build(double lo, double hi);
};

/// Applies f(S)v for S = A^T A with A sparse banded (S never formed densely
/// beyond its band) and f the inverse square root, via the quadrature above.
class InverseSqrtOperator {
  public:
    /// spectrum bounds refer to eigenvalues of S.
    InverseSqrtOperator(const SparseReal& s, double spec_lo, double spec_hi);
    Vector apply(const Vector& v) const;
    Eigen::Index dim() const { return facts_.empty() ? 0 : facts_.front().dim(); }

  private:
    InverseSqrtQuadrature quad_;
    std::vector<BandCholesky> facts_;
};

using MatVec = std::function<void(const Vector&, Vector&)>;

struct LanczosResult {
    Vector values;                  // converged extremal eigenvalues (descending)
    Eigen::MatrixXd vectors;        // matching eigenvectors, one per column
};

/// Largest eigenpairs of a symmetric operator by Lanczos with full
/// reorthogonalization.  Stops once `count` pairs have residual below tol.
LanczosResult lanczos_largest(const MatVec& op, Eigen::Index dim, int count,
                              double tol = 1e-12, int max_iter = 600, unsigned seed = 12345);

} // namespace xymps::banded

#endif
