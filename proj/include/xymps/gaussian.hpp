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

#ifndef XYMPS_GAUSSIAN_HPP
#define XYMPS_GAUSSIAN_HPP

#include <vector>

#include "xymps/majorana.hpp"

namespace xymps::gaussian {

using majorana::Complex;
using majorana::Matrix;
using majorana::RealMatrix;

/// Expectation of an ordered product of Majorana-linear operators in a
/// Gaussian state, by Wick's theorem: the Pfaffian of the ordered pairwise
/// contraction matrix.  Contractions are supplied by the caller; entries may
/// be overridden for same-pair constants (exponential insertions expanded as
/// c + quadratic).
class WickProduct {
  public:
    explicit WickProduct(Eigen::Index n_ops) : a_(Matrix::Zero(n_ops, n_ops)) {}

    /// contraction <M_i M_j> for i < j
    void set(Eigen::Index i, Eigen::Index j, Complex value) {
        a_(i, j) = value;
        a_(j, i) = -value;
    }
    void add(Eigen::Index i, Eigen::Index j, Complex value) {
        a_(i, j) += value;
        a_(j, i) -= value;
    }

    Complex evaluate() const {
        Matrix copy = a_;
        return majorana::pfaffian_unchecked(copy);
    }

  private:
    Matrix a_;
};

/// Thermal two-point matrix of a Gaussian operator from its transformation
/// matrix: Tr(T c_m c_n) / Tr(T) = [2 (1 + R)^{-1}]_{mn}.
Matrix thermal_two_point(const Matrix& r);

} // namespace xymps::gaussian

#endif
