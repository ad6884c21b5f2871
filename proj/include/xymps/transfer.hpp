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

#ifndef XYMPS_TRANSFER_HPP
#define XYMPS_TRANSFER_HPP

#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "xymps/banded.hpp"
#include "xymps/majorana.hpp"
#include "xymps/model.hpp"

namespace xymps::transfer {

using majorana::Complex;
using majorana::Matrix;
using majorana::RealMatrix;
using majorana::Vector;

enum class Flavor { plain, sigma_z };

/// Column transfer operator of the exact MPS: a chain of 2*half_length
/// auxiliary spins (ket half reversed, then bra half), 4*half_length Majoranas.
struct TransferSpec {
    int half_length = 1; ///< sites per half; the chain has 2*half_length sites
    model::ModelPoint point;
    Flavor flavor = Flavor::plain;

    int chain_sites() const { return 2 * half_length; }
    int majorana_dim() const { return 4 * half_length; }
};

/// Dense transformation matrix R[W1^1/2] R[W2] R[W1^1/2] (plain flavor), with
/// the extra u(-4 K1) factor on the interface pair for the sigma_z flavor.
majorana::TransformationMatrix build_r(const TransferSpec& spec);

/// Same operator as a sparse band matrix (bandwidth <= 5).
Eigen::SparseMatrix<Complex> build_r_sparse(const TransferSpec& spec);

struct ModeSpectrum {
    Vector energies;     ///< ascending
    RealMatrix rotation; ///< canonical Majorana pairs (empty on energy-only paths)
};

/// Pure Gaussian state given by its Majorana covariance <c_m c_n> = 1 + i B.
struct GaussianState {
    RealMatrix covariance; ///< B, real skew, B*B = -1
    Vector energies;       ///< single-particle energies it is the vacuum of
};

/// Full dense diagonalization; feasible up to a few thousand chain sites.
std::pair<ModeSpectrum, GaussianState> diagonalize(const TransferSpec& spec);

/// The `count` lowest single-particle energies by shift-inverted Lanczos on
/// the banded skew generator; memory O(chain), no dense matrices.
Vector lowest_energies(const TransferSpec& spec, int count);

/// Lowest `count` canonical mode pairs (energies and rotation columns).
ModeSpectrum lowest_modes(const TransferSpec& spec, int count);

/// Maximum single-particle energy 2 (K2bar + K1); band top.
double energy_top(const model::ModelPoint& point);

/// OBC momentum grid k_j = (2j-1) pi / (2 M), j = 1..M, M = chain sites.
std::vector<double> obc_momentum_grid(int half_length);

/// Dispersion sampled on the OBC grid (first n_momenta values, ascending).
Vector band_energies(const TransferSpec& spec, int n_momenta);

/// Helper for large chains: dense block B(rows, cols) of the vacuum
/// covariance computed from the banded generator by quadrature, without
/// diagonalizing anything.  Ranges are [begin, end).
RealMatrix covariance_block(const TransferSpec& spec, Eigen::Index row_begin,
                            Eigen::Index row_end, Eigen::Index col_begin, Eigen::Index col_end);

} // namespace xymps::transfer

#endif
