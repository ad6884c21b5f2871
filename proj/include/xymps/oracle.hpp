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

#ifndef XYMPS_ORACLE_HPP
#define XYMPS_ORACLE_HPP

#include <vector>

#include <Eigen/Dense>

#include "xymps/model.hpp"
#include "xymps/transfer.hpp"

// Brute-force dense constructions at tiny sizes.  Everything here builds
// operators literally from spin matrices and Kronecker products; no code is
// shared with the free-fermion kernel beyond Eigen itself.

namespace xymps::oracle {

using DenseOp = Eigen::MatrixXcd;
using DenseVec = Eigen::VectorXcd;

/// Hard cap on dense dimensions; XYMPS_MAX_DIM in the environment lowers/raises it.
int max_dense_dim();

/// Row-to-row operator V = V1^1/2 V2 V1^1/2 on `sites` spins, periodic.
DenseOp dense_v(int sites, const model::ModelPoint& point);

/// The same operator contracted from its bond-dimension-2 MPO form.
DenseOp dense_v_mpo(int sites, const model::ModelPoint& point);

/// XY Hamiltonian on `sites` spins, periodic.
DenseOp dense_hxy(int sites, const model::ModelPoint& point);

/// Product of sigma_z over all sites.
DenseOp parity_operator(int sites);

/// Column transfer operator from the MPS tensors, on 2^(2 half_length) states.
/// Chain positions run ket half reversed then bra half, matching the
/// free-fermion indexing.
DenseOp dense_transfer(int half_length, const model::ModelPoint& point,
                       transfer::Flavor flavor = transfer::Flavor::plain);

/// Majorana operators along the transfer chain (position-ordered JW strings).
std::vector<DenseOp> dense_majoranas(int half_length);

/// Covariance <phi| c_m c_n |phi> - delta_mn, imaginary part (real skew B).
Eigen::MatrixXd dense_covariance(const DenseVec& phi, int half_length);

/// Reduced density matrix of the ket half (chain positions 0..L-1).
DenseOp dense_rdm_half(const DenseVec& phi, int half_length);

struct DenseTruncation {
    DenseOp transfer;         ///< projected transfer operator, 4^chi
    DenseOp transfer_sigma_z; ///< same projection of the sigma_z flavor
};

/// Explicit projection onto the kept fermionic modes of the half-chain
/// density matrix, built entirely from dense operators.
DenseTruncation dense_truncate(int half_length, int chi, const model::ModelPoint& point);

/// sorted eigenvalues (descending) of a Hermitian dense operator
Eigen::VectorXd dense_spectrum(const DenseOp& op);

/// dominant eigenvector of a Hermitian dense operator
DenseVec dominant_eigenvector(const DenseOp& op);

} // namespace xymps::oracle

#endif
