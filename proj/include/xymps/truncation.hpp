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

#ifndef XYMPS_TRUNCATION_HPP
#define XYMPS_TRUNCATION_HPP

#include <optional>
#include <vector>

#include "xymps/entanglement.hpp"
#include "xymps/majorana.hpp"
#include "xymps/transfer.hpp"

namespace xymps::truncation {

using majorana::Complex;
using majorana::Matrix;
using majorana::RealMatrix;
using majorana::Vector;

/// Transfer operator restricted to the chi most entangled modes per half,
/// obtained from the Schur complement over the discarded annihilators.
struct TruncatedTransfer {
    int chi = 0;
    Matrix r_tilde;                        ///< 4chi x 4chi, Dirac-ordered (f, fdag per mode)
    std::optional<Matrix> r_tilde_sigma_z; ///< same projection of the sigma_z flavor
    Vector energies;                       ///< 2chi single-particle energies, ascending
    RealMatrix mode_rotation;              ///< canonical pairs of the Majorana form
};

/// Dense route; needs the full-chain diagonalization (moderate chains).
TruncatedTransfer truncate(const transfer::TransferSpec& spec,
                           const entanglement::EntanglementSpectrum& ent, int chi,
                           bool with_sigma_z = false);

/// Entanglement modes of one half with explicit pairs for every mode whose
/// tanh delta is resolvable at double precision; the orthogonal complement of
/// the resolved pairs is saturated (the covariance acts on it as an exact
/// complex structure), which is all the truncation needs.
struct ResolvedHalfModes {
    Vector deltas;      ///< ascending over resolved modes
    Vector tanh_deltas;
    RealMatrix pairs;   ///< half_dim x (2 n_resolved)
    RealMatrix b_half;  ///< dense covariance block of the half
};

ResolvedHalfModes resolved_half_modes(const transfer::TransferSpec& spec, int half);

/// Large-chain route: banded generator, dense half covariances, and an
/// iterative Schur complement that never builds the full mode basis.
TruncatedTransfer truncate_large(const transfer::TransferSpec& spec, int chi,
                                 bool with_sigma_z = false);

/// Dispatch between the two routes on chain size.
TruncatedTransfer truncate_auto(const transfer::TransferSpec& spec, int chi,
                                bool with_sigma_z = false);

struct GapScalingFit {
    std::vector<int> chis;
    Vector eps1;      ///< truncated gap per chi
    Vector rel_error; ///< (eps1 - gap)/gap
    double p2 = 0.0;  ///< fitted decay power (positive)
    double p1 = 0.0;  ///< fitted prefactor
    double intercept = 0.0; ///< log p1
    double residual = 0.0;  ///< rms of the log-log fit
    int half_length = 0;
};

/// Log-log fit of the truncated-gap error over a chi sweep.  half_length < 0
/// picks a chain long enough that the finite-chain gap shift stays well below
/// the smallest truncation error in the sweep.
GapScalingFit gap_scaling(const model::ModelPoint& point, const std::vector<int>& chis,
                          int half_length = -1);

struct MomentaFit {
    Vector momenta;          ///< k_m, one per truncated energy (ascending)
    double lambda = 0.0;     ///< exp(slope) of log k_m vs m
    double log_lambda = 0.0;
    double intercept = 0.0;
    double residual = 0.0;   ///< rms residual of the fit in log space
    int skip = 3;
};

/// Momenta selected by the truncation, via the inverse dispersion, with a
/// log-linear fit over all but the first `skip` modes.
MomentaFit effective_momenta(const TruncatedTransfer& tt, const model::ModelPoint& point,
                             int skip = 3);

} // namespace xymps::truncation

#endif
