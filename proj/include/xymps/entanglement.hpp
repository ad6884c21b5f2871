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

#ifndef XYMPS_ENTANGLEMENT_HPP
#define XYMPS_ENTANGLEMENT_HPP

#include <cstdint>
#include <vector>

#include "xymps/majorana.hpp"
#include "xymps/transfer.hpp"

namespace xymps::entanglement {

using majorana::RealMatrix;
using majorana::Vector;

/// Half-chain entanglement data: single-particle entanglement energies and
/// the rotation defining the mode basis on each half.
struct EntanglementSpectrum {
    Vector deltas;            ///< ascending, capped at kDeltaCap
    Vector tanh_deltas;       ///< canonical entries
    RealMatrix rotation;      ///< first-half mode pairs (columns)
    RealMatrix rotation_back; ///< second-half mode pairs
};

/// Diagonalize the covariance restricted to the first half; also returns the
/// complementary half's rotation.  `state` covers 4*half_length Majoranas.
EntanglementSpectrum half_chain_spectrum(const transfer::GaussianState& state, int half_length);

/// Large-chain route: the same spectrum without ever holding the full-chain
/// covariance; only the two half blocks are assembled (by quadrature).
EntanglementSpectrum half_chain_spectrum_banded(const transfer::TransferSpec& spec);

struct SchmidtSet {
    std::vector<double> values;         ///< descending, normalized over kept modes
    std::vector<std::uint64_t> labels;  ///< occupation bitmask over kept modes
};

/// Enumerate Schmidt values lambda >= floor * lambda_max over the first
/// `keep_modes` entanglement modes (all of them if keep_modes < 0).
/// Normalization uses the full product form over the kept modes.
SchmidtSet schmidt_values(const EntanglementSpectrum& spec, int keep_modes, double floor,
                          std::size_t budget = std::size_t(1) << 20);

/// Index bookkeeping for the arithmetic-progression spectrum: the rank, in
/// the descending untruncated Schmidt list, of the largest value missed by a
/// chi-mode truncation, minus one.  Pure combinatorics of distinct odd parts.
long d_chi(int chi);

/// Entanglement entropy from the single-particle form.
double entropy(const EntanglementSpectrum& spec);

} // namespace xymps::entanglement

#endif
