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

#ifndef XYMPS_CORRELATIONS_HPP
#define XYMPS_CORRELATIONS_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "xymps/model.hpp"
#include "xymps/truncation.hpp"

namespace xymps::correlations {

using majorana::Vector;

enum class OpPair { xx, yy, zz };
enum class Band { one_particle, two_particle, three_with_zero_mode };

/// Squared matrix elements of the localized operator insertions between the
/// dominant transfer eigenvector(s) and band excitations, at finite chain.
/// Weights are real; negative values occur for the critical yy band.
struct FormFactorTable {
    OpPair op_pair = OpPair::zz;
    Band band = Band::two_particle;
    int half_length = 0;
    int degeneracy = 1; ///< dominant eigenvectors averaged over

    /// participating mode indices, 1-based ascending-energy, 0 = unused slot
    std::vector<std::array<int, 3>> labels;
    std::vector<double> weights;
    std::vector<double> energies; ///< E_alpha = sum of mode energies
    Vector mode_energies;         ///< energies of the modes the labels refer to
    Vector mode_momenta;          ///< matching momenta (0 for a boundary zero mode)
};

/// Evaluate the table by Pfaffian contractions on the vacuum state.
/// n_take < 0 picks all modes for two-particle zz and a default window of
/// low-lying modes for the string-operator bands.
FormFactorTable exact_form_factors(const model::ModelPoint& point, int half_length, OpPair op,
                                   Band band, int n_take = -1);

struct CorrelationCurve {
    std::vector<double> distances;
    std::vector<double> values;
    std::string method;
};

/// Band sum C(R) = sum_alpha f_alpha exp(-E_alpha R); exact for zz (the
/// insertion is quadratic), truncated to the listed band otherwise.
CorrelationCurve correlation_curve(const FormFactorTable& table, const std::vector<double>& rs);

struct Asymptotics {
    double prefactor = 0.0; ///< meaningful only when prefactor_known
    double power = 0.0;     ///< R^{-power}
    double rate = 0.0;      ///< exp(-rate * R)
    bool prefactor_known = false;
};

/// Closed forms C ~ A R^-p e^{-rR} where available; throws NotCovered for the
/// critical xx/yy pair (multi-band).
Asymptotics closed_form_asymptotics(const model::ModelPoint& point, OpPair op);

/// <s^x_0 (prod s^z) s^x_R>-type correlator evaluated through the dressed
/// transfer operator; in the ferromagnetic phase it decays at the full
/// single-particle rate rather than twice of it.
CorrelationCurve string_corrected_correlation(const model::ModelPoint& point, int half_length,
                                              OpPair op, const std::vector<double>& rs);

/// Two-particle form factors of the truncated transfer operator (zz),
/// normalized by matching the magnetization to the exact finite-chain value.
struct TruncatedFormFactors {
    int chi = 0;
    Vector energies; ///< 2 chi truncated energies, ascending
    std::vector<std::array<int, 2>> labels; ///< (m1, m2), 1-based, m1 < m2
    std::vector<double> values;
    double magnetization_exact = 0.0;
};

TruncatedFormFactors truncated_form_factors(const truncation::TruncatedTransfer& tt,
                                            const model::ModelPoint& point, int half_length);

/// Window-renormalized form factors: sums of exact two-particle weights,
/// Boltzmann-dressed, over momentum windows around each truncated momentum.
TruncatedFormFactors renormalized_form_factors(const FormFactorTable& exact,
                                               const truncation::MomentaFit& fit,
                                               const Vector& truncated_energies);

/// Magnetization of the dominant eigenvector at finite chain.
double magnetization(const model::ModelPoint& point, int half_length);

} // namespace xymps::correlations

#endif
