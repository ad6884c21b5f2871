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

#ifndef XYMPS_MODEL_HPP
#define XYMPS_MODEL_HPP

#include "xymps/errors.hpp"

namespace xymps::model {

/// XY-chain parameters together with the classical couplings of the
/// row-to-row operator sharing its ground state, and their duals.
struct ModelPoint {
    double g = 0.0;     ///< transverse field
    double gamma = 0.0; ///< anisotropy
    double k1 = 0.0;    ///< classical coupling K1 > 0
    double k2 = 0.0;    ///< classical coupling K2 > 0
    double k1bar = 0.0; ///< dual of k1
    double k2bar = 0.0; ///< dual of k2

    /// Transfer-matrix band minimum 2|K2bar - K1| (zero at criticality).
    double gap() const;
    bool is_critical(double tol = 1e-12) const;
    /// True in the ferromagnetic part of the mapping region (g < 1).
    bool is_ferromagnetic() const { return g < 1.0; }
};

/// Dual coupling -(1/2) ln tanh k; an involution on (0, inf).
double dual_coupling(double k);

/// Invert the quantum-classical map: k1bar = arccosh(1/gamma)/2 in closed
/// form, then k2 from the field.  Valid for 0 < gamma < 1, gamma^2 + g^2 > 1,
/// g > 0; throws OutOfMappingRegion otherwise.
ModelPoint couplings_from_xy(double g, double gamma);

/// Transfer-matrix dispersion: cosh eps = cosh 2K2b cosh 2K1 - cos k sinh 2K2b sinh 2K1.
double dispersion_tf(double k, const ModelPoint& point);

/// Dispersion of the row-to-row operator (K1 <-> K2 exchanged roles).
double dispersion_v(double k, const ModelPoint& point);

/// Quadratic coefficient of the gapped band minimum, eps ~ gap + a_p k^2.
double band_curvature(const ModelPoint& point);
/// Linear coefficient of the critical band, eps ~ a_c |k| (sinh 2K1).
double band_slope_critical(const ModelPoint& point);

/// Momentum in [0, pi] with dispersion_tf(k) = eps.  The cos k argument is
/// clamped when within 1e-9 of the band edge; outside that, OutsideBand.
double invert_dispersion_tf(double eps, const ModelPoint& point);

/// tan(2 theta_k) of the Bogolyubov angle from the classical couplings.
double bogolyubov_tan2theta_v(double k, const ModelPoint& point);
/// Same angle from the XY parameters; the two agree on the mapping region.
double bogolyubov_tan2theta_xy(double k, const ModelPoint& point);

} // namespace xymps::model

#endif
