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

#include "xymps/model.hpp"

#include <cmath>

namespace xymps::model {

double ModelPoint::gap() const { return 2.0 * std::abs(k2bar - k1); }

bool ModelPoint::is_critical(double tol) const { return std::abs(k2bar - k1) < tol; }

double dual_coupling(double k) {
    if (!(k > 0.0))
        throw domain_error("DomainError", "dual_coupling requires k > 0");
    return -0.5 * std::log(std::tanh(k));
}

ModelPoint couplings_from_xy(double g, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0 && g > 0.0 && gamma * gamma + g * g > 1.0))
        throw domain_error("OutOfMappingRegion",
                           "need 0 < gamma < 1, g > 0 and gamma^2 + g^2 > 1");
    ModelPoint p;
    p.g = g;
    p.gamma = gamma;
    p.k1bar = 0.5 * std::acosh(1.0 / gamma);
    const double t = std::tanh(2.0 * p.k1bar) / g;
    // t < 1 is exactly the mapping condition gamma^2 + g^2 > 1
    p.k2 = 0.5 * std::atanh(t);
    p.k1 = dual_coupling(p.k1bar);
    p.k2bar = dual_coupling(p.k2);
    return p;
}

double dispersion_tf(double k, const ModelPoint& p) {
    const double c = std::cosh(2.0 * p.k2bar) * std::cosh(2.0 * p.k1) -
                     std::cos(k) * std::sinh(2.0 * p.k2bar) * std::sinh(2.0 * p.k1);
    return std::acosh(std::max(1.0, c));
}

double dispersion_v(double k, const ModelPoint& p) {
    const double c = std::cosh(2.0 * p.k1bar) * std::cosh(2.0 * p.k2) -
                     std::cos(k) * std::sinh(2.0 * p.k1bar) * std::sinh(2.0 * p.k2);
    return std::acosh(std::max(1.0, c));
}

double band_curvature(const ModelPoint& p) {
    const double d = p.gap();
    if (d <= 0.0)
        throw domain_error("NotGapped", "band curvature is defined for gapped points");
    return std::sinh(2.0 * p.k2bar) * std::sinh(2.0 * p.k1) / (2.0 * std::sinh(d));
}

double band_slope_critical(const ModelPoint& p) { return std::sinh(2.0 * p.k1); }

double invert_dispersion_tf(double eps, const ModelPoint& p) {
    constexpr double edge_tol = 1e-9;
    if (eps < 0.0)
        throw domain_error("OutsideBand", "energy must be non-negative");
    const double a = std::cosh(2.0 * p.k2bar) * std::cosh(2.0 * p.k1);
    const double b = std::sinh(2.0 * p.k2bar) * std::sinh(2.0 * p.k1);
    double cosk = (a - std::cosh(eps)) / b;
    if (cosk > 1.0 + edge_tol || cosk < -1.0 - edge_tol)
        throw domain_error("OutsideBand", "energy outside the single-particle band");
    cosk = std::clamp(cosk, -1.0, 1.0);
    return std::acos(cosk);
}

double bogolyubov_tan2theta_v(double k, const ModelPoint& p) {
    const double num = std::sin(k) * std::sinh(2.0 * p.k2);
    const double den = std::sinh(2.0 * p.k1bar) * std::cosh(2.0 * p.k2) -
                       std::cos(k) * std::cosh(2.0 * p.k1bar) * std::sinh(2.0 * p.k2);
    return num / den;
}

double bogolyubov_tan2theta_xy(double k, const ModelPoint& p) {
    return p.gamma * std::sin(k) / (p.g - std::cos(k));
}

} // namespace xymps::model
