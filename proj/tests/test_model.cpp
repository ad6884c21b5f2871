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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "xymps/model.hpp"

using namespace xymps;
using namespace xymps::model;

TEST_CASE("dual coupling involution and fixed point") {
    CHECK(dual_coupling(dual_coupling(0.7)) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(dual_coupling(dual_coupling(0.3)) == doctest::Approx(0.3).epsilon(1e-12));
    // self-dual point solves tanh k = exp(-2k); k* = ln(1 + sqrt(2)) / 2
    const double kstar = 0.5 * std::log(1.0 + std::sqrt(2.0));
    CHECK(dual_coupling(kstar) == doctest::Approx(kstar).epsilon(1e-14));
    // monotone decreasing, divergent at 0+
    CHECK(dual_coupling(1e-8) > 8.0);
    CHECK_THROWS_AS(dual_coupling(0.0), Error);
    CHECK_THROWS_AS(dual_coupling(-1.0), Error);
}

TEST_CASE("couplings_from_xy at criticality") {
    auto p = couplings_from_xy(1.0, 0.5);
    CHECK(p.k1 == doctest::Approx(p.k2bar).epsilon(1e-13)); // criticality: K1 = K2bar
    CHECK(p.is_critical(1e-12));
    CHECK(band_slope_critical(p) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("couplings_from_xy reproduces the map and the quoted gap") {
    auto p = couplings_from_xy(1.01, 0.8);
    CHECK(std::tanh(2 * p.k1bar) / std::tanh(2 * p.k2) == doctest::Approx(1.01).epsilon(1e-12));
    CHECK(1.0 / std::cosh(2 * p.k1bar) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(p.gap() == doctest::Approx(0.0124035).epsilon(1e-4)); // 2|K2bar - K1|, abs 1e-6
    CHECK(std::abs(p.gap() - 0.0124035) < 1e-6);
}

TEST_CASE("mapping region boundaries rejected") {
    CHECK_THROWS_AS(couplings_from_xy(0.5, 0.5), Error);  // gamma^2 + g^2 < 1
    CHECK_THROWS_AS(couplings_from_xy(1.5, 1.0), Error);  // gamma = 1
    CHECK_THROWS_AS(couplings_from_xy(1.5, 0.0), Error);
    CHECK_THROWS_AS(couplings_from_xy(-1.5, 0.5), Error); // g < 0 half-plane not covered
}

TEST_CASE("dispersion endpoints") {
    auto p = couplings_from_xy(1.01, 0.8);
    CHECK(dispersion_tf(0.0, p) == doctest::Approx(p.gap()).epsilon(1e-12));
    CHECK(dispersion_tf(M_PI, p) == doctest::Approx(2 * (p.k2bar + p.k1)).epsilon(1e-12));
    // even and monotone on [0, pi]
    CHECK(dispersion_tf(-0.4, p) == doctest::Approx(dispersion_tf(0.4, p)).epsilon(1e-13));
    double last = dispersion_tf(0.0, p);
    for (int i = 1; i <= 32; ++i) {
        double e = dispersion_tf(i * M_PI / 32, p);
        CHECK(e >= last);
        last = e;
    }
}

TEST_CASE("critical dispersion is linear near zero") {
    auto p = couplings_from_xy(1.0, 0.5);
    const double ac = band_slope_critical(p);
    CHECK(dispersion_tf(1e-4, p) == doctest::Approx(ac * 1e-4).epsilon(1e-6));
}

TEST_CASE("invert_dispersion round trip and band errors") {
    auto p = couplings_from_xy(1.01, 0.8);
    CHECK(invert_dispersion_tf(p.gap(), p) == doctest::Approx(0.0));
    const double k = 0.3;
    CHECK(invert_dispersion_tf(dispersion_tf(k, p), p) == doctest::Approx(k).epsilon(1e-10));
    CHECK_THROWS_AS(invert_dispersion_tf(0.5 * p.gap(), p), Error);
    CHECK_THROWS_AS(invert_dispersion_tf(10.0, p), Error);
}

TEST_CASE("bogolyubov angles agree between both routes") {
    for (auto [g, gamma] : {std::pair{1.01, 0.8}, {1.1, 0.5}, {0.8, 0.8}}) {
        auto p = couplings_from_xy(g, gamma);
        for (int i = 1; i < 100; ++i) {
            const double k = i * M_PI / 100.0;
            const double a = bogolyubov_tan2theta_v(k, p);
            const double b = bogolyubov_tan2theta_xy(k, p);
            CHECK(a == doctest::Approx(b).epsilon(1e-10));
        }
    }
}
