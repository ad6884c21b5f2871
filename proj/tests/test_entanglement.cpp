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

#include "xymps/entanglement.hpp"
#include "xymps/oracle.hpp"

using namespace xymps;
using namespace xymps::entanglement;

TEST_CASE("near-product state has a saturated spectrum") {
    model::ModelPoint p;
    p.k1 = 1e-9;
    p.k2bar = 0.5;
    p.k1bar = model::dual_coupling(p.k1);
    p.k2 = model::dual_coupling(p.k2bar);
    auto [modes, state] = transfer::diagonalize({4, p, transfer::Flavor::plain});
    auto ent = half_chain_spectrum(state, 4);
    for (int m = 0; m < ent.deltas.size(); ++m)
        CHECK(ent.deltas[m] == doctest::Approx(majorana::kDeltaCap));
}

TEST_CASE("schmidt values match the dense reduced density matrix at L=3") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    const int l = 3;
    auto [modes, state] = transfer::diagonalize({l, p, transfer::Flavor::plain});
    auto ent = half_chain_spectrum(state, l);

    auto phi = oracle::dominant_eigenvector(oracle::dense_transfer(l, p));
    auto rho = oracle::dense_rdm_half(phi, l);
    auto dense = oracle::dense_spectrum(rho);

    auto schmidt = schmidt_values(ent, -1, 1e-300);
    REQUIRE(schmidt.values.size() == static_cast<std::size_t>(dense.size()));
    for (int i = 0; i < dense.size(); ++i)
        CHECK(schmidt.values[i] == doctest::Approx(dense[i]).epsilon(1e-7));
}

TEST_CASE("paramagnetic deltas form the odd arithmetic progression") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    const int l = 400; // chain 800
    auto [modes, state] = transfer::diagonalize({l, p, transfer::Flavor::plain});
    auto ent = half_chain_spectrum(state, l);
    for (int m = 0; m < 8; ++m) {
        const double ratio = ent.deltas[m] / ((2 * m + 1) * ent.deltas[0]);
        CHECK(std::abs(ratio - 1.0) < 0.02);
    }
    // both halves agree
    auto back = majorana::skew_canonical(
        state.covariance.bottomRightCorner(2 * l, 2 * l));
    for (int m = 0; m < 8; ++m)
        CHECK(back.deltas[m] == doctest::Approx(ent.deltas[m]).epsilon(1e-9));
}

TEST_CASE("banded spectrum route agrees with the dense one") {
    auto p = model::couplings_from_xy(1.05, 0.6);
    const int l = 40;
    transfer::TransferSpec spec{l, p, transfer::Flavor::plain};
    auto [modes, state] = transfer::diagonalize(spec);
    auto dense = half_chain_spectrum(state, l);
    auto bandd = half_chain_spectrum_banded(spec);
    for (int m = 0; m < 6; ++m)
        CHECK(bandd.deltas[m] == doctest::Approx(dense.deltas[m]).epsilon(1e-7));
}

TEST_CASE("schmidt enumeration: single mode and normalization") {
    EntanglementSpectrum ent;
    ent.deltas.resize(1);
    ent.deltas[0] = 0.8;
    ent.tanh_deltas.resize(1);
    ent.tanh_deltas[0] = std::tanh(0.8);
    auto s = schmidt_values(ent, -1, 1e-12);
    const double z = 1.0 + std::exp(-1.6);
    REQUIRE(s.values.size() == 2);
    CHECK(s.values[0] == doctest::Approx(1.0 / z));
    CHECK(s.values[1] == doctest::Approx(std::exp(-1.6) / z));

    // normalization over several modes
    EntanglementSpectrum e2;
    e2.deltas.resize(6);
    for (int m = 0; m < 6; ++m) e2.deltas[m] = 0.4 * (2 * m + 1);
    auto s2 = schmidt_values(e2, -1, 1e-14);
    double total = 0.0;
    for (double v : s2.values) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    // descending
    for (std::size_t i = 1; i < s2.values.size(); ++i) CHECK(s2.values[i] <= s2.values[i - 1]);
}

TEST_CASE("schmidt floor keeps the subset-product structure") {
    EntanglementSpectrum ent;
    ent.deltas.resize(10);
    for (int m = 0; m < 10; ++m) ent.deltas[m] = 0.7 * (2 * m + 1);
    auto full = schmidt_values(ent, -1, 1e-9);
    auto truncated = schmidt_values(ent, 4, 1e-9);
    // every truncated value appears in the full set up to the Z ratio
    double zf = 0.0, zt = 0.0;
    for (int m = 0; m < 10; ++m) zf += std::log1p(std::exp(-2 * ent.deltas[m]));
    for (int m = 0; m < 4; ++m) zt += std::log1p(std::exp(-2 * ent.deltas[m]));
    const double ratio = std::exp(zf - zt);
    for (std::size_t i = 0; i < truncated.values.size(); ++i) {
        bool found = false;
        for (std::size_t j = 0; j < full.values.size(); ++j)
            if (std::abs(full.values[j] * ratio / truncated.values[i] - 1.0) < 1e-9) found = true;
        CHECK(found);
    }
}

TEST_CASE("d_chi anchors and local slope") {
    CHECK(d_chi(0) == 1);
    CHECK(d_chi(10) == 63);
    const double slope = std::log(double(d_chi(10)) / d_chi(9)) / std::log(10.0 / 9.0);
    CHECK(slope == doctest::Approx(2.5).epsilon(0.08));
}

TEST_CASE("d_chi against brute-force enumeration") {
    // full list: subsets of odd numbers with weights <= some cap, sorted; the
    // chi-set keeps subsets of {1, 3, .., 2chi-1}; ties resolve with
    // reproduced values ahead of missing ones
    for (int chi = 0; chi <= 8; ++chi) {
        const int wcap = 2 * chi + 3;
        std::vector<std::pair<int, bool>> values; // (weight, reproduced-by-chi)
        const int nparts = wcap; // odd parts up to wcap
        std::vector<std::pair<int, int>> stack{{0, 1}};
        // enumerate subsets of odd numbers 1,3,5,... with sum <= wcap
        std::function<void(int, int, int)> rec = [&](int next_odd, int sum, int maxpart) {
            values.emplace_back(sum, maxpart <= 2 * chi - 1);
            for (int part = next_odd; part <= wcap - sum; part += 2)
                rec(part + 2, sum + part, std::max(maxpart, part));
        };
        rec(1, 0, 0);
        std::sort(values.begin(), values.end(), [](auto& a, auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return a.second > b.second; // reproduced first among ties
        });
        long rank = 0;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!values[i].second) {
                rank = static_cast<long>(i);
                break;
            }
        CHECK(d_chi(chi) == rank);
        (void)nparts;
        (void)stack;
    }
}

TEST_CASE("entropy matches the enumerated set") {
    EntanglementSpectrum ent;
    ent.deltas.resize(8);
    for (int m = 0; m < 8; ++m) ent.deltas[m] = 0.5 * (2 * m + 1);
    auto s = schmidt_values(ent, -1, 1e-14);
    double h = 0.0;
    for (double v : s.values)
        if (v > 0) h -= v * std::log(v);
    CHECK(h == doctest::Approx(entropy(ent)).epsilon(1e-6));
}
