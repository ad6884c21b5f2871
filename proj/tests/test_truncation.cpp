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

#include <algorithm>
#include <cmath>
#include <vector>

#include "xymps/entanglement.hpp"
#include "xymps/oracle.hpp"
#include "xymps/truncation.hpp"

using namespace xymps;
using namespace xymps::truncation;

namespace {

std::vector<double> subset_ratios(const Eigen::VectorXd& eps, int top) {
    std::vector<double> sums{0.0};
    for (int i = 0; i < eps.size(); ++i) {
        const std::size_t n = sums.size();
        for (std::size_t j = 0; j < n; ++j) sums.push_back(sums[j] + eps[i]);
    }
    std::sort(sums.begin(), sums.end());
    std::vector<double> out;
    for (int i = 0; i < top && i < static_cast<int>(sums.size()); ++i)
        out.push_back(std::exp(-sums[i]));
    return out;
}

TruncatedTransfer dense_path(const model::ModelPoint& p, int l, int chi, bool sz = false) {
    transfer::TransferSpec spec{l, p, transfer::Flavor::plain};
    auto [modes, state] = transfer::diagonalize(spec);
    auto ent = entanglement::half_chain_spectrum(state, l);
    return truncate(spec, ent, chi, sz);
}

} // namespace

TEST_CASE("chi = L keeps the full spectrum") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    const int l = 4;
    transfer::TransferSpec spec{l, p, transfer::Flavor::plain};
    auto [modes, state] = transfer::diagonalize(spec);
    auto ent = entanglement::half_chain_spectrum(state, l);
    auto tt = truncate(spec, ent, l);
    REQUIRE(tt.energies.size() == modes.energies.size());
    for (int i = 0; i < tt.energies.size(); ++i)
        CHECK(tt.energies[i] == doctest::Approx(modes.energies[i]).epsilon(1e-8));
}

TEST_CASE("truncated spectra match the dense projection oracle") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    for (auto [l, chi] : std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {4, 2}}) {
        auto tt = dense_path(p, l, chi);
        auto dense = oracle::dense_truncate(l, chi, p);
        auto ev = oracle::dense_spectrum(dense.transfer);
        auto ratios = subset_ratios(tt.energies, 6);
        for (int i = 0; i < 6 && i < ev.size(); ++i)
            CHECK(ev[i] / ev[0] == doctest::Approx(ratios[i]).epsilon(1e-8));
    }
}

TEST_CASE("truncated generator stays complex orthogonal and hermitian") {
    auto p = model::couplings_from_xy(1.05, 0.7);
    auto tt = dense_path(p, 6, 3);
    majorana::TransformationMatrix rt(tt.r_tilde);
    CHECK(rt.orthogonality_defect() < 1e-8);
    // positive ascending energies
    for (int i = 0; i < tt.energies.size(); ++i) {
        CHECK(tt.energies[i] > 0);
        if (i > 0) CHECK(tt.energies[i] >= tt.energies[i - 1]);
    }
}

TEST_CASE("iterative route reproduces the dense route") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    const int l = 60;
    transfer::TransferSpec spec{l, p, transfer::Flavor::plain};
    auto [modes, state] = transfer::diagonalize(spec);
    auto ent = entanglement::half_chain_spectrum(state, l);
    for (int chi : {2, 4}) {
        auto dense = truncate(spec, ent, chi, true);
        auto iter = truncate_large(spec, chi, true);
        for (int i = 0; i < dense.energies.size(); ++i)
            CHECK(iter.energies[i] == doctest::Approx(dense.energies[i]).epsilon(1e-7));
        // sigma_z companions agree up to the canonical gauge: compare traces
        // of powers, which are basis independent
        for (int pw : {1, 2, 3}) {
            Eigen::MatrixXcd a = *dense.r_tilde_sigma_z, b = *iter.r_tilde_sigma_z;
            Eigen::MatrixXcd pa = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
            Eigen::MatrixXcd pb = pa;
            for (int q = 0; q < pw; ++q) {
                pa = pa * a;
                pb = pb * b;
            }
            CHECK(std::abs(pa.trace() - pb.trace()) < 1e-6 * (1.0 + std::abs(pa.trace())));
        }
    }
}

TEST_CASE("resolved modes agree with the entanglement spectrum") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    const int l = 50;
    transfer::TransferSpec spec{l, p, transfer::Flavor::plain};
    auto [modes, state] = transfer::diagonalize(spec);
    auto ent = entanglement::half_chain_spectrum(state, l);
    auto res = resolved_half_modes(spec, 0);
    REQUIRE(res.deltas.size() >= 4);
    for (int m = 0; m < 4; ++m)
        CHECK(res.deltas[m] == doctest::Approx(ent.deltas[m]).epsilon(1e-8));
}

TEST_CASE("low-energy collapse of truncated spectra in the gapped phase") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    const int l = 160; // chain 320: enough for a qualitative collapse check
    transfer::TransferSpec spec{l, p, transfer::Flavor::plain};
    auto [modes, state] = transfer::diagonalize(spec);
    auto ent = entanglement::half_chain_spectrum(state, l);
    auto t4 = truncate(spec, ent, 4);
    auto t8 = truncate(spec, ent, 8);
    // eps_m(chi) vs m/chi collapse: compare m/chi = 1/2 points
    const double e4 = t4.energies[1]; // m = 2 of 8
    const double e8 = t8.energies[3]; // m = 4 of 16
    CHECK(std::abs(e4 - e8) / e8 < 0.06);
}

TEST_CASE("monotone gap error and scaling exponent near 2") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    std::vector<int> chis{2, 3, 4, 5, 6};
    auto fit = gap_scaling(p, chis, 400); // chain 800 keeps this test quick
    for (std::size_t i = 1; i < chis.size(); ++i)
        CHECK(fit.eps1[i] <= fit.eps1[i - 1] + 1e-12);
    for (int i = 0; i < fit.eps1.size(); ++i) CHECK(fit.eps1[i] >= p.gap());
    CHECK(fit.p2 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("effective momenta are log linear in the gapped phase") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    auto tt = dense_path(p, 300, 6);
    auto fit = effective_momenta(tt, p, 3);
    CHECK(fit.residual < 0.1);
    CHECK(fit.lambda > 1.0);
    for (int m = 1; m < fit.momenta.size(); ++m) CHECK(fit.momenta[m] >= fit.momenta[m - 1]);
}

TEST_CASE("out-of-band truncated energies are reported") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    TruncatedTransfer tt;
    tt.chi = 1;
    tt.energies.resize(2);
    tt.energies << p.gap() * 0.5, 1.0; // below the band
    CHECK_THROWS_AS(effective_momenta(tt, p, 0), Error);
}
