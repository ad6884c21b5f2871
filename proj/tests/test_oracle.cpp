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

#include "xymps/model.hpp"
#include "xymps/oracle.hpp"

using namespace xymps;
using namespace xymps::oracle;

TEST_CASE("MPO contraction is proportional to the dense operator") {
    auto p = model::couplings_from_xy(1.05, 0.7);
    for (int n : {3, 4}) {
        auto v = dense_v(n, p);
        auto vm = dense_v_mpo(n, p);
        const double scale = (vm.trace() / v.trace()).real();
        CHECK((vm - scale * v).norm() / vm.norm() < 1e-10);
    }
}

TEST_CASE("the row operator commutes with the XY Hamiltonian") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    const int n = 4;
    auto v = dense_v(n, p);
    auto h = dense_hxy(n, p);
    CHECK((v * h - h * v).norm() / (v.norm() * h.norm()) < 1e-9);
}

TEST_CASE("dominant eigenvector is the even-sector XY ground state") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    const int n = 4;
    auto v = dense_v(n, p);
    auto phi = dominant_eigenvector(v);
    auto h = dense_hxy(n, p);
    auto par = parity_operator(n);

    // ground state within the even parity sector
    Eigen::SelfAdjointEigenSolver<DenseOp> es(h);
    int best = -1;
    for (int i = 0; i < h.rows(); ++i) {
        const auto vec = es.eigenvectors().col(i);
        const double parity = (vec.dot(par * vec)).real();
        if (parity > 0.99) {
            best = i;
            break;
        } // ascending energies: first even state is the sector ground state
    }
    REQUIRE(best >= 0);
    const double overlap = std::abs(phi.dot(es.eigenvectors().col(best)));
    CHECK(overlap > 1.0 - 1e-9);
}

TEST_CASE("sigma_z transfer flavor equals the tensor difference") {
    auto p = model::couplings_from_xy(1.1, 0.5);
    auto tz = dense_transfer(3, p, transfer::Flavor::sigma_z);
    auto t = dense_transfer(3, p, transfer::Flavor::plain);
    // the flavors differ only through the physical weight; both hermitian here
    CHECK((tz - tz.adjoint()).norm() / tz.norm() < 1e-12);
    CHECK((t - t.adjoint()).norm() / t.norm() < 1e-12);
    CHECK((t - tz).norm() > 1e-3);
}

TEST_CASE("dense rdm agrees with direct partial trace") {
    auto p = model::couplings_from_xy(1.01, 0.8);
    const int l = 2;
    auto phi = dominant_eigenvector(dense_transfer(l, p));
    auto rho = dense_rdm_half(phi, l);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
    Eigen::VectorXd ev = dense_spectrum(rho);
    CHECK(ev.minCoeff() > -1e-12);
    CHECK(ev.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("size caps are enforced") {
    auto p = model::couplings_from_xy(1.1, 0.5);
    CHECK_THROWS_AS(dense_v(9, p), Error);
    CHECK_THROWS_AS(dense_transfer(7, p), Error);
    CHECK_THROWS_AS(dense_majoranas(5), Error);
}
