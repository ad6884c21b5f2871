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

#include <random>

#include "xymps/majorana.hpp"

using namespace xymps;
using namespace xymps::majorana;

namespace {

RealMatrix random_skew(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    RealMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = dist(gen);
    return 0.5 * (a - a.transpose()).eval();
}

RealMatrix random_rotation(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    RealMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = dist(gen);
    Eigen::HouseholderQR<RealMatrix> qr(a);
    RealMatrix q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
}

} // namespace

TEST_CASE("u_block identities") {
    CHECK((u_block(0.0) - Eigen::Matrix2cd::Identity()).norm() == doctest::Approx(0.0));
    CHECK((u_block(1.3) * u_block(-1.3) - Eigen::Matrix2cd::Identity()).norm() < 1e-13);
    CHECK((u_block(0.4) * u_block(0.9) - u_block(1.3)).norm() < 1e-13);
    CHECK_THROWS_AS(u_block(400.0), Error);
}

TEST_CASE("compose basics") {
    auto id = TransformationMatrix::identity(4);
    TransformationMatrix r(Matrix::Zero(4, 4));
    r.entries.block<2, 2>(0, 0) = u_block(0.7);
    r.entries.block<2, 2>(2, 2) = u_block(-0.2);
    auto c = compose({id, r});
    CHECK((c.entries - r.entries).norm() < 1e-14);
    CHECK(c.orthogonality_defect() < 1e-12);

    TransformationMatrix small(Matrix::Identity(2, 2));
    CHECK_THROWS_AS(compose({r, small}), Error);
}

TEST_CASE("compose of hermitian factors: palindromic product is hermitian") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(0.1, 0.9);
    const int n = 8;
    TransformationMatrix a(Matrix::Identity(n, n)), b(Matrix::Identity(n, n));
    for (int j = 0; j < n / 2; ++j) a.entries.block<2, 2>(2 * j, 2 * j) = u_block(dist(gen));
    for (int j = 0; j + 1 < n / 2; ++j)
        b.entries.block<2, 2>(2 * j + 1, 2 * j + 1) = u_block(dist(gen));
    auto aba = compose({a, b, a});
    CHECK(aba.hermiticity_defect() < 1e-12);
    CHECK(aba.orthogonality_defect() < 1e-12);
    // a plain two-factor product is complex-orthogonal but not hermitian
    auto ab = compose({a, b});
    CHECK(ab.orthogonality_defect() < 1e-12);
}

TEST_CASE("canonical_form identity and direct sums") {
    auto id = TransformationMatrix::identity(6);
    auto dec = canonical_form(id);
    CHECK(dec.energies.cwiseAbs().maxCoeff() < 1e-12);

    TransformationMatrix r(Matrix::Zero(4, 4));
    r.entries.block<2, 2>(0, 0) = u_block(0.8);
    r.entries.block<2, 2>(2, 2) = u_block(0.2);
    auto d2 = canonical_form(r);
    CHECK(d2.energies[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d2.energies[1] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("canonical_form of exp(iA) recovers the skew spectrum of A") {
    const int n = 8;
    RealMatrix a = random_skew(n, 42);
    // exp(iA) is Hermitian complex-orthogonal; its energies are |skew eigenvalues| of A
    Matrix ia = Complex(0, 1) * a.cast<Complex>();
    Eigen::ComplexEigenSolver<Matrix> es(ia);
    Matrix expia = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                   es.eigenvectors().inverse();
    expia = 0.5 * (expia + expia.adjoint()).eval(); // clean numerical asymmetry
    auto dec = canonical_form(TransformationMatrix(expia));

    Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Matrix>(a.cast<Complex>()).eigenvalues();
    std::vector<double> mags;
    for (int i = 0; i < n; ++i)
        if (ev[i].imag() > 0) mags.push_back(ev[i].imag());
    std::sort(mags.begin(), mags.end());
    REQUIRE(mags.size() == static_cast<std::size_t>(n / 2));
    for (int i = 0; i < n / 2; ++i) CHECK(dec.energies[i] == doctest::Approx(mags[i]).epsilon(1e-9));
}

TEST_CASE("canonical_form rejects bad input") {
    Matrix m = Matrix::Random(4, 4);
    CHECK_THROWS_AS(canonical_form(TransformationMatrix(m)), Error);
}

TEST_CASE("skew_canonical single block and zero") {
    RealMatrix z = RealMatrix::Zero(4, 4);
    auto dz = skew_canonical(z);
    CHECK(dz.deltas.cwiseAbs().maxCoeff() < 1e-14);

    RealMatrix b(2, 2);
    const double t = std::tanh(1.5);
    b << 0, -t, t, 0;
    auto d1 = skew_canonical(b);
    CHECK(d1.deltas[0] == doctest::Approx(1.5).epsilon(1e-12));
    RealMatrix rec(2, 2);
    rec << 0, -d1.tanh_deltas[0], d1.tanh_deltas[0], 0;
    CHECK((d1.rotation * rec * d1.rotation.transpose() - b).norm() < 1e-12);
}

TEST_CASE("skew_canonical deltas invariant under rotation") {
    const int n = 6;
    RealMatrix b = RealMatrix::Zero(n, n);
    double ts[] = {0.1, 0.55, 0.9};
    for (int m = 0; m < 3; ++m) {
        b(2 * m, 2 * m + 1) = -ts[m];
        b(2 * m + 1, 2 * m) = ts[m];
    }
    RealMatrix q = random_rotation(n, 3);
    auto d1 = skew_canonical(b);
    auto d2 = skew_canonical((q * b * q.transpose()).eval());
    CHECK((d1.tanh_deltas - d2.tanh_deltas).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("pfaffian small cases") {
    RealMatrix m2(2, 2);
    m2 << 0, 2.5, -2.5, 0;
    CHECK(pfaffian(m2) == doctest::Approx(2.5));

    // 4x4 with upper entries (a,b,c,d,e,f) = (1..6): pf = af - be + cd = 8
    RealMatrix m4 = RealMatrix::Zero(4, 4);
    double v[] = {1, 2, 3, 4, 5, 6};
    int idx = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            m4(i, j) = v[idx];
            m4(j, i) = -v[idx];
            ++idx;
        }
    CHECK(pfaffian(m4) == doctest::Approx(8.0));

    CHECK_THROWS_AS(pfaffian(RealMatrix::Zero(3, 3)), Error);
}

TEST_CASE("pfaffian squared equals determinant") {
    for (unsigned seed : {1u, 2u, 3u}) {
        RealMatrix a = random_skew(8, seed);
        double pf = pfaffian(a);
        double det = a.determinant();
        CHECK(pf * pf == doctest::Approx(det).epsilon(1e-8));
    }
}

TEST_CASE("pfaffian sign under pair swap and rotation congruence") {
    RealMatrix a = random_skew(6, 11);
    double pf = pfaffian(a);
    // swapping two rows and the same two columns flips the sign
    RealMatrix b = a;
    b.row(1).swap(b.row(2));
    b.col(1).swap(b.col(2));
    CHECK(pfaffian(b) == doctest::Approx(-pf).epsilon(1e-10));
    // congruence by Q with det +1 preserves the pfaffian
    RealMatrix q = random_rotation(6, 5);
    CHECK(pfaffian((q * a * q.transpose()).eval()) == doctest::Approx(pf).epsilon(1e-9));
}
