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

#include "xymps/banded.hpp"

#include <cmath>
#include <random>

#include <lapacke.h>

namespace xymps::banded {

BandCholesky::BandCholesky(const SparseReal& a, double diagonal_shift) {
    n_ = a.rows();
    int kd = 0;
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseReal::InnerIterator it(a, k); it; ++it)
            if (it.value() != 0.0) kd = std::max<int>(kd, std::abs(int(it.row()) - int(it.col())));
    kd_ = kd;
    const int ldab = kd_ + 1;
    band_.assign(static_cast<std::size_t>(ldab) * n_, 0.0);
    // upper storage: ab(kd + i - j, j) = a(i, j) for max(0, j-kd) <= i <= j
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseReal::InnerIterator it(a, k); it; ++it) {
            const int i = int(it.row()), j = int(it.col());
            if (i <= j) band_[static_cast<std::size_t>(j) * ldab + (kd_ + i - j)] = it.value();
        }
    for (Eigen::Index j = 0; j < n_; ++j)
        band_[static_cast<std::size_t>(j) * ldab + kd_] += diagonal_shift;

    lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', static_cast<lapack_int>(n_), kd_,
                                     band_.data(), ldab);
    if (info != 0)
        throw numeric_error("FactorizationFailure",
                            "banded Cholesky failed with info " + std::to_string(info));
}

void BandCholesky::solve_in_place(Vector& x) const {
    lapack_int info = LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', static_cast<lapack_int>(n_), kd_, 1,
                                     band_.data(), kd_ + 1, x.data(), static_cast<lapack_int>(n_));
    if (info != 0)
        throw numeric_error("SolveFailure", "banded solve failed with info " + std::to_string(info));
}

InverseSqrtQuadrature InverseSqrtQuadrature::build(double lo, double hi) {
    if (!(lo > 0.0) || !(hi > lo))
        throw domain_error("DomainError", "invalid spectral interval for inverse sqrt");
    // s^{-1/2} = (2/pi) int_0^inf (s + t^2)^{-1} dt with the double-exponential
    // substitution t = sqrt(lo*hi)^{1/2} * exp(sinh u); tails then truncate
    // double-exponentially and the trapezoid converges geometrically.
    const double m = std::sqrt(lo), M = std::sqrt(hi);
    const double center = std::sqrt(m * M);
    const double reach = 0.5 * std::log(M / m) + 30.0;
    const double U = std::asinh(reach);
    const int n = 131 + 10 * static_cast<int>(std::max(0.0, std::log10(hi / lo) - 4.0));
    const double h = 2.0 * U / (n - 1);
    InverseSqrtQuadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double u = -U + i * h;
        const double t = center * std::exp(std::sinh(u));
        q.nodes[i] = t;
        q.weights[i] = (2.0 / M_PI) * h * std::cosh(u) * t;
    }
    return q;
}

InverseSqrtOperator::InverseSqrtOperator(const SparseReal& s, double spec_lo, double spec_hi)
    : quad_(InverseSqrtQuadrature::build(spec_lo, spec_hi)) {
    facts_.reserve(quad_.nodes.size());
    for (double t : quad_.nodes) facts_.emplace_back(s, t * t);
}

Vector InverseSqrtOperator::apply(const Vector& v) const {
    Vector acc = Vector::Zero(v.size());
    Vector work(v.size());
    for (std::size_t j = 0; j < facts_.size(); ++j) {
        work = v;
        facts_[j].solve_in_place(work);
        acc.noalias() += quad_.weights[j] * work;
    }
    return acc;
}

LanczosResult lanczos_largest(const MatVec& op, Eigen::Index dim, int count, double tol,
                              int max_iter, unsigned seed) {
    max_iter = std::min<int>(max_iter, static_cast<int>(dim));
    Eigen::MatrixXd basis(dim, max_iter + 1);
    std::vector<double> alpha, beta;

    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = dist(gen);
    v.normalize();
    basis.col(0) = v;

    Vector w(dim);
    LanczosResult out;
    for (int it = 0; it < max_iter; ++it) {
        op(basis.col(it), w);
        const double a = basis.col(it).dot(w);
        alpha.push_back(a);
        w -= a * basis.col(it);
        if (it > 0) w -= beta.back() * basis.col(it - 1);
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass)
            w -= basis.leftCols(it + 1) * (basis.leftCols(it + 1).transpose() * w);
        const double b = w.norm();

        const int k = it + 1;
        const bool last = (b < 1e-14) || (it == max_iter - 1);
        if (k >= count && (last || it % 10 == 9)) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < k; ++i) t(i, i) = alpha[i];
            for (int i = 0; i + 1 < k; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            // residual of the j-th ritz pair is |b * s_kj|
            bool done = true;
            for (int j = 0; j < count; ++j) {
                const int col = k - 1 - j;
                if (std::abs(b * es.eigenvectors()(k - 1, col)) > tol) done = false;
            }
            if (done || last) {
                out.values.resize(count);
                out.vectors.resize(dim, count);
                for (int j = 0; j < count; ++j) {
                    const int col = k - 1 - j;
                    out.values[j] = es.eigenvalues()(col);
                    out.vectors.col(j) = basis.leftCols(k) * es.eigenvectors().col(col);
                    out.vectors.col(j).normalize();
                }
                return out;
            }
        }
        if (b < 1e-14) break;
        beta.push_back(b);
        basis.col(it + 1) = w / b;
    }
    throw numeric_error("LanczosFailure", "Lanczos did not converge to the requested accuracy");
}

} // namespace xymps::banded
