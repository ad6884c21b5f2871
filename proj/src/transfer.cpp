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

#include "xymps/transfer.hpp"

#include <cmath>

namespace xymps::transfer {

namespace {

using SparseC = Eigen::SparseMatrix<Complex>;
using banded::SparseReal;

SparseC block_factor(int dim, int offset, int count, const Eigen::Matrix2cd& blk) {
    // identity with `count` copies of blk placed on consecutive pairs from `offset`
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(dim + 4 * count);
    std::vector<bool> covered(dim, false);
    for (int j = 0; j < count; ++j) {
        const int p = offset + 2 * j;
        covered[p] = covered[p + 1] = true;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) trip.emplace_back(p + a, p + b, blk(a, b));
    }
    for (int i = 0; i < dim; ++i)
        if (!covered[i]) trip.emplace_back(i, i, Complex(1.0, 0.0));
    SparseC m(dim, dim);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

} // namespace

Eigen::SparseMatrix<Complex> build_r_sparse(const TransferSpec& spec) {
    const auto& p = spec.point;
    const int sites = spec.chain_sites();
    const int dim = spec.majorana_dim();
    if (spec.half_length < 1)
        throw domain_error("DomainError", "half_length must be >= 1");

    SparseC r1h = block_factor(dim, 0, sites, majorana::u_block(p.k2bar));
    SparseC r2 = block_factor(dim, 1, sites - 1, majorana::u_block(2.0 * p.k1));
    SparseC r;
    if (spec.flavor == Flavor::plain) {
        r = r1h * r2 * r1h;
    } else {
        // sigma_z insertion exp[-2 K1 tx_L tx_{L+1}] = u(-4 K1) on the
        // interface Majorana pair (2L, 2L+1), 1-based; 0-based (2L-1, 2L).
        SparseC q = block_factor(dim, 2 * spec.half_length - 1, 1, majorana::u_block(-4.0 * p.k1));
        r = r1h * q * r2 * r1h;
    }
    r.makeCompressed();
    return r;
}

majorana::TransformationMatrix build_r(const TransferSpec& spec) {
    return majorana::TransformationMatrix(Matrix(build_r_sparse(spec)));
}

std::pair<ModeSpectrum, GaussianState> diagonalize(const TransferSpec& spec) {
    if (spec.flavor != Flavor::plain)
        throw domain_error("NotHermitian", "diagonalize requires the plain flavor");
    auto dec = majorana::canonical_form(build_r(spec));
    const Eigen::Index n = spec.majorana_dim();

    GaussianState state;
    state.energies = dec.energies;
    state.covariance.setZero(n, n);
    Eigen::Matrix2d jm;
    jm << 0.0, -1.0, 1.0, 0.0;
    for (Eigen::Index m = 0; m < n / 2; ++m) {
        state.covariance.noalias() +=
            dec.rotation.middleCols(2 * m, 2) * jm * dec.rotation.middleCols(2 * m, 2).transpose();
    }
    ModeSpectrum spectrum{std::move(dec.energies), std::move(dec.rotation)};
    return {std::move(spectrum), std::move(state)};
}

namespace {

/// S = -Y^2 = Y^T Y for the banded skew generator Y = Im R; SPD with
/// eigenvalues sinh(eps_n)^2.
SparseReal squared_generator(const SparseC& r) {
    SparseReal y = r.imag().pruned(1e-300, 1.0);
    SparseReal s = (y.transpose() * y).pruned(1e-300, 1.0);
    return s;
}

} // namespace

Vector lowest_energies(const TransferSpec& spec, int count) {
    auto mode = lowest_modes(spec, count);
    return mode.energies;
}

ModeSpectrum lowest_modes(const TransferSpec& spec, int count) {
    const SparseC r = build_r_sparse(spec);
    SparseReal y = r.imag().pruned(1e-300, 1.0);
    SparseReal s = (y.transpose() * y).pruned(1e-300, 1.0);
    const Eigen::Index dim = s.rows();
    if (2 * count > dim)
        throw domain_error("DomainError", "requested more modes than available");

    // shift keeps the factorization positive definite near a zero mode
    const double shift = 1e-18;
    banded::BandCholesky chol(s, shift);
    banded::MatVec op = [&](const Vector& v, Vector& out) {
        out = v;
        chol.solve_in_place(out);
    };
    // eigenvalues of S come in (x, y)-degenerate pairs: ask for 2*count
    auto res = banded::lanczos_largest(op, dim, 2 * count, 1e-13, 700);

    ModeSpectrum out;
    out.energies.resize(count);
    out.rotation.resize(dim, 2 * count);
    std::vector<bool> used(2 * count, false);
    int mode_idx = 0;
    for (int j = 0; j < 2 * count && mode_idx < count; ++j) {
        if (used[j]) continue;
        used[j] = true;
        const double s_val = std::max(0.0, 1.0 / res.values[j] - shift);
        const double sinh_eps = std::sqrt(s_val);
        Vector x = res.vectors.col(j);
        Vector yx = y * x;
        const double norm_yx = yx.norm();
        Vector partner;
        if (norm_yx > 1e-13) {
            partner = yx / norm_yx;
        } else {
            // zero mode: partner from the remaining degenerate vectors
            partner = res.vectors.col(j + 1);
        }
        // mark the Lanczos vector closest to the partner as consumed
        double best = -1.0;
        int best_k = -1;
        for (int k = j + 1; k < 2 * count; ++k) {
            if (used[k]) continue;
            const double ov = std::abs(partner.dot(res.vectors.col(k)));
            if (ov > best) {
                best = ov;
                best_k = k;
            }
        }
        if (best_k >= 0) used[best_k] = true;
        // canonical pair (w1, w2) with Y w2 = sinh(eps) w1
        out.energies[mode_idx] = std::asinh(sinh_eps);
        out.rotation.col(2 * mode_idx) = (norm_yx > 1e-13) ? partner : partner;
        out.rotation.col(2 * mode_idx + 1) = x;
        ++mode_idx;
    }
    // ensure ascending energies
    for (int i = 1; i < count; ++i)
        if (out.energies[i] < out.energies[i - 1] - 1e-12)
            throw numeric_error("OrderingFailure", "Lanczos modes not ascending");
    return out;
}

double energy_top(const model::ModelPoint& point) { return 2.0 * (point.k2bar + point.k1); }

std::vector<double> obc_momentum_grid(int half_length) {
    const int m = 2 * half_length;
    std::vector<double> grid(m);
    for (int j = 1; j <= m; ++j) grid[j - 1] = (2.0 * j - 1.0) * M_PI / (2.0 * m);
    return grid;
}

Vector band_energies(const TransferSpec& spec, int n_momenta) {
    auto grid = obc_momentum_grid(spec.half_length);
    n_momenta = std::min<int>(n_momenta, static_cast<int>(grid.size()));
    Vector out(n_momenta);
    for (int j = 0; j < n_momenta; ++j) out[j] = model::dispersion_tf(grid[j], spec.point);
    return out;
}

RealMatrix covariance_block(const TransferSpec& spec, Eigen::Index row_begin, Eigen::Index row_end,
                            Eigen::Index col_begin, Eigen::Index col_end) {
    const SparseC r = build_r_sparse(spec);
    SparseReal y = r.imag().pruned(1e-300, 1.0);
    SparseReal s = (y.transpose() * y).pruned(1e-300, 1.0);
    const Eigen::Index dim = s.rows();

    // spectral bounds of S = sinh^2(eps): measure the bottom, bound the top
    banded::BandCholesky probe(s, 1e-18);
    banded::MatVec inv_op = [&](const Vector& v, Vector& out) {
        out = v;
        probe.solve_in_place(out);
    };
    auto bottom = banded::lanczos_largest(inv_op, dim, 1, 1e-8, 500, 999);
    const double s_min = std::max(1.0 / bottom.values[0], 1e-16);
    const double s_max = std::pow(std::sinh(energy_top(spec.point)), 2);
    banded::InverseSqrtQuadrature quad =
        banded::InverseSqrtQuadrature::build(0.5 * s_min, 2.0 * std::max(s_max, s_min));

    std::vector<banded::BandCholesky> facts;
    facts.reserve(quad.nodes.size());
    for (double t : quad.nodes) facts.emplace_back(s, t * t);

    const Eigen::Index ncols = col_end - col_begin;
    RealMatrix acc = RealMatrix::Zero(dim, ncols);
    Vector work(dim);
    for (std::size_t q = 0; q < facts.size(); ++q) {
        for (Eigen::Index j = 0; j < ncols; ++j) {
            work.setZero();
            work[col_begin + j] = 1.0;
            facts[q].solve_in_place(work);
            acc.col(j).noalias() += quad.weights[q] * work;
        }
    }
    // B = -Y S^{-1/2}; only the requested rows of the product are formed.
    SparseReal y_rows = SparseReal(y.middleRows(row_begin, row_end - row_begin));
    return -(y_rows * acc);
}

} // namespace xymps::transfer
