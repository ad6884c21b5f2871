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

#include "xymps/truncation.hpp"

#include <cmath>

#include <lapacke.h>

namespace xymps::truncation {

namespace {

Eigen::Matrix2cd dirac_block() {
    Eigen::Matrix2cd d;
    d << Complex(0.5, 0), Complex(0.5, 0), Complex(0, -0.5), Complex(0, 0.5);
    return d;
}

Eigen::Matrix2cd dirac_block_inv() {
    Eigen::Matrix2cd d;
    d << Complex(1, 0), Complex(0, 1), Complex(1, 0), Complex(0, -1);
    return d;
}

/// canonical form of a (hermitian) truncated transformation matrix given in
/// Dirac ordering: convert per-mode to Majorana pairs first
std::pair<Vector, RealMatrix> energies_from_dirac(const Matrix& r_dirac) {
    const Eigen::Index n = r_dirac.rows();
    Matrix rm(n, n);
    const Eigen::Matrix2cd d = dirac_block(), dinv = dirac_block_inv();
    Matrix tmp(n, n);
    for (Eigen::Index j = 0; j < n / 2; ++j)
        tmp.middleCols(2 * j, 2) = r_dirac.middleCols(2 * j, 2) * dinv;
    for (Eigen::Index i = 0; i < n / 2; ++i)
        rm.middleRows(2 * i, 2) = d * tmp.middleRows(2 * i, 2);
    auto dec = majorana::canonical_form(majorana::TransformationMatrix(std::move(rm)));
    return {std::move(dec.energies), std::move(dec.rotation)};
}

struct Partition {
    std::vector<Eigen::Index> a, b;
};

Partition make_partition(int half_modes, int chi) {
    Partition part;
    for (int half = 0; half < 2; ++half)
        for (int j = 0; j < chi; ++j) {
            const Eigen::Index mode = half * half_modes + j;
            part.a.push_back(2 * mode);
            part.a.push_back(2 * mode + 1);
        }
    for (int half = 0; half < 2; ++half)
        for (int j = chi; j < half_modes; ++j) part.b.push_back(2 * (half * half_modes + j));
    return part;
}

Matrix schur_block(const Matrix& rf, const Partition& part) {
    const auto na = static_cast<Eigen::Index>(part.a.size());
    const auto nb = static_cast<Eigen::Index>(part.b.size());
    Matrix raa(na, na), rab(na, nb), rba(nb, na), rbb(nb, nb);
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < na; ++j) raa(i, j) = rf(part.a[i], part.a[j]);
    if (nb == 0) return raa;
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < nb; ++j) rab(i, j) = rf(part.a[i], part.b[j]);
    for (Eigen::Index i = 0; i < nb; ++i)
        for (Eigen::Index j = 0; j < na; ++j) rba(i, j) = rf(part.b[i], part.a[j]);
    for (Eigen::Index i = 0; i < nb; ++i)
        for (Eigen::Index j = 0; j < nb; ++j) rbb(i, j) = rf(part.b[i], part.b[j]);

    Eigen::PartialPivLU<Matrix> lu(rbb);
    const double rcond = lu.rcond();
    if (rcond < 1e-12)
        throw numeric_error("SingularBlock",
                            "discarded-mode block is near singular, rcond = " + std::to_string(rcond));
    return raa - rab * lu.solve(rba);
}

/// R in the mode (Dirac) basis: Rf = D^-1 O^T R O D with O the block-diagonal
/// half rotations and D the per-mode Dirac map.
Matrix rotate_to_modes(const Matrix& r, const RealMatrix& rot_front, const RealMatrix& rot_back) {
    const Eigen::Index nh = rot_front.rows();
    const Eigen::Index n = 2 * nh;
    Matrix rf(n, n);
    // O^T R O, blockwise
    rf.topLeftCorner(nh, nh) = rot_front.transpose() * r.topLeftCorner(nh, nh) * rot_front;
    rf.topRightCorner(nh, nh) = rot_front.transpose() * r.topRightCorner(nh, nh) * rot_back;
    rf.bottomLeftCorner(nh, nh) = rot_back.transpose() * r.bottomLeftCorner(nh, nh) * rot_front;
    rf.bottomRightCorner(nh, nh) = rot_back.transpose() * r.bottomRightCorner(nh, nh) * rot_back;
    // D^-1 (.) D
    const Eigen::Matrix2cd d = dirac_block(), dinv = dirac_block_inv();
    Matrix tmp(n, n);
    for (Eigen::Index j = 0; j < n / 2; ++j) tmp.middleCols(2 * j, 2) = rf.middleCols(2 * j, 2) * d;
    for (Eigen::Index i = 0; i < n / 2; ++i)
        rf.middleRows(2 * i, 2) = dinv * tmp.middleRows(2 * i, 2);
    return rf;
}

} // namespace

TruncatedTransfer truncate(const transfer::TransferSpec& spec,
                           const entanglement::EntanglementSpectrum& ent, int chi,
                           bool with_sigma_z) {
    const int nmodes = spec.half_length; // entanglement modes per half
    if (chi < 1 || chi > nmodes)
        throw domain_error("DomainError", "need 1 <= chi <= modes per half");

    auto spec_plain = spec;
    spec_plain.flavor = transfer::Flavor::plain;
    Matrix r = transfer::build_r(spec_plain).entries;
    Matrix rf = rotate_to_modes(r, ent.rotation, ent.rotation_back);
    auto part = make_partition(nmodes, chi);

    TruncatedTransfer out;
    out.chi = chi;
    out.r_tilde = schur_block(rf, part);
    auto [energies, rot] = energies_from_dirac(out.r_tilde);
    out.energies = std::move(energies);
    out.mode_rotation = std::move(rot);

    if (with_sigma_z) {
        auto spec_z = spec;
        spec_z.flavor = transfer::Flavor::sigma_z;
        Matrix rz = transfer::build_r(spec_z).entries;
        Matrix rfz = rotate_to_modes(rz, ent.rotation, ent.rotation_back);
        out.r_tilde_sigma_z = schur_block(rfz, part);
    }
    return out;
}

ResolvedHalfModes resolved_half_modes(const transfer::TransferSpec& spec, int half) {
    const Eigen::Index nh = 2 * spec.half_length; // Majoranas per half
    const Eigen::Index off = half * nh;
    ResolvedHalfModes out;
    out.b_half = transfer::covariance_block(spec, off, off + nh, off, off + nh);
    RealMatrix& b = out.b_half;
    b = 0.5 * (b - b.transpose()).eval();

    // eigenvalues of -B^2 = tanh(delta)^2, each twice
    RealMatrix p = -(b * b);
    Vector evals(nh);
    RealMatrix evecs = p;
    {
        lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(nh),
                                         evecs.data(), static_cast<lapack_int>(nh), evals.data());
        if (info != 0)
            throw numeric_error("EigenFailure", "dsyevd failed with info " + std::to_string(info));
    }

    // resolved modes: tanh^2 below the saturation threshold
    constexpr double sat_tol = 1e-13;
    std::vector<Eigen::Index> resolved;
    for (Eigen::Index i = 0; i < nh; ++i)
        if (evals[i] < 1.0 - sat_tol) resolved.push_back(i);
    if (resolved.size() % 2 != 0)
        throw numeric_error("PairingFailure", "odd count of resolved covariance eigenvectors");

    // group into clusters of equal tanh^2 and canonicalize B within each
    std::vector<double> deltas, tanhs;
    std::vector<Eigen::VectorXd> cols;
    std::size_t i = 0;
    while (i < resolved.size()) {
        std::size_t j = i + 1;
        while (j < resolved.size() &&
               std::abs(evals[resolved[j]] - evals[resolved[i]]) < 1e-10 * (1.0 + evals[resolved[i]]))
            ++j;
        const auto k = static_cast<Eigen::Index>(j - i);
        RealMatrix span(nh, k);
        for (Eigen::Index c = 0; c < k; ++c) span.col(c) = evecs.col(resolved[i + c]);
        RealMatrix small = span.transpose() * (b * span);
        auto sc = majorana::skew_canonical(0.5 * (small - small.transpose()).eval());
        RealMatrix pairs = span * sc.rotation;
        for (Eigen::Index m = 0; m < k / 2; ++m) {
            deltas.push_back(sc.deltas[m]);
            tanhs.push_back(sc.tanh_deltas[m]);
            cols.push_back(pairs.col(2 * m));
            cols.push_back(pairs.col(2 * m + 1));
        }
        i = j;
    }
    // ascending delta order
    std::vector<std::size_t> order(deltas.size());
    for (std::size_t m = 0; m < order.size(); ++m) order[m] = m;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t c) { return deltas[a] < deltas[c]; });
    out.deltas.resize(static_cast<Eigen::Index>(order.size()));
    out.tanh_deltas.resize(out.deltas.size());
    out.pairs.resize(nh, 2 * out.deltas.size());
    for (std::size_t m = 0; m < order.size(); ++m) {
        out.deltas[static_cast<Eigen::Index>(m)] = deltas[order[m]];
        out.tanh_deltas[static_cast<Eigen::Index>(m)] = tanhs[order[m]];
        out.pairs.col(2 * m) = cols[2 * order[m]];
        out.pairs.col(2 * m + 1) = cols[2 * order[m] + 1];
    }
    return out;
}

namespace {

using SparseC = Eigen::SparseMatrix<Complex>;
using CVector = Eigen::VectorXcd;

/// Oblique projector onto the discarded annihilator space, built from the
/// resolved pairs plus the saturated complement where the covariance itself
/// is the complex structure.
class DiscardedAnnihilatorProjector {
  public:
    DiscardedAnnihilatorProjector(const ResolvedHalfModes& front, const ResolvedHalfModes& back,
                                  int chi)
        : front_(front), back_(back), chi_(chi) {}

    CVector apply(const CVector& v) const {
        const Eigen::Index nh = front_.b_half.rows();
        CVector out = CVector::Zero(2 * nh);
        for (int half = 0; half < 2; ++half) {
            const auto& hm = (half == 0) ? front_ : back_;
            const Eigen::Index off = half * nh;
            CVector vh = v.segment(off, nh);
            // strip all resolved pairs to isolate the saturated component
            const Eigen::Index nres = hm.deltas.size();
            CVector coef = hm.pairs.transpose().cast<Complex>() * vh;
            CVector vs = vh - hm.pairs.cast<Complex>() * coef;
            // saturated annihilator component: (1 - i B)/2
            CVector bvs = hm.b_half.cast<Complex>() * vs;
            CVector acc = 0.5 * (vs - Complex(0, 1) * bvs);
            // resolved discarded modes enter with their explicit pairs;
            // ann = (x - i y)/2, cre = (x + i y)/2, coordinate = 2 cre^T v
            for (Eigen::Index j = chi_; j < nres; ++j) {
                const Eigen::VectorXd x = hm.pairs.col(2 * j), y = hm.pairs.col(2 * j + 1);
                const Complex cx = (x.cast<Complex>().array() * vh.array()).sum();
                const Complex cy = (y.cast<Complex>().array() * vh.array()).sum();
                const Complex coord = cx + Complex(0, 1) * cy;
                CVector ann = 0.5 * (x.cast<Complex>() - Complex(0, 1) * y.cast<Complex>());
                acc += ann * coord;
            }
            out.segment(off, nh) = acc;
        }
        return out;
    }

  private:
    const ResolvedHalfModes& front_;
    const ResolvedHalfModes& back_;
    int chi_;
};

/// GMRES without restarts for the projected Schur solves.
CVector gmres(const std::function<CVector(const CVector&)>& op, const CVector& rhs, double tol,
              int max_iter) {
    const Eigen::Index n = rhs.size();
    const double beta = rhs.norm();
    if (beta == 0.0) return CVector::Zero(n);
    Eigen::MatrixXcd basis(n, max_iter + 1);
    Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(max_iter + 1, max_iter);
    basis.col(0) = rhs / beta;
    for (int j = 0; j < max_iter; ++j) {
        CVector w = op(basis.col(j));
        for (int i = 0; i <= j; ++i) {
            hess(i, j) = basis.col(i).dot(w);
            w -= hess(i, j) * basis.col(i);
        }
        // re-orthogonalize once
        for (int i = 0; i <= j; ++i) {
            const Complex c = basis.col(i).dot(w);
            hess(i, j) += c;
            w -= c * basis.col(i);
        }
        hess(j + 1, j) = w.norm();
        // solve the small least squares and check the residual
        Eigen::MatrixXcd h = hess.topLeftCorner(j + 2, j + 1);
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(j + 2);
        e(0) = beta;
        Eigen::VectorXcd ysol = h.colPivHouseholderQr().solve(e);
        const double res = (h * ysol - e).norm() / beta;
        if (res < tol || hess(j + 1, j).real() < 1e-300 || j == max_iter - 1) {
            if (res > tol * 50)
                throw numeric_error("GmresFailure",
                                    "projected Schur solve stalled, residual " + std::to_string(res));
            return basis.leftCols(j + 1) * ysol;
        }
        basis.col(j + 1) = w / hess(j + 1, j);
    }
    throw numeric_error("GmresFailure", "projected Schur solve did not converge");
}

Matrix schur_iterative(const SparseC& r, const ResolvedHalfModes& front,
                       const ResolvedHalfModes& back, int chi) {
    const Eigen::Index nh = front.b_half.rows();
    const Eigen::Index dim = 2 * nh;
    DiscardedAnnihilatorProjector proj(front, back, chi);

    // kept-mode column vectors and coordinate functionals, per-mode (f, fdag)
    std::vector<CVector> columns, duals;
    for (int half = 0; half < 2; ++half) {
        const auto& hm = (half == 0) ? front : back;
        if (chi > hm.deltas.size())
            throw domain_error("DomainError", "chi exceeds the resolved modes of a half");
        const Eigen::Index off = half * nh;
        for (int j = 0; j < chi; ++j) {
            CVector ann = CVector::Zero(dim), cre = CVector::Zero(dim);
            ann.segment(off, nh) =
                0.5 * (hm.pairs.col(2 * j).cast<Complex>() -
                       Complex(0, 1) * hm.pairs.col(2 * j + 1).cast<Complex>());
            cre.segment(off, nh) =
                0.5 * (hm.pairs.col(2 * j).cast<Complex>() +
                       Complex(0, 1) * hm.pairs.col(2 * j + 1).cast<Complex>());
            columns.push_back(ann);
            columns.push_back(cre);
            duals.push_back(cre); // f coordinate = 2 cre^T v
            duals.push_back(ann); // fdag coordinate = 2 ann^T v
        }
    }
    const auto na = static_cast<Eigen::Index>(columns.size());

    auto op = [&](const CVector& z) { return proj.apply(CVector(r * z)); };
    Matrix rt(na, na);
    for (Eigen::Index q = 0; q < na; ++q) {
        CVector rx = r * columns[q];
        CVector rhs = -proj.apply(rx);
        CVector z = gmres(op, rhs, 1e-12, 220);
        CVector y = rx + r * z;
        for (Eigen::Index p2 = 0; p2 < na; ++p2)
            rt(p2, q) = 2.0 * (duals[p2].transpose() * y)(0, 0);
    }
    return rt;
}

} // namespace

TruncatedTransfer truncate_large(const transfer::TransferSpec& spec, int chi, bool with_sigma_z) {
    auto spec_plain = spec;
    spec_plain.flavor = transfer::Flavor::plain;
    ResolvedHalfModes front = resolved_half_modes(spec_plain, 0);
    ResolvedHalfModes back = resolved_half_modes(spec_plain, 1);

    TruncatedTransfer out;
    out.chi = chi;
    out.r_tilde = schur_iterative(transfer::build_r_sparse(spec_plain), front, back, chi);
    auto [energies, rot] = energies_from_dirac(out.r_tilde);
    out.energies = std::move(energies);
    out.mode_rotation = std::move(rot);
    if (with_sigma_z) {
        auto spec_z = spec;
        spec_z.flavor = transfer::Flavor::sigma_z;
        out.r_tilde_sigma_z = schur_iterative(transfer::build_r_sparse(spec_z), front, back, chi);
    }
    return out;
}

TruncatedTransfer truncate_auto(const transfer::TransferSpec& spec, int chi, bool with_sigma_z) {
    if (spec.chain_sites() <= 700) {
        auto [modes, state] = transfer::diagonalize(spec);
        auto ent = entanglement::half_chain_spectrum(state, spec.half_length);
        return truncate(spec, ent, chi, with_sigma_z);
    }
    return truncate_large(spec, chi, with_sigma_z);
}

GapScalingFit gap_scaling(const model::ModelPoint& point, const std::vector<int>& chis,
                          int half_length) {
    const double gap = point.gap();
    if (gap < 1e-8)
        throw domain_error("NotGapped", "gap scaling needs a gapped point");
    if (half_length < 0) {
        // the finite-chain gap shift scales like (pi/M)^2 curvature; keep it
        // two orders below the chi=10 truncation error (~5% of the gap)
        const double xi = 1.0 / gap;
        half_length = static_cast<int>(std::ceil(25.0 * xi));
    }
    transfer::TransferSpec spec{half_length, point, transfer::Flavor::plain};

    GapScalingFit fit;
    fit.chis = chis;
    fit.half_length = half_length;
    fit.eps1.resize(static_cast<Eigen::Index>(chis.size()));
    fit.rel_error.resize(fit.eps1.size());

    if (spec.chain_sites() <= 700) {
        auto [modes, state] = transfer::diagonalize(spec);
        auto ent = entanglement::half_chain_spectrum(state, spec.half_length);
        for (std::size_t i = 0; i < chis.size(); ++i) {
            fit.eps1[static_cast<Eigen::Index>(i)] = truncate(spec, ent, chis[i]).energies[0];
        }
    } else {
        ResolvedHalfModes front = resolved_half_modes(spec, 0);
        ResolvedHalfModes back = resolved_half_modes(spec, 1);
        auto r = transfer::build_r_sparse(spec);
        for (std::size_t i = 0; i < chis.size(); ++i) {
            Matrix rt = schur_iterative(r, front, back, chis[i]);
            auto [energies, rot] = energies_from_dirac(rt);
            fit.eps1[static_cast<Eigen::Index>(i)] = energies[0];
        }
    }

    Eigen::MatrixXd a(chis.size(), 2);
    Eigen::VectorXd y(chis.size());
    for (std::size_t i = 0; i < chis.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        fit.rel_error[ii] = (fit.eps1[ii] - gap) / gap;
        a(ii, 0) = std::log(static_cast<double>(chis[i]));
        a(ii, 1) = 1.0;
        y(ii) = std::log(fit.rel_error[ii]);
    }
    Eigen::Vector2d coef = (a.transpose() * a).ldlt().solve(a.transpose() * y);
    fit.p2 = -coef(0);
    fit.intercept = coef(1);
    fit.p1 = std::exp(coef(1));
    fit.residual = std::sqrt((a * coef - y).squaredNorm() / y.size());
    return fit;
}

MomentaFit effective_momenta(const TruncatedTransfer& tt, const model::ModelPoint& point,
                             int skip) {
    MomentaFit fit;
    fit.skip = skip;
    const Eigen::Index n = tt.energies.size();
    fit.momenta.resize(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        try {
            fit.momenta[m] = model::invert_dispersion_tf(tt.energies[m], point);
        } catch (const Error& e) {
            throw Error(e.error_class(), "OutsideBand",
                        "truncated energy " + std::to_string(m + 1) + " outside the band");
        }
    }
    const Eigen::Index first = skip; // fit over m = skip+1 .. 2chi (1-based)
    const Eigen::Index cnt = n - first;
    if (cnt < 2)
        throw domain_error("DomainError", "not enough modes to fit after skipping");
    Eigen::MatrixXd a(cnt, 2);
    Eigen::VectorXd y(cnt);
    for (Eigen::Index i = 0; i < cnt; ++i) {
        a(i, 0) = static_cast<double>(first + i + 1); // 1-based mode index
        a(i, 1) = 1.0;
        y(i) = std::log(fit.momenta[first + i]);
    }
    Eigen::Vector2d coef = (a.transpose() * a).ldlt().solve(a.transpose() * y);
    fit.log_lambda = coef(0);
    fit.lambda = std::exp(coef(0));
    fit.intercept = coef(1);
    fit.residual = std::sqrt((a * coef - y).squaredNorm() / cnt);
    return fit;
}

} // namespace xymps::truncation
