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

#include "xymps/oracle.hpp"

#include <cmath>
#include <cstdlib>

namespace xymps::oracle {

namespace {

using Complex = std::complex<double>;

DenseOp kron(const DenseOp& a, const DenseOp& b) {
    DenseOp out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

DenseOp sigma_x() {
    DenseOp m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
DenseOp sigma_y() {
    DenseOp m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}
DenseOp sigma_z() {
    DenseOp m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

DenseOp site_op(const DenseOp& op, int site, int sites) {
    DenseOp out = DenseOp::Identity(1, 1);
    for (int j = 0; j < sites; ++j) out = kron(out, j == site ? op : DenseOp::Identity(2, 2));
    return out;
}

DenseOp herm_exp(const DenseOp& h) {
    Eigen::SelfAdjointEigenSolver<DenseOp> es(h);
    return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
           es.eigenvectors().adjoint();
}

void check_dim(long dim) {
    if (dim > max_dense_dim())
        throw resource_error("TooLarge", "dense oracle dimension " + std::to_string(dim) +
                                             " exceeds the configured cap");
}

} // namespace

int max_dense_dim() {
    if (const char* env = std::getenv("XYMPS_MAX_DIM")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<int>(v);
    }
    return 1 << 14;
}

DenseOp dense_v(int sites, const model::ModelPoint& p) {
    if (sites > 8) throw resource_error("TooLarge", "dense_v supports at most 8 sites");
    check_dim(1L << sites);
    const int d = 1 << sites;
    DenseOp field = DenseOp::Zero(d, d), bonds = DenseOp::Zero(d, d);
    for (int n = 0; n < sites; ++n) field += site_op(sigma_z(), n, sites);
    for (int n = 0; n < sites; ++n)
        bonds += site_op(sigma_x(), n, sites) * site_op(sigma_x(), (n + 1) % sites, sites);
    DenseOp v1h = herm_exp((0.5 * p.k1bar * field).eval());
    DenseOp v2 = herm_exp((p.k2 * bonds).eval());
    return v1h * v2 * v1h;
}

DenseOp dense_v_mpo(int sites, const model::ModelPoint& p) {
    check_dim(1L << sites);
    // site tensor O = sum_s C^s (bond) (x) X^s (physical)
    Eigen::Matrix2cd c0, c1, x0, x1;
    const double r2 = std::sqrt(2.0);
    c0 << r2 * std::cosh(p.k2), 0, 0, r2 * std::sinh(p.k2);
    c1 << 0, std::sqrt(std::sinh(2 * p.k2)), std::sqrt(std::sinh(2 * p.k2)), 0;
    x0 << r2 * std::cosh(p.k1), 0, 0, r2 * std::sinh(p.k1);
    x1 << 0, std::sqrt(std::sinh(2 * p.k1)), std::sqrt(std::sinh(2 * p.k1)), 0;

    // contract Tr over the bond index: accumulate a (2 x 2) x (2^n x 2^n) object
    const int d = 1 << sites;
    std::vector<DenseOp> acc(4); // bond-indexed blocks acc[b_out*2+b_in] of physical ops
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            acc[a * 2 + b] = (a == b) ? DenseOp(DenseOp::Identity(1, 1)) : DenseOp(DenseOp::Zero(1, 1));
    for (int site = 0; site < sites; ++site) {
        std::vector<DenseOp> next(4, DenseOp::Zero(acc[0].rows() * 2, acc[0].cols() * 2));
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int m = 0; m < 2; ++m) {
                    // bond matrices: C^0 diagonal, C^1 off-diagonal
                    const Eigen::Matrix2cd& cm = (m == 0) ? c0 : c1;
                    const Eigen::Matrix2cd& xm = (m == 0) ? x0 : x1;
                    for (int mid = 0; mid < 2; ++mid)
                        if (cm(a, mid) != Complex(0, 0))
                            next[a * 2 + b] += cm(a, mid) * kron(acc[mid * 2 + b], xm);
                }
        acc = std::move(next);
    }
    DenseOp v = acc[0] + acc[3]; // trace over the bond
    (void)d;
    return v;
}

DenseOp dense_hxy(int sites, const model::ModelPoint& p) {
    check_dim(1L << sites);
    const int d = 1 << sites;
    DenseOp h = DenseOp::Zero(d, d);
    for (int n = 0; n < sites; ++n) {
        const int m = (n + 1) % sites;
        h -= 0.5 * (1.0 + p.gamma) * site_op(sigma_x(), n, sites) * site_op(sigma_x(), m, sites);
        h -= 0.5 * (1.0 - p.gamma) * site_op(sigma_y(), n, sites) * site_op(sigma_y(), m, sites);
        h -= p.g * site_op(sigma_z(), n, sites);
    }
    return h;
}

DenseOp parity_operator(int sites) {
    DenseOp out = DenseOp::Identity(1, 1);
    for (int j = 0; j < sites; ++j) out = kron(out, sigma_z());
    return out;
}

DenseOp dense_transfer(int half_length, const model::ModelPoint& p, transfer::Flavor flavor) {
    const int l = half_length;
    if (l > 6) throw resource_error("TooLarge", "dense_transfer supports at most 6 half-sites");
    check_dim(1L << (2 * l));
    const int d = 1 << l;
    DenseOp field = DenseOp::Zero(d, d), bonds = DenseOp::Zero(d, d);
    for (int n = 0; n < l; ++n) field += site_op(sigma_z(), n, l);
    for (int n = 0; n + 1 < l; ++n)
        bonds += site_op(sigma_x(), n, l) * site_op(sigma_x(), n + 1, l);
    DenseOp u1h = herm_exp((0.5 * p.k2bar * field).eval());
    DenseOp u2 = (l > 1) ? herm_exp((p.k1 * bonds).eval()) : DenseOp::Identity(d, d);
    DenseOp a0 = std::sqrt(std::cosh(p.k1)) * u1h * u2 * u1h;
    DenseOp a1 = std::sqrt(std::sinh(p.k1)) * u1h * site_op(sigma_x(), 0, l) * u2 * u1h;
    const double sz0 = (flavor == transfer::Flavor::plain) ? 1.0 : -1.0;
    return kron(a0.conjugate(), a0) + sz0 * kron(a1.conjugate(), a1);
}

std::vector<DenseOp> dense_majoranas(int half_length) {
    const int l = half_length;
    if (l > 4) throw resource_error("TooLarge", "dense Majorana strings capped at 4 half-sites");
    check_dim(1L << (2 * l));
    const int n = 2 * l;
    // chain position p -> kron slot: ket half reversed occupies slots l..2l-1
    std::vector<int> slot(n);
    for (int p = 0; p < n; ++p) slot[p] = (p < l) ? (2 * l - 1 - p) : (p - l);

    std::vector<DenseOp> cm;
    cm.reserve(2 * n);
    for (int p = 0; p < n; ++p) {
        DenseOp string = DenseOp::Identity(1, 1);
        std::vector<DenseOp> ops(n, DenseOp::Identity(2, 2));
        for (int q = 0; q < p; ++q) ops[slot[q]] = sigma_z();
        auto build = [&](const DenseOp& local, double sign) {
            std::vector<DenseOp> o = ops;
            o[slot[p]] = local;
            DenseOp out = DenseOp::Identity(1, 1);
            for (int j = 0; j < n; ++j) out = kron(out, o[j]);
            return (sign * out).eval();
        };
        cm.push_back(build(sigma_x(), 1.0));  // c_{2p+1} = string * tau^x
        cm.push_back(build(sigma_y(), -1.0)); // c_{2p+2} = i(c - c^dag) = -string * tau^y
    }
    return cm;
}

Eigen::MatrixXd dense_covariance(const DenseVec& phi, int half_length) {
    auto cm = dense_majoranas(half_length);
    const int n = static_cast<int>(cm.size());
    Eigen::MatrixXd b(n, n);
    std::vector<DenseVec> cphi(n);
    for (int j = 0; j < n; ++j) cphi[j] = cm[j] * phi;
    for (int a = 0; a < n; ++a)
        for (int b2 = 0; b2 < n; ++b2) {
            const Complex val = cphi[a].dot(cphi[b2]); // <phi|c_a c_b|phi> via c_a^dag = c_a
            b(a, b2) = (a == b2) ? 0.0 : val.imag();
        }
    return b;
}

DenseOp dense_rdm_half(const DenseVec& phi, int half_length) {
    const int d = 1 << half_length;
    // kron(bra, ket): index = i_bra * d + i_ket; col-major map -> M(ket, bra)
    Eigen::Map<const DenseOp> m(phi.data(), d, d);
    DenseOp rho = m * m.adjoint();
    rho /= rho.trace();
    return rho;
}

Eigen::VectorXd dense_spectrum(const DenseOp& op) {
    Eigen::SelfAdjointEigenSolver<DenseOp> es(op);
    return es.eigenvalues().reverse();
}

DenseVec dominant_eigenvector(const DenseOp& op) {
    Eigen::SelfAdjointEigenSolver<DenseOp> es(op);
    return es.eigenvectors().col(op.rows() - 1);
}

DenseTruncation dense_truncate(int half_length, int chi, const model::ModelPoint& point) {
    const int l = half_length;
    if (chi < 1 || chi > l)
        throw domain_error("DomainError", "need 1 <= chi <= half_length");
    check_dim(1L << (2 * l));
    DenseOp t = dense_transfer(l, point, transfer::Flavor::plain);
    DenseVec phi = dominant_eigenvector(t);

    // f-modes per half from the covariance, using Eigen's solver only
    Eigen::MatrixXd b = dense_covariance(phi, l);
    auto cm = dense_majoranas(l);
    const int nh = 2 * l;

    std::vector<DenseOp> number_ops; // one per discarded mode, both halves
    for (int half = 0; half < 2; ++half) {
        Eigen::MatrixXd bh = b.block(half * nh, half * nh, nh, nh);
        DenseOp ib = Complex(0, 1) * bh.cast<Complex>();
        Eigen::SelfAdjointEigenSolver<DenseOp> es(ib);
        // modes ordered by |tanh delta| ascending = most entangled first
        std::vector<std::pair<double, int>> order;
        for (int i = 0; i < nh; ++i)
            if (es.eigenvalues()(i) > 0) order.emplace_back(es.eigenvalues()(i), i);
        std::sort(order.begin(), order.end());
        for (int m = chi; m < l; ++m) {
            const int idx = order[m].second;
            DenseVec v = es.eigenvectors().col(idx);
            Eigen::VectorXd x = std::sqrt(2.0) * v.real(), y = std::sqrt(2.0) * v.imag();
            DenseOp fm1 = DenseOp::Zero(cm[0].rows(), cm[0].cols());
            DenseOp fm2 = fm1;
            for (int a = 0; a < nh; ++a) {
                fm1 += x[a] * cm[half * nh + a];
                fm2 += y[a] * cm[half * nh + a];
            }
            // B x = t y orientation makes (x, y) the canonical pair; the empty
            // state of the mode has i f1 f2 = +1 on it
            number_ops.push_back(0.5 * (DenseOp::Identity(fm1.rows(), fm1.cols()) -
                                        Complex(0, 1) * fm1 * fm2));
        }
    }

    // joint kernel of all discarded number operators
    DenseOp acc = DenseOp::Zero(t.rows(), t.cols());
    for (const auto& nop : number_ops) acc += nop.adjoint() * nop;
    Eigen::SelfAdjointEigenSolver<DenseOp> es(acc);
    const int keep_dim = 1 << (2 * chi);
    for (int j = 0; j < keep_dim; ++j)
        if (es.eigenvalues()(j) > 1e-9)
            throw numeric_error("ProjectionFailure", "kept subspace has wrong dimension");
    DenseOp isometry = es.eigenvectors().leftCols(keep_dim);

    DenseTruncation out;
    out.transfer = isometry.adjoint() * t * isometry;
    out.transfer_sigma_z =
        isometry.adjoint() * dense_transfer(l, point, transfer::Flavor::sigma_z) * isometry;
    return out;
}

} // namespace xymps::oracle
