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

#include "xymps/correlations.hpp"

#include <cmath>

#include <lapacke.h>

#include "xymps/gaussian.hpp"

namespace xymps::correlations {

using majorana::Complex;
using majorana::Matrix;
using majorana::RealMatrix;
using CVector = Eigen::VectorXcd;

namespace {

constexpr double kZeroModeTol = 1e-7;

/// Everything needed for Wick contractions on the dominant eigenvector:
/// mode energies, canonical pair components on a row window of Majorana
/// indices, and the covariance block on that window.
struct Frame {
    transfer::TransferSpec spec;
    Eigen::Index rows = 0; ///< stored Majorana index range [0, rows)
    Vector energies;       ///< ascending
    RealMatrix comp;       ///< rows x (2 n_modes), canonical pairs (w1, w2)
    RealMatrix b;          ///< pure-state covariance on the row window
    bool zero_mode = false;

    Eigen::Index n_modes() const { return energies.size(); }

    CVector alpha(Eigen::Index n) const { // creation coefficients on the window
        return 0.5 * (comp.col(2 * n).cast<Complex>() +
                      Complex(0, 1) * comp.col(2 * n + 1).cast<Complex>());
    }
    CVector abar(Eigen::Index n) const {
        return 0.5 * (comp.col(2 * n).cast<Complex>() -
                      Complex(0, 1) * comp.col(2 * n + 1).cast<Complex>());
    }
};

/// all canonical modes of the banded generator via a real banded eigensolve
/// of -Y^2; pairs are resolved by applying Y within each eigenvalue cluster
std::pair<Vector, RealMatrix> all_modes_banded(const transfer::TransferSpec& spec) {
    auto r = transfer::build_r_sparse(spec);
    banded::SparseReal y = r.imag().pruned(1e-300, 1.0);
    banded::SparseReal s = (y.transpose() * y).pruned(1e-300, 1.0);
    const Eigen::Index n = s.rows();

    int kd = 0;
    for (int k = 0; k < s.outerSize(); ++k)
        for (banded::SparseReal::InnerIterator it(s, k); it; ++it)
            kd = std::max<int>(kd, std::abs(int(it.row()) - int(it.col())));
    const int ldab = kd + 1;
    std::vector<double> band(static_cast<std::size_t>(ldab) * n, 0.0);
    for (int k = 0; k < s.outerSize(); ++k)
        for (banded::SparseReal::InnerIterator it(s, k); it; ++it)
            if (it.row() <= it.col())
                band[static_cast<std::size_t>(it.col()) * ldab + (kd + it.row() - it.col())] =
                    it.value();

    Vector evals(n);
    RealMatrix z(n, n);
    lapack_int info =
        LAPACKE_dsbevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n), kd, band.data(),
                       ldab, evals.data(), z.data(), static_cast<lapack_int>(n));
    if (info != 0)
        throw numeric_error("EigenFailure", "dsbevd failed with info " + std::to_string(info));

    Vector energies(n / 2);
    RealMatrix comp(n, n);
    Eigen::Index mode = 0;
    Eigen::Index i = 0;
    while (i < n) {
        // cluster of equal sinh^2
        Eigen::Index j = i + 1;
        while (j < n && std::abs(evals[j] - evals[i]) < 1e-11 * (1.0 + evals[i])) ++j;
        std::vector<Eigen::Index> group;
        for (Eigen::Index k = i; k < j; ++k) group.push_back(k);
        // greedy pairing within the cluster
        RealMatrix span(n, group.size());
        for (std::size_t c = 0; c < group.size(); ++c) span.col(c) = z.col(group[c]);
        Eigen::Index left = static_cast<Eigen::Index>(group.size());
        const double sinh_eps = std::sqrt(std::max(0.0, evals[i]));
        while (left >= 2) {
            Eigen::VectorXd x = span.col(0);
            x.normalize();
            Eigen::VectorXd yx = y * x;
            Eigen::VectorXd partner;
            if (yx.norm() > 1e-12) {
                partner = yx / yx.norm();
            } else {
                partner = span.col(1) -
                          x * (x.dot(span.col(1))); // zero mode: any orthonormal partner
                partner.normalize();
            }
            energies[mode] = std::asinh(sinh_eps);
            comp.col(2 * mode) = partner; // (w1, w2) with Y w2 = sinh w1
            comp.col(2 * mode + 1) = x;
            ++mode;
            // deflate the pair from the remaining span
            RealMatrix rest(n, left - 2);
            Eigen::Index c2 = 0;
            for (Eigen::Index c = 1; c < left; ++c) {
                Eigen::VectorXd v = span.col(c);
                v -= x * x.dot(v);
                v -= partner * partner.dot(v);
                if (v.norm() > 1e-8) {
                    if (c2 < rest.cols()) rest.col(c2++) = v.normalized();
                }
            }
            if (c2 != rest.cols())
                throw numeric_error("PairingFailure", "cluster deflation lost vectors");
            span = rest;
            left -= 2;
        }
        i = j;
    }
    if (mode != n / 2) throw numeric_error("PairingFailure", "unpaired covariance modes");
    // sort modes ascending (clusters already ascending, pairing kept order)
    return {std::move(energies), std::move(comp)};
}

Frame full_frame(const model::ModelPoint& point, int half_length) {
    transfer::TransferSpec spec{half_length, point, transfer::Flavor::plain};
    if (spec.chain_sites() > 2400)
        throw resource_error("TooLarge", "full contraction frame capped at 2400 chain sites");
    Frame f;
    f.spec = spec;
    f.rows = std::min<Eigen::Index>(spec.majorana_dim(), spec.chain_sites() + 2);
    auto [energies, comp] = all_modes_banded(spec);
    f.energies = std::move(energies);
    f.zero_mode = f.energies[0] < kZeroModeTol;
    f.comp = comp.topRows(f.rows);
    // B on the window from the pair structure: B = sum_m (w2 w1^T - w1 w2^T)
    f.b = RealMatrix::Zero(f.rows, f.rows);
    for (Eigen::Index m = 0; m < f.n_modes(); ++m)
        f.b.noalias() += f.comp.col(2 * m + 1) * f.comp.col(2 * m).transpose() -
                         f.comp.col(2 * m) * f.comp.col(2 * m + 1).transpose();
    return f;
}

Frame low_frame(const model::ModelPoint& point, int half_length, int n_modes) {
    transfer::TransferSpec spec{half_length, point, transfer::Flavor::plain};
    Frame f;
    f.spec = spec;
    f.rows = std::min<Eigen::Index>(spec.majorana_dim(), spec.chain_sites() + 2);
    auto modes = transfer::lowest_modes(spec, n_modes);
    f.energies = std::move(modes.energies);
    f.zero_mode = f.energies[0] < kZeroModeTol;
    f.comp = modes.rotation.topRows(f.rows);
    f.b = transfer::covariance_block(spec, 0, f.rows, 0, f.rows);
    f.b = 0.5 * (f.b - f.b.transpose()).eval();
    if (f.zero_mode) {
        // covariance from quadrature averages the degenerate pair; restore a
        // pure-state orientation on the zero mode for element evaluation
        const auto w1 = modes.rotation.col(0).head(f.rows);
        const auto w2 = modes.rotation.col(1).head(f.rows);
        f.b.noalias() += w2 * w1.transpose() - w1 * w2.transpose();
    }
    return f;
}

/// operator kinds entering Wick lists
struct Op {
    enum Kind { vec, create, annihilate } kind;
    CVector v;        // for vec: coefficients on the frame window
    Eigen::Index mode; // for create/annihilate
};

Op make_vec(CVector v) { return Op{Op::vec, std::move(v), -1}; }
Op make_create(Eigen::Index n) { return Op{Op::create, {}, n}; }
Op make_annihilate(Eigen::Index n) { return Op{Op::annihilate, {}, n}; }

Complex contract(const Frame& f, const Op& a, const Op& b) {
    using K = Op::Kind;
    if (a.kind == K::vec && b.kind == K::vec) {
        const Complex direct = (a.v.array() * b.v.array()).sum();
        const Complex cross = (a.v.array() * (f.b.cast<Complex>() * b.v).array()).sum();
        return direct + Complex(0, 1) * cross;
    }
    if (a.kind == K::vec && b.kind == K::create)
        return 2.0 * (a.v.array() * f.alpha(b.mode).array()).sum();
    if (a.kind == K::annihilate && b.kind == K::vec)
        return 2.0 * (f.abar(a.mode).array() * b.v.array()).sum();
    if (a.kind == K::annihilate && b.kind == K::create) return (a.mode == b.mode) ? 1.0 : 0.0;
    // every other combination annihilates one of the vacua
    return 0.0;
}

Complex wick_expectation(const Frame& f, const std::vector<Op>& ops) {
    gaussian::WickProduct w(static_cast<Eigen::Index>(ops.size()));
    for (std::size_t i = 0; i < ops.size(); ++i)
        for (std::size_t j = i + 1; j < ops.size(); ++j)
            w.set(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j),
                  contract(f, ops[i], ops[j]));
    return w.evaluate();
}

/// dressed interface vectors (0-based Majorana indices), chain of M sites
void interface_vectors(const Frame& f, CVector& v1, CVector& v2) {
    const int m = f.spec.chain_sites();
    const double ch = std::cosh(f.spec.point.k2bar), sh = std::sinh(f.spec.point.k2bar);
    v1 = CVector::Zero(f.rows);
    v2 = CVector::Zero(f.rows);
    v1[m - 1] = ch;
    v1[m - 2] = Complex(0, 1) * sh;
    v2[m] = ch;
    v2[m + 1] = Complex(0, -1) * sh;
}

/// string operator factors for the dressed spin at the interface sites:
/// head vector and the count of string Majoranas (0..count-1)
void string_head(const Frame& f, bool right_site, CVector& head, Eigen::Index& string_count) {
    const int m = f.spec.chain_sites();
    const double ch = std::cosh(f.spec.point.k2bar), sh = std::sinh(f.spec.point.k2bar);
    head = CVector::Zero(f.rows);
    if (!right_site) {
        string_count = m - 2;
        head[m - 2] = ch;
        head[m - 1] = Complex(0, -1) * sh;
    } else {
        string_count = m;
        head[m] = ch;
        head[m + 1] = Complex(0, -1) * sh;
    }
}

/// <phi| tau_site prod(a^dag) |phi> and <phi| prod(a) tau_site |phi>
Complex string_element(const Frame& f, bool right_site, const std::vector<Eigen::Index>& modes,
                       bool bra_side) {
    CVector head;
    Eigen::Index nstr = 0;
    string_head(f, right_site, head, nstr);
    std::vector<Op> ops;
    ops.reserve(nstr + 1 + modes.size());
    if (bra_side)
        for (auto it = modes.rbegin(); it != modes.rend(); ++it) ops.push_back(make_annihilate(*it));
    for (Eigen::Index i = 0; i < nstr; ++i) {
        CVector e = CVector::Zero(f.rows);
        e[i] = 1.0;
        ops.push_back(make_vec(std::move(e)));
    }
    ops.push_back(make_vec(head));
    if (!bra_side)
        for (auto m : modes) ops.push_back(make_create(m));
    // the string prefactor prod (i tau^z) contributes i^(nstr/2) per site pair
    const Complex phase = std::pow(Complex(0, 1), static_cast<double>(nstr / 2));
    return phase * wick_expectation(f, ops);
}

struct QElements {
    Complex ket; ///< <phi| Q |alpha>
    Complex bra; ///< <alpha| Q |phi>
};

QElements q_string_elements(const Frame& f, OpPair op, const std::vector<Eigen::Index>& modes) {
    const double k1 = f.spec.point.k1;
    QElements out;
    if (op == OpPair::xx) {
        const double q = std::sqrt(1.0 - std::exp(-4.0 * k1)) / 2.0;
        out.ket = q * (string_element(f, false, modes, false) + string_element(f, true, modes, false));
        out.bra = q * (string_element(f, false, modes, true) + string_element(f, true, modes, true));
    } else {
        const Complex q = Complex(0, 1) * std::sqrt(std::exp(4.0 * k1) - 1.0) / 2.0;
        out.ket = q * (string_element(f, false, modes, false) - string_element(f, true, modes, false));
        out.bra = q * (string_element(f, false, modes, true) - string_element(f, true, modes, true));
    }
    return out;
}

void fill_mode_data(FormFactorTable& t, const Frame& f) {
    const Eigen::Index n = f.n_modes();
    t.mode_energies = f.energies;
    t.mode_momenta.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (f.energies[i] < kZeroModeTol && f.zero_mode) {
            t.mode_momenta[i] = 0.0;
            continue;
        }
        try {
            t.mode_momenta[i] = model::invert_dispersion_tf(f.energies[i], f.spec.point);
        } catch (const Error&) {
            t.mode_momenta[i] = (f.energies[i] < f.spec.point.gap()) ? 0.0 : M_PI;
        }
    }
}

FormFactorTable zz_two_particle(const Frame& f) {
    FormFactorTable t;
    t.op_pair = OpPair::zz;
    t.band = Band::two_particle;
    t.half_length = f.spec.half_length;
    t.degeneracy = f.zero_mode ? 2 : 1;
    fill_mode_data(t, f);

    CVector v1, v2;
    interface_vectors(f, v1, v2);
    const double s2 = std::sinh(2.0 * f.spec.point.k1);
    const Eigen::Index n = f.n_modes();

    // vectorized contractions: 2 v^T alpha_n and 2 abar_n^T v
    CVector cv1a(n), cv2a(n), cb1(n), cb2(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        cv1a[m] = 2.0 * (v1.array() * f.alpha(m).array()).sum();
        cv2a[m] = 2.0 * (v2.array() * f.alpha(m).array()).sum();
        cb1[m] = 2.0 * (f.abar(m).array() * v1.array()).sum();
        cb2[m] = 2.0 * (f.abar(m).array() * v2.array()).sum();
    }
    const Complex mi_s2 = Complex(0, -1) * s2;

    // ferromagnetic mixing terms through the second dominant vector
    Complex z_v1a0 = 0, z_v2a0 = 0, z_b10 = 0, z_b20 = 0;
    if (f.zero_mode) {
        z_v1a0 = cv1a[0];
        z_v2a0 = cv2a[0];
        z_b10 = cb1[0];
        z_b20 = cb2[0];
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            // <phi| Qz a+_i a+_j |phi>: ordered (v1, v2, a+_i, a+_j)
            Complex ket = mi_s2 * (-cv1a[i] * cv2a[j] + cv1a[j] * cv2a[i]);
            // <phi| a_j a_i Qz |phi>: ordered (a_j, a_i, v1, v2)
            Complex bra = mi_s2 * (-cb1[j] * cb2[i] + cb2[j] * cb1[i]);
            double weight;
            if (!f.zero_mode) {
                weight = (ket * bra).real();
            } else {
                // average over the two degenerate dominant vectors
                Complex ket2, bra2;
                if (i == 0 || j == 0) {
                    // pair includes the boundary mode: second-vector elements
                    // vanish by occupation, first-vector as usual
                    ket2 = 0;
                    bra2 = 0;
                } else {
                    // <vac| a_0 Qz a+_i a+_j a+_0 |vac>, 6-operator pfaffian;
                    // only the quadratic part contributes
                    gaussian::WickProduct w(6);
                    // order: a_0, v1, v2, a+_i, a+_j, a+_0
                    w.set(0, 1, z_b10);
                    w.set(0, 2, z_b20);
                    w.set(0, 5, 1.0);
                    w.set(1, 2, (v1.array() * v2.array()).sum() +
                                    Complex(0, 1) *
                                        (v1.array() * (f.b.cast<Complex>() * v2).array()).sum());
                    w.set(1, 3, cv1a[i]);
                    w.set(1, 4, cv1a[j]);
                    w.set(1, 5, z_v1a0);
                    w.set(2, 3, cv2a[i]);
                    w.set(2, 4, cv2a[j]);
                    w.set(2, 5, z_v2a0);
                    ket2 = mi_s2 * w.evaluate();
                    // bra: <vac| a_0 a_j a_i Qz a+_0 |vac>
                    gaussian::WickProduct wb(6);
                    // order: a_0, a_j, a_i, v1, v2, a+_0
                    wb.set(0, 3, z_b10);
                    wb.set(0, 4, z_b20);
                    wb.set(0, 5, 1.0);
                    wb.set(1, 3, cb1[j]);
                    wb.set(1, 4, cb2[j]);
                    wb.set(2, 3, cb1[i]);
                    wb.set(2, 4, cb2[i]);
                    wb.set(3, 4, (v1.array() * v2.array()).sum() +
                                     Complex(0, 1) *
                                         (v1.array() * (f.b.cast<Complex>() * v2).array()).sum());
                    wb.set(3, 5, z_v1a0);
                    wb.set(4, 5, z_v2a0);
                    bra2 = mi_s2 * wb.evaluate();
                }
                weight = 0.5 * (ket * bra).real() + 0.5 * (ket2 * bra2).real();
            }
            t.labels.push_back({static_cast<int>(i + 1), static_cast<int>(j + 1), 0});
            t.weights.push_back(weight);
            t.energies.push_back(f.energies[i] + f.energies[j]);
        }
    }
    return t;
}

FormFactorTable string_band(const Frame& f, OpPair op, Band band, int n_take) {
    FormFactorTable t;
    t.op_pair = op;
    t.band = band;
    t.half_length = f.spec.half_length;
    t.degeneracy = f.zero_mode ? 2 : 1;
    fill_mode_data(t, f);

    const Eigen::Index n = std::min<Eigen::Index>(n_take, f.n_modes());
    if (band == Band::one_particle) {
        for (Eigen::Index m = 0; m < n; ++m) {
            auto el = q_string_elements(f, op, {m});
            double weight = (el.ket * el.bra).real();
            if (f.zero_mode) weight *= 0.5; // second dominant vector gives zero by parity
            t.labels.push_back({static_cast<int>(m + 1), 0, 0});
            t.weights.push_back(weight);
            t.energies.push_back(f.energies[m]);
        }
        return t;
    }
    if (band != Band::three_with_zero_mode)
        throw domain_error("UnsupportedBand", "xx/yy tables cover the one-particle and "
                                              "zero-mode-dressed two-particle bands");
    if (!f.zero_mode)
        throw domain_error("UnsupportedBand",
                           "the zero-mode band needs a ferromagnetic point");
    // alpha = {i, j, zero}: both dominant vectors contribute; the second one
    // couples to the plain {i, j} excitation at the same energy
    for (Eigen::Index i = 1; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            auto e3 = q_string_elements(f, op, {0, i, j});
            // <phi2|Q|{i,j}>: insert the zero-mode pair around the element
            CVector head;
            // build directly: <vac| a_0 Q a+_i a+_j a+_0 ... equals by Wick the
            // same string element with modes {0 -> annihilator on the left};
            // assemble via explicit operator lists for both tau sites
            auto elem2 = [&](bool bra_side) {
                const double k1 = f.spec.point.k1;
                Complex accum = 0;
                for (int site = 0; site < 2; ++site) {
                    CVector h;
                    Eigen::Index nstr = 0;
                    string_head(f, site == 1, h, nstr);
                    std::vector<Op> ops;
                    ops.push_back(make_annihilate(0));
                    if (bra_side) {
                        ops.push_back(make_annihilate(j));
                        ops.push_back(make_annihilate(i));
                    }
                    for (Eigen::Index q2 = 0; q2 < nstr; ++q2) {
                        CVector e = CVector::Zero(f.rows);
                        e[q2] = 1.0;
                        ops.push_back(make_vec(std::move(e)));
                    }
                    ops.push_back(make_vec(h));
                    if (!bra_side) {
                        ops.push_back(make_create(i));
                        ops.push_back(make_create(j));
                    }
                    ops.push_back(make_create(0));
                    const Complex phase = std::pow(Complex(0, 1), static_cast<double>(nstr / 2));
                    Complex val = phase * wick_expectation(f, ops);
                    if (op == OpPair::xx) {
                        accum += std::sqrt(1.0 - std::exp(-4.0 * k1)) / 2.0 * val;
                    } else {
                        const Complex q = Complex(0, 1) * std::sqrt(std::exp(4.0 * k1) - 1.0) / 2.0;
                        accum += (site == 0 ? q : -q) * val;
                    }
                }
                return accum;
            };
            const Complex ket2 = elem2(false), bra2 = elem2(true);
            const double weight = 0.5 * (e3.ket * e3.bra).real() + 0.5 * (ket2 * bra2).real();
            t.labels.push_back({1, static_cast<int>(i + 1), static_cast<int>(j + 1)});
            t.weights.push_back(weight);
            t.energies.push_back(f.energies[i] + f.energies[j]); // zero mode adds nothing
        }
    }
    return t;
}

} // namespace

FormFactorTable exact_form_factors(const model::ModelPoint& point, int half_length, OpPair op,
                                   Band band, int n_take) {
    if (op == OpPair::zz) {
        if (band != Band::two_particle)
            throw domain_error("UnsupportedBand",
                               "zz couples the vacuum to two-particle states only");
        Frame f = full_frame(point, half_length);
        return zz_two_particle(f);
    }
    const int defaults = (band == Band::one_particle) ? 48 : 14;
    const int take = (n_take > 0) ? n_take : defaults;
    transfer::TransferSpec probe{half_length, point, transfer::Flavor::plain};
    Frame f = (probe.chain_sites() <= 900 && take > probe.chain_sites() / 4)
                  ? full_frame(point, half_length)
                  : low_frame(point, half_length, take);
    return string_band(f, op, band, take);
}

CorrelationCurve correlation_curve(const FormFactorTable& table, const std::vector<double>& rs) {
    if (table.weights.empty())
        throw domain_error("DomainError", "empty form factor table");
    CorrelationCurve out;
    out.distances = rs;
    out.method = "band_sum";
    out.values.reserve(rs.size());
    for (double r : rs) {
        double acc = 0.0;
        for (std::size_t i = 0; i < table.weights.size(); ++i)
            acc += table.weights[i] * std::exp(-table.energies[i] * r);
        out.values.push_back(acc);
    }
    return out;
}

Asymptotics closed_form_asymptotics(const model::ModelPoint& point, OpPair op) {
    Asymptotics a;
    const bool critical = point.is_critical(1e-9);
    const double gap = point.gap();
    if (critical) {
        if (op != OpPair::zz)
            throw domain_error("NotCovered",
                               "critical xx/yy asymptotics involve every band");
        a.prefactor = 1.0 / (M_PI * M_PI);
        a.power = 2.0;
        a.rate = 0.0;
        a.prefactor_known = true;
        return a;
    }
    if (!point.is_ferromagnetic()) { // paramagnetic
        switch (op) {
            case OpPair::zz:
                a.prefactor = 1.0 / (2.0 * M_PI);
                a.power = 2.0;
                a.rate = 2.0 * gap;
                a.prefactor_known = true;
                break;
            case OpPair::xx:
                a.power = 0.5;
                a.rate = gap;
                break;
            case OpPair::yy:
                a.power = 1.5;
                a.rate = gap;
                break;
        }
        return a;
    }
    switch (op) { // ferromagnetic
        case OpPair::xx:
            a.power = 2.0;
            a.rate = 2.0 * gap;
            break;
        case OpPair::yy:
            a.power = 3.0;
            a.rate = 2.0 * gap;
            break;
        case OpPair::zz:
            a.power = 2.0;
            a.rate = 2.0 * gap;
            break;
    }
    return a;
}

double magnetization(const model::ModelPoint& point, int half_length) {
    transfer::TransferSpec spec{half_length, point, transfer::Flavor::plain};
    const int m = spec.chain_sites();
    RealMatrix b = transfer::covariance_block(spec, m - 2, m + 2, m - 2, m + 2);
    // v1 = ch c_{M} + i sh c_{M-1}; v2 = ch c_{M+1} - i sh c_{M+2} (1-based)
    const double ch = std::cosh(point.k2bar), sh = std::sinh(point.k2bar);
    CVector v1(4), v2(4);
    v1 << Complex(0, 1) * sh, ch, 0, 0;
    v2 << 0, 0, ch, Complex(0, -1) * sh;
    const Complex direct = (v1.array() * v2.array()).sum();
    const Complex cross = (v1.array() * (b.cast<Complex>() * v2).array()).sum();
    const Complex c12 = direct + Complex(0, 1) * cross;
    const Complex mz = std::cosh(2.0 * point.k1) - std::sinh(2.0 * point.k1) * Complex(0, 1) * c12;
    return mz.real();
}

CorrelationCurve string_corrected_correlation(const model::ModelPoint& point, int half_length,
                                              OpPair op, const std::vector<double>& rs) {
    if (op == OpPair::zz)
        throw domain_error("DomainError", "string correction applies to xx/yy correlators");
    transfer::TransferSpec spec{half_length, point, transfer::Flavor::plain};
    const int m = spec.chain_sites();
    const Eigen::Index dim = spec.majorana_dim();
    int rmax = 0;
    for (double r : rs) rmax = std::max(rmax, static_cast<int>(std::lround(r)));
    const Eigen::Index window = std::min<Eigen::Index>(dim, m + 2 + 3 * (rmax + 2));
    if (window > 6000)
        throw resource_error("TooLarge", "string-corrected correlator window too large");

    // averaged-state covariance on the window (the quadrature zeroes any
    // degenerate boundary mode, which is exactly the trace average)
    RealMatrix b = transfer::covariance_block(spec, 0, window, 0, window);
    b = 0.5 * (b - b.transpose()).eval();
    auto rmat = transfer::build_r_sparse(spec);

    // local vectors
    const double ch = std::cosh(point.k2bar), sh = std::sinh(point.k2bar);
    CVector v1 = CVector::Zero(window), v2 = CVector::Zero(window);
    v1[m - 1] = ch;
    v1[m - 2] = Complex(0, 1) * sh;
    v2[m] = ch;
    v2[m + 1] = Complex(0, -1) * sh;

    const double t2 = std::tanh(2.0 * point.k1);
    const double c2 = std::cosh(2.0 * point.k1);
    const double qx = std::sqrt(1.0 - std::exp(-4.0 * point.k1)) / 2.0;
    const Complex qy = Complex(0, 1) * std::sqrt(std::exp(4.0 * point.k1) - 1.0) / 2.0;

    auto contract_vec = [&](const CVector& a, const CVector& c) {
        const Complex direct = (a.array() * c.array()).sum();
        const Complex cross = (a.array() * (b.cast<Complex>() * c).array()).sum();
        return direct + Complex(0, 1) * cross;
    };

    CorrelationCurve out;
    out.method = "string_band";
    out.distances = rs;
    for (double rd : rs) {
        const int r = static_cast<int>(std::lround(rd));
        if (r < 0) throw domain_error("DomainError", "distances must be non-negative");
        if (r == 0) {
            out.values.push_back(1.0);
            continue;
        }
        // operator list: Q_o, (1 - tanh i v1 v2)^(s), s = 1..r-1, Q_o^(r)
        // strings evolved by powers of the transformation matrix
        std::vector<CVector> evolved; // v1^(s), v2^(s) for s = 1..r-1
        Eigen::VectorXcd full1 = CVector::Zero(dim), full2 = CVector::Zero(dim);
        full1.head(window) = v1;
        full2.head(window) = v2;
        for (int s = 1; s <= r - 1; ++s) {
            full1 = rmat * full1;
            full2 = rmat * full2;
            evolved.push_back(full1.head(window));
            evolved.push_back(full2.head(window));
        }
        // right Q at time r: transform the string one Majorana at a time
        Eigen::MatrixXcd trans = Eigen::MatrixXcd::Zero(dim, m + 2);
        for (Eigen::Index q2 = 0; q2 < m + 2; ++q2) trans(q2, q2) = 1.0;
        for (int s = 0; s < r; ++s) trans = rmat * trans;

        double total = 0.0;
        for (int site_l = 0; site_l < 2; ++site_l) {
            for (int site_r = 0; site_r < 2; ++site_r) {
                // left operator string
                std::vector<CVector> left_ops;
                const Eigen::Index nstr_l = (site_l == 0) ? m - 2 : m;
                for (Eigen::Index q2 = 0; q2 < nstr_l; ++q2) {
                    CVector e = CVector::Zero(window);
                    e[q2] = 1.0;
                    left_ops.push_back(std::move(e));
                }
                CVector head_l = CVector::Zero(window);
                if (site_l == 0) {
                    head_l[m - 2] = ch;
                    head_l[m - 1] = Complex(0, -1) * sh;
                } else {
                    head_l[m] = ch;
                    head_l[m + 1] = Complex(0, -1) * sh;
                }
                left_ops.push_back(head_l);
                // right operator string, evolved
                std::vector<CVector> right_ops;
                const Eigen::Index nstr_r = (site_r == 0) ? m - 2 : m;
                for (Eigen::Index q2 = 0; q2 < nstr_r; ++q2)
                    right_ops.push_back(trans.col(q2).head(window));
                CVector head_r;
                if (site_r == 0)
                    head_r = ch * trans.col(m - 2).head(window) -
                             Complex(0, 1) * sh * trans.col(m - 1).head(window);
                else
                    head_r = ch * trans.col(m).head(window) -
                             Complex(0, 1) * sh * trans.col(m + 1).head(window);
                right_ops.push_back(head_r);

                const std::size_t n_ops = left_ops.size() + evolved.size() + right_ops.size();
                gaussian::WickProduct w(static_cast<Eigen::Index>(n_ops));
                std::vector<const CVector*> all;
                all.reserve(n_ops);
                for (const auto& o : left_ops) all.push_back(&o);
                for (const auto& o : evolved) all.push_back(&o);
                for (const auto& o : right_ops) all.push_back(&o);
                for (std::size_t i = 0; i < n_ops; ++i)
                    for (std::size_t j = i + 1; j < n_ops; ++j)
                        w.set(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j),
                              contract_vec(*all[i], *all[j]));
                // modified same-pair contractions for the binomial insertions:
                // (1 - t i v1 v2) = (-t i) (v1 v2 + i/t)
                const std::size_t off = left_ops.size();
                for (int s = 0; s < r - 1; ++s)
                    w.add(static_cast<Eigen::Index>(off + 2 * s),
                          static_cast<Eigen::Index>(off + 2 * s + 1), Complex(0, 1) / t2);

                Complex phase = std::pow(Complex(0, 1), static_cast<double>(nstr_l / 2)) *
                                std::pow(Complex(0, 1), static_cast<double>(nstr_r / 2));
                Complex coeff;
                if (op == OpPair::xx)
                    coeff = qx * qx;
                else
                    coeff = qy * ((site_l == 0) ? 1.0 : -1.0) * qy * ((site_r == 0) ? 1.0 : -1.0);
                Complex val = coeff * phase * std::pow(c2, r - 1) *
                              std::pow(Complex(0, -1) * t2, r - 1) * w.evaluate();
                total += val.real();
            }
        }
        out.values.push_back(total);
    }
    return out;
}

TruncatedFormFactors truncated_form_factors(const truncation::TruncatedTransfer& tt,
                                            const model::ModelPoint& point, int half_length) {
    if (!tt.r_tilde_sigma_z.has_value())
        throw domain_error("NormalizationFailure",
                           "truncated table needs the sigma_z companion");
    const int chi = tt.chi;
    const Eigen::Index nk = 4 * chi; // majorana dimension of the kept space

    // sigma_z companion in the canonical (d-mode) basis
    Matrix rz = *tt.r_tilde_sigma_z;
    // dirac -> majorana conversion, then rotate by the canonical pairs
    Matrix rz_maj(nk, nk);
    {
        Eigen::Matrix2cd d, dinv;
        d << Complex(0.5, 0), Complex(0.5, 0), Complex(0, -0.5), Complex(0, 0.5);
        dinv << Complex(1, 0), Complex(0, 1), Complex(1, 0), Complex(0, -1);
        Matrix tmp(nk, nk);
        for (Eigen::Index j = 0; j < nk / 2; ++j) tmp.middleCols(2 * j, 2) = rz.middleCols(2 * j, 2) * dinv;
        for (Eigen::Index i = 0; i < nk / 2; ++i) rz_maj.middleRows(2 * i, 2) = d * tmp.middleRows(2 * i, 2);
    }
    Matrix rz_d = tt.mode_rotation.transpose().cast<Complex>() * rz_maj *
                  tt.mode_rotation.cast<Complex>();
    Matrix g = gaussian::thermal_two_point(rz_d);

    // d-operator coefficient vectors in the canonical basis
    auto d_ann = [&](int mode) {
        CVector v = CVector::Zero(nk);
        v[2 * mode] = 0.5;
        v[2 * mode + 1] = Complex(0, -0.5);
        return v;
    };
    auto d_cre = [&](int mode) {
        CVector v = CVector::Zero(nk);
        v[2 * mode] = 0.5;
        v[2 * mode + 1] = Complex(0, 0.5);
        return v;
    };
    auto gcontract = [&](const CVector& a, const CVector& b2) {
        return (a.array() * (g * b2).array()).sum();
    };

    const int nm = 2 * chi;
    // ground-projector string: d_1 d+_1 ... d_nm d+_nm
    std::vector<CVector> proj;
    for (int m2 = 0; m2 < nm; ++m2) {
        proj.push_back(d_ann(m2));
        proj.push_back(d_cre(m2));
    }
    auto wick_with_prefix = [&](const std::vector<CVector>& prefix,
                                const std::vector<CVector>& suffix) {
        std::vector<const CVector*> ops;
        for (const auto& p : prefix) ops.push_back(&p);
        for (const auto& p : proj) ops.push_back(&p);
        for (const auto& p : suffix) ops.push_back(&p);
        gaussian::WickProduct w(static_cast<Eigen::Index>(ops.size()));
        for (std::size_t i = 0; i < ops.size(); ++i)
            for (std::size_t j = i + 1; j < ops.size(); ++j)
                w.set(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j),
                      gcontract(*ops[i], *ops[j]));
        return w.evaluate();
    };

    // normalization through the magnetization
    const Complex w0 = wick_with_prefix({}, {});
    const double mz = magnetization(point, half_length);
    if (std::abs(w0) < 1e-14)
        throw numeric_error("NormalizationFailure", "vanishing projector weight");
    const Complex scale = mz / w0;

    TruncatedFormFactors out;
    out.chi = chi;
    out.energies = tt.energies;
    out.magnetization_exact = mz;
    for (int m1 = 0; m1 < nm; ++m1) {
        for (int m2 = m1 + 1; m2 < nm; ++m2) {
            // <phi~| T~z d+_m1 d+_m2 |phi~> = Tr[T~z P d_m2 d_m1]... assembled
            // as Tr[T~z d+_m1 d+_m2 P] and Tr[T~z P d_m2 d_m1]
            const Complex ket = wick_with_prefix({d_cre(m1), d_cre(m2)}, {}) * scale;
            const Complex bra = wick_with_prefix({}, {d_ann(m2), d_ann(m1)}) * scale;
            out.labels.push_back({m1 + 1, m2 + 1});
            out.values.push_back((ket * bra).real());
        }
    }
    return out;
}

TruncatedFormFactors renormalized_form_factors(const FormFactorTable& exact,
                                               const truncation::MomentaFit& fit,
                                               const Vector& truncated_energies) {
    if (exact.op_pair != OpPair::zz || exact.band != Band::two_particle)
        throw domain_error("DomainError", "renormalization uses the exact zz two-particle table");
    const Eigen::Index nm = fit.momenta.size();
    // windows (k_{m-1}, k_{m+1}) with boundary anchors 0 and pi
    auto window = [&](Eigen::Index m2) {
        const double lo = (m2 == 0) ? 0.0 : fit.momenta[m2 - 1];
        const double hi = (m2 + 1 < nm) ? fit.momenta[m2 + 1] : M_PI;
        return std::pair<double, double>(lo, hi);
    };

    TruncatedFormFactors out;
    out.chi = static_cast<int>(nm / 2);
    out.energies = truncated_energies;

    // iterate over exact pairs once, scatter into window pairs (ordered sum)
    std::vector<std::vector<double>> acc(nm, std::vector<double>(nm, 0.0));
    std::vector<std::vector<int>> cnt(nm, std::vector<int>(nm, 0));
    for (std::size_t e = 0; e < exact.weights.size(); ++e) {
        const int i = exact.labels[e][0] - 1, j = exact.labels[e][1] - 1;
        const double ki = exact.mode_momenta[i], kj = exact.mode_momenta[j];
        const double boltz = std::exp(-exact.mode_energies[i] - exact.mode_energies[j]);
        const double contribution = exact.weights[e] * boltz;
        for (Eigen::Index m1 = 0; m1 < nm; ++m1) {
            auto [lo1, hi1] = window(m1);
            const bool i_in_1 = (ki > lo1 && ki < hi1), j_in_1 = (kj > lo1 && kj < hi1);
            if (!i_in_1 && !j_in_1) continue;
            for (Eigen::Index m2 = 0; m2 < nm; ++m2) {
                auto [lo2, hi2] = window(m2);
                const bool i_in_2 = (ki > lo2 && ki < hi2), j_in_2 = (kj > lo2 && kj < hi2);
                double mult = 0.0;
                if (i_in_1 && j_in_2) mult += 1.0;
                if (j_in_1 && i_in_2) mult += 1.0;
                if (mult > 0) {
                    acc[m1][m2] += mult * contribution;
                    cnt[m1][m2] += 1;
                }
            }
        }
    }
    for (Eigen::Index m1 = 0; m1 < nm; ++m1)
        for (Eigen::Index m2 = m1 + 1; m2 < nm; ++m2) {
            if (cnt[m1][m2] == 0 && cnt[m2][m1] == 0)
                throw domain_error("EmptyWindow",
                                   "no exact momenta fall into a window pair; increase the chain");
            out.labels.push_back({static_cast<int>(m1 + 1), static_cast<int>(m2 + 1)});
            // symmetrized ordered sum: (m1, m2) and (m2, m1) integrations agree
            out.values.push_back(0.5 * (acc[m1][m2] + acc[m2][m1]));
        }
    return out;
}

} // namespace xymps::correlations
