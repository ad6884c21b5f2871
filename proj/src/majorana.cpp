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

#include "xymps/majorana.hpp"

#include <algorithm>
#include <cmath>

#include <lapacke.h>

namespace xymps::majorana {

namespace {

constexpr double kOverflowGuard = 350.0;

/// All eigenpairs of a Hermitian matrix via LAPACK (divide and conquer).
void heevd(Matrix& a, Vector& w) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    w.resize(n);
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
    if (info != 0)
        throw numeric_error("EigenFailure", "zheevd failed with info " + std::to_string(info));
}

struct ModePair {
    double value; // sinh(eps) or tanh(delta)
    Eigen::VectorXd first, second;
};

/// Extract canonical real pairs from the eigen-decomposition of i*S, S real skew.
/// For eigenvalue lam > 0 with eigenvector v = x + iy, the real plane (x, y) is
/// S-invariant with S x = lam y and S y = -lam x.
std::vector<ModePair> skew_pairs(const RealMatrix& s, double zero_tol) {
    const Eigen::Index n = s.rows();
    Matrix h = Complex(0.0, 1.0) * s.cast<Complex>();
    Vector w;
    heevd(h, w);

    std::vector<ModePair> pairs;
    std::vector<Eigen::Index> near_zero;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w[i] > zero_tol) {
            ModePair p;
            p.value = w[i];
            p.first = std::sqrt(2.0) * h.col(i).real();
            p.second = std::sqrt(2.0) * h.col(i).imag();
            pairs.push_back(std::move(p));
        } else if (std::abs(w[i]) <= zero_tol) {
            near_zero.push_back(i);
        }
    }
    if (!near_zero.empty()) {
        // Kernel of S: complexified eigenvectors span a real subspace; re-orthonormalize.
        RealMatrix span(n, 2 * static_cast<Eigen::Index>(near_zero.size()));
        for (std::size_t j = 0; j < near_zero.size(); ++j) {
            span.col(2 * j) = h.col(near_zero[j]).real();
            span.col(2 * j + 1) = h.col(near_zero[j]).imag();
        }
        Eigen::ColPivHouseholderQR<RealMatrix> qr(span);
        const Eigen::Index k = static_cast<Eigen::Index>(near_zero.size());
        RealMatrix q = qr.householderQ() * RealMatrix::Identity(n, k);
        for (Eigen::Index j = 0; j + 1 < k || (k == 1 && j == 0); j += 2) {
            if (j + 1 >= k) break;
            ModePair p;
            p.value = 0.0;
            p.first = q.col(j);
            p.second = q.col(j + 1);
            pairs.push_back(std::move(p));
        }
        if (k % 2 != 0)
            throw numeric_error("PairingFailure", "odd-dimensional kernel of a skew matrix");
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const ModePair& a, const ModePair& b) { return a.value < b.value; });
    return pairs;
}

} // namespace

Eigen::Matrix2cd u_block(double x) {
    if (std::abs(x) > kOverflowGuard)
        throw domain_error("Overflow", "u_block argument exceeds overflow guard");
    Eigen::Matrix2cd u;
    const double ch = std::cosh(x), sh = std::sinh(x);
    u << Complex(ch, 0.0), Complex(0.0, sh), Complex(0.0, -sh), Complex(ch, 0.0);
    return u;
}

TransformationMatrix TransformationMatrix::identity(Eigen::Index dim) {
    return TransformationMatrix(Matrix::Identity(dim, dim));
}

double TransformationMatrix::orthogonality_defect() const {
    const Eigen::Index n = dim();
    return ((entries * entries.transpose()) - Matrix::Identity(n, n)).norm() / entries.norm();
}

double TransformationMatrix::hermiticity_defect() const {
    return (entries - entries.adjoint()).norm() / entries.norm();
}

TransformationMatrix compose(const std::vector<TransformationMatrix>& factors) {
    if (factors.empty())
        throw domain_error("DimMismatch", "compose needs at least one factor");
    Matrix acc = factors.front().entries;
    for (std::size_t i = 1; i < factors.size(); ++i) {
        if (factors[i].dim() != acc.rows())
            throw domain_error("DimMismatch", "transformation matrices have different dimensions");
        acc = acc * factors[i].entries;
    }
    return TransformationMatrix(std::move(acc));
}

CanonicalDecomposition canonical_form(const TransformationMatrix& r) {
    const Eigen::Index n = r.dim();
    if (n % 2 != 0)
        throw domain_error("OddDimension", "transformation matrix must act on an even number of modes");
    if (r.hermiticity_defect() > 1e-10)
        throw numeric_error("NotHermitian", "canonical_form requires a Hermitian matrix");
    if (r.orthogonality_defect() > 1e-10)
        throw numeric_error("NotOrthogonal", "canonical_form requires a complex-orthogonal matrix");

    const RealMatrix y = r.entries.imag();
    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    auto pairs = skew_pairs(y, 1e-13 * scale);
    if (2 * static_cast<Eigen::Index>(pairs.size()) != n)
        throw numeric_error("PairingFailure", "could not pair all Majorana modes");

    CanonicalDecomposition out;
    out.energies.resize(n / 2);
    out.rotation.resize(n, n);
    for (Eigen::Index m = 0; m < n / 2; ++m) {
        out.energies[m] = std::asinh(pairs[m].value);
        // Block orientation for u(eps): Y w1 = -sinh(eps) w2 requires (w1, w2) = (y, x).
        out.rotation.col(2 * m) = pairs[m].second;
        out.rotation.col(2 * m + 1) = pairs[m].first;
    }

    // Reconstruction check; the decomposition is gauge-fixed only up to
    // within-plane rotations, which the check is insensitive to.
    Matrix rec = Matrix::Zero(n, n);
    for (Eigen::Index m = 0; m < n / 2; ++m) {
        rec.block<2, 2>(2 * m, 2 * m) = u_block(out.energies[m]);
    }
    Matrix recon = out.rotation.cast<Complex>() * rec * out.rotation.transpose().cast<Complex>();
    if ((recon - r.entries).norm() / r.entries.norm() > 1e-8)
        throw numeric_error("ReconstructionFailure", "canonical form does not reconstruct the input");
    return out;
}

SkewCanonical skew_canonical(const RealMatrix& b) {
    const Eigen::Index n = b.rows();
    if (n % 2 != 0)
        throw domain_error("OddDimension", "skew matrix must have even dimension");
    const double scale = std::max(1.0, b.norm());
    if ((b + b.transpose()).norm() > 1e-10 * scale)
        throw numeric_error("NotSkew", "skew_canonical requires a skew-symmetric matrix");

    auto pairs = skew_pairs(b, 1e-14 * std::max(1.0, b.cwiseAbs().maxCoeff()));
    if (2 * static_cast<Eigen::Index>(pairs.size()) != n)
        throw numeric_error("PairingFailure", "could not pair all modes");

    SkewCanonical out;
    out.deltas.resize(n / 2);
    out.tanh_deltas.resize(n / 2);
    out.rotation.resize(n, n);
    for (Eigen::Index m = 0; m < n / 2; ++m) {
        double t = pairs[m].value;
        out.tanh_deltas[m] = t;
        t = std::clamp(t, -1.0 + 1e-16, 1.0 - 1e-16);
        double d = std::atanh(t);
        out.deltas[m] = (pairs[m].value >= 1.0 - 1e-16 || d > kDeltaCap) ? kDeltaCap : d;
        // Block [[0,-t],[t,0]]: B x = t y, B y = -t x puts (x, y) in this order.
        out.rotation.col(2 * m) = pairs[m].first;
        out.rotation.col(2 * m + 1) = pairs[m].second;
    }
    return out;
}

namespace detail {

template <typename Scalar>
Scalar pfaffian_impl(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index n = a.rows();
    if (n == 0) return Scalar(1);
    if (n % 2 != 0)
        throw domain_error("OddDimension", "pfaffian needs even dimension");

    Scalar result(1);
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        // pivot: largest |a(i,k)| over i > k
        Eigen::Index kp = k + 1;
        double best = std::abs(a(kp, k));
        for (Eigen::Index i = k + 2; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                kp = i;
            }
        }
        if (kp != k + 1) {
            a.row(k + 1).swap(a.row(kp));
            a.col(k + 1).swap(a.col(kp));
            result = -result;
        }
        const Scalar pivot = a(k + 1, k);
        if (pivot == Scalar(0)) return Scalar(0);
        result *= -pivot; // pf block convention: [[0, a],[-a, 0]] contributes +a = -a(k+1,k)
        if (k + 2 < n) {
            const Eigen::Index m = n - (k + 2);
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tau =
                a.col(k).segment(k + 2, m) / pivot;
            auto w = a.col(k + 1).segment(k + 2, m);
            // skew rank-2 update of the trailing block: A += tau w^T - w tau^T
            a.block(k + 2, k + 2, m, m).noalias() += tau * w.transpose();
            a.block(k + 2, k + 2, m, m).noalias() -= w * tau.transpose();
        }
    }
    return result;
}

template Complex pfaffian_impl<Complex>(Matrix&);
template double pfaffian_impl<double>(RealMatrix&);

} // namespace detail

Complex pfaffian_unchecked(Matrix& m) { return detail::pfaffian_impl<Complex>(m); }

} // namespace xymps::majorana
