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

#include "xymps/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace xymps::entanglement {

EntanglementSpectrum half_chain_spectrum(const transfer::GaussianState& state, int half_length) {
    const Eigen::Index nh = 2 * half_length;
    if (state.covariance.rows() != 2 * nh)
        throw domain_error("DimMismatch", "state does not cover 4*half_length Majoranas");
    auto front = majorana::skew_canonical(state.covariance.topLeftCorner(nh, nh));
    auto back = majorana::skew_canonical(state.covariance.bottomRightCorner(nh, nh));
    EntanglementSpectrum out;
    out.deltas = std::move(front.deltas);
    out.tanh_deltas = std::move(front.tanh_deltas);
    out.rotation = std::move(front.rotation);
    out.rotation_back = std::move(back.rotation);
    return out;
}

EntanglementSpectrum half_chain_spectrum_banded(const transfer::TransferSpec& spec) {
    const Eigen::Index nh = 2 * spec.half_length;
    RealMatrix b1 = transfer::covariance_block(spec, 0, nh, 0, nh);
    RealMatrix b2 = transfer::covariance_block(spec, nh, 2 * nh, nh, 2 * nh);
    auto front = majorana::skew_canonical(0.5 * (b1 - b1.transpose()));
    auto back = majorana::skew_canonical(0.5 * (b2 - b2.transpose()));
    EntanglementSpectrum out;
    out.deltas = std::move(front.deltas);
    out.tanh_deltas = std::move(front.tanh_deltas);
    out.rotation = std::move(front.rotation);
    out.rotation_back = std::move(back.rotation);
    return out;
}

SchmidtSet schmidt_values(const EntanglementSpectrum& spec, int keep_modes, double floor,
                          std::size_t budget) {
    if (!(floor > 0.0 && floor < 1.0))
        throw domain_error("DomainError", "floor must lie in (0, 1)");
    const int n_all = static_cast<int>(spec.deltas.size());
    const int n = (keep_modes < 0) ? n_all : std::min(keep_modes, n_all);
    if (n > 62)
        throw domain_error("TooManyValues", "more than 62 modes cannot be enumerated");

    // deltas ascending: weights w_m = 2 delta_m, lambda(s) = exp(-sum_s w)/Z
    std::vector<double> w(n);
    double log_z = 0.0;
    for (int m = 0; m < n; ++m) {
        w[m] = 2.0 * spec.deltas[m];
        log_z += std::log1p(std::exp(-w[m]));
    }
    const double log_floor = std::log(floor);

    // best-first expansion over occupation bitmasks: children of a state
    // toggle the next mode beyond its highest set bit, or advance it.
    struct Node {
        double weight; // sum of w over occupied modes
        std::uint64_t mask;
        int top; // index of the highest occupied mode, -1 for the vacuum
    };
    auto cmp = [](const Node& a, const Node& b) { return a.weight > b.weight; };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
    heap.push({0.0, 0, -1});

    SchmidtSet out;
    while (!heap.empty()) {
        Node cur = heap.top();
        heap.pop();
        if (cur.weight > -log_floor) break;
        if (out.values.size() >= budget)
            throw resource_error("TooManyValues", "Schmidt enumeration exceeded the budget");
        out.values.push_back(std::exp(-cur.weight - log_z));
        out.labels.push_back(cur.mask);
        // extend: occupy any mode above the current top (add lowest extension),
        // and shift the top occupied mode up by one.
        if (cur.top + 1 < n)
            heap.push({cur.weight + w[cur.top + 1], cur.mask | (1ull << (cur.top + 1)),
                       cur.top + 1});
        if (cur.top >= 0 && cur.top + 1 < n) {
            Node shifted = cur;
            shifted.weight = cur.weight - w[cur.top] + w[cur.top + 1];
            shifted.mask = (cur.mask & ~(1ull << cur.top)) | (1ull << (cur.top + 1));
            shifted.top = cur.top + 1;
            heap.push(shifted);
        }
    }
    return out;
}

namespace {

/// number of partitions of w into distinct odd parts, for w = 0..wmax
std::vector<long> distinct_odd_partitions(int wmax) {
    std::vector<long> q(wmax + 1, 0);
    q[0] = 1;
    for (int part = 1; part <= wmax; part += 2)
        for (int w = wmax; w >= part; --w) q[w] += q[w - part];
    return q;
}

} // namespace

long d_chi(int chi) {
    if (chi < 0)
        throw domain_error("DomainError", "chi must be non-negative");
    // The largest Schmidt value a chi-mode truncation misses has relative
    // weight 2*chi+1 (the first progression entry beyond the kept modes).
    // Its rank counts every value of weight <= 2*chi+1, ties resolved with
    // reproduced values first.
    const int wmax = 2 * chi + 1;
    auto q = distinct_odd_partitions(wmax);
    long rank = 0;
    for (int w = 0; w <= wmax; ++w) rank += q[w];
    return rank - 1;
}

double entropy(const EntanglementSpectrum& spec) {
    double s = 0.0;
    for (int m = 0; m < spec.deltas.size(); ++m) {
        const double x = std::exp(-2.0 * spec.deltas[m]);
        const double p = x / (1.0 + x);
        if (p > 0.0 && p < 1.0) s += -p * std::log(p) - (1.0 - p) * std::log1p(-x / (1.0 + x));
    }
    return s;
}

} // namespace xymps::entanglement
