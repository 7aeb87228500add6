#pragma once

// Independent nested-loop reference implementations used only by tests.
// Everything here is written directly from the defining formulas with index
// sets held as plain vectors; none of it shares code with the library's
// vectorized pipeline.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mns/evaluation.hpp"
#include "mns/matrix.hpp"
#include "mns/neighborhood.hpp"
#include "mns/rng.hpp"
#include "mns/tensor.hpp"

namespace oracle {

using mns::AdjacencyTensor;
using mns::BandwidthParams;
using mns::Matrix;

// G^k_{is} = sum_l A_{ilk} A_{lsk} / n
inline Matrix node_gram(const AdjacencyTensor& a, std::size_t k) {
    const std::size_t n = a.node_count();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t s = 0; s < n; ++s) {
            double acc = 0.0;
            for (std::size_t l = 0; l < n; ++l)
                acc += static_cast<double>(a(i, l, k)) * static_cast<double>(a(l, s, k));
            g(i, s) = acc / static_cast<double>(n);
        }
    return g;
}

// T_{kl} = sum_{i,j} A_{ijk} A_{ijl} / n^2
inline Matrix layer_gram(const AdjacencyTensor& a) {
    const std::size_t n = a.node_count();
    const std::size_t K = a.layer_count();
    Matrix t(K, K);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t l = 0; l < K; ++l) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    acc += static_cast<double>(a(i, j, k)) * static_cast<double>(a(i, j, l));
            t(k, l) = acc / (static_cast<double>(n) * static_cast<double>(n));
        }
    return t;
}

// D_{ab} = max_{c != a,b} |m(a,c) - m(b,c)|, zero when no candidate exists.
inline Matrix row_chebyshev(const Matrix& m) {
    const std::size_t r = m.rows();
    Matrix d(r, r, 0.0);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) {
            if (a == b) continue;
            double best = 0.0;
            for (std::size_t c = 0; c < r; ++c) {
                if (c == a || c == b) continue;
                best = std::max(best, std::abs(m(a, c) - m(b, c)));
            }
            d(a, b) = best;
        }
    return d;
}

// r-th order statistic, r = ceil(h*m), via a full sort.
inline double quantile(std::vector<double> v, double h) {
    std::sort(v.begin(), v.end());
    auto r = static_cast<std::size_t>(std::ceil(h * static_cast<double>(v.size())));
    if (r < 1) r = 1;
    if (r > v.size()) r = v.size();
    return v[r - 1];
}

// Neighborhood of index a per the quantile rule, self included.
inline std::vector<std::size_t> neighborhood(const Matrix& d, std::size_t a, double h) {
    const std::size_t r = d.rows();
    std::vector<double> others;
    for (std::size_t b = 0; b < r; ++b)
        if (b != a) others.push_back(d(a, b));
    const double q = quantile(others, h);
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < r; ++b)
        if (b == a || d(a, b) <= q) out.push_back(b);
    return out;
}

// The full smoothing estimator evaluated by direct summation over the
// neighborhood sets, then symmetrized with a zero diagonal.
inline std::vector<Matrix> mns(const AdjacencyTensor& a, const BandwidthParams& p) {
    const std::size_t n = a.node_count();
    const std::size_t K = a.layer_count();

    std::vector<Matrix> dist(K);
    for (std::size_t k = 0; k < K; ++k) dist[k] = row_chebyshev(oracle::node_gram(a, k));

    std::vector<std::vector<std::size_t>> layer_nbrs(K);
    if (p.regime == mns::Regime::SingleLayer) {
        for (std::size_t k = 0; k < K; ++k) layer_nbrs[k] = {k};
    } else {
        const Matrix dl = row_chebyshev(oracle::layer_gram(a));
        for (std::size_t k = 0; k < K; ++k) layer_nbrs[k] = neighborhood(dl, k, p.h1);
    }

    std::vector<std::vector<std::vector<std::size_t>>> node_nbrs(K);
    for (std::size_t k = 0; k < K; ++k) {
        node_nbrs[k].resize(n);
        for (std::size_t i = 0; i < n; ++i) node_nbrs[k][i] = neighborhood(dist[k], i, p.h2);
    }

    std::vector<Matrix> est(K);
    for (std::size_t k = 0; k < K; ++k) {
        Matrix ptilde(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            double den = 0.0;
            for (std::size_t kp : layer_nbrs[k]) den += static_cast<double>(node_nbrs[kp][i].size());
            for (std::size_t j = 0; j < n; ++j) {
                double num = 0.0;
                for (std::size_t kp : layer_nbrs[k])
                    for (std::size_t ip : node_nbrs[kp][i]) num += static_cast<double>(a(ip, j, kp));
                ptilde(i, j) = num / den;
            }
        }
        Matrix phat(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                phat(i, j) = i == j ? 0.0 : (ptilde(i, j) + ptilde(j, i)) / 2.0;
        est[k] = phat;
    }
    return est;
}

// Single-layer smoothing of one slice at level h.
inline Matrix ns(const AdjacencyTensor& a, std::size_t k, double h) {
    const std::size_t n = a.node_count();
    const Matrix d = row_chebyshev(oracle::node_gram(a, k));
    Matrix ptilde(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto nbrs = neighborhood(d, i, h);
        for (std::size_t j = 0; j < n; ++j) {
            double num = 0.0;
            for (std::size_t ip : nbrs) num += static_cast<double>(a(ip, j, k));
            ptilde(i, j) = num / static_cast<double>(nbrs.size());
        }
    }
    Matrix phat(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            phat(i, j) = i == j ? 0.0 : (ptilde(i, j) + ptilde(j, i)) / 2.0;
    return phat;
}

// Smoothing under externally supplied masks (row i of node mask = N_i).
inline std::vector<Matrix> smooth_with_masks(const AdjacencyTensor& a,
                                             const std::vector<mns::BinaryMatrix>& node,
                                             const mns::BinaryMatrix& layer) {
    const std::size_t n = a.node_count();
    const std::size_t K = a.layer_count();
    std::vector<Matrix> est(K);
    for (std::size_t k = 0; k < K; ++k) {
        Matrix ptilde(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            double den = 0.0;
            for (std::size_t kp = 0; kp < K; ++kp)
                if (layer(k, kp))
                    for (std::size_t ip = 0; ip < n; ++ip) den += node[kp](i, ip);
            for (std::size_t j = 0; j < n; ++j) {
                double num = 0.0;
                for (std::size_t kp = 0; kp < K; ++kp) {
                    if (!layer(k, kp)) continue;
                    for (std::size_t ip = 0; ip < n; ++ip)
                        if (node[kp](i, ip)) num += static_cast<double>(a(ip, j, kp));
                }
                ptilde(i, j) = num / den;
            }
        }
        Matrix phat(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                phat(i, j) = i == j ? 0.0 : (ptilde(i, j) + ptilde(j, i)) / 2.0;
        est[k] = phat;
    }
    return est;
}

// Direct FP/TP counts at one threshold over all off-diagonal held-out entries.
struct RocCounts {
    double fp = 0.0;
    double tp = 0.0;
};

inline RocCounts roc_counts(const mns::ProbabilityTensor& est, const AdjacencyTensor& truth,
                            const mns::MaskTensor& mask, double t) {
    std::size_t fp_num = 0, fp_den = 0, tp_num = 0, tp_den = 0;
    const std::size_t n = truth.node_count();
    for (std::size_t k = 0; k < truth.layer_count(); ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || mask(i, j, k)) continue;
                if (truth(i, j, k)) {
                    ++tp_den;
                    if (est(i, j, k) > t) ++tp_num;
                } else {
                    ++fp_den;
                    if (est(i, j, k) > t) ++fp_num;
                }
            }
    return {static_cast<double>(fp_num) / static_cast<double>(fp_den),
            static_cast<double>(tp_num) / static_cast<double>(tp_den)};
}

// Random binary tensor with density p, built entrywise from a counter stream.
inline AdjacencyTensor random_adjacency(std::size_t n, std::size_t K, double p, std::uint64_t seed) {
    std::vector<mns::Edge> edges;
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (mns::rng::to_unit(mns::rng::hash_coords(seed, {77, k, i, j})) < p)
                    edges.push_back({i, j, k});
    return mns::build_adjacency(n, K, edges);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

}  // namespace oracle
