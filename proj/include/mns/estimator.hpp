#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "mns/errors.hpp"
#include "mns/matrix.hpp"
#include "mns/neighborhood.hpp"
#include "mns/parallel.hpp"
#include "mns/tensor.hpp"

namespace mns {

/// Per-layer smoothed counts and aggregated neighborhood sizes.
///
/// counts(k, i, j) = sum over i' in the neighborhood of i in layer k of
/// A_{i'jk} (integer), and totals(i, k) = sum over k' in the neighborhood of
/// layer k of |N_i^{k'}|. Both are exact integers; floating point enters only
/// at the final ratio.
struct SmoothingIntermediates {
    std::size_t n = 0;
    std::size_t layers = 0;
    std::vector<std::int32_t> counts;  // (k*n + i)*n + j
    std::vector<std::int64_t> totals;  // i*layers + k

    std::int32_t count(std::size_t i, std::size_t j, std::size_t k) const {
        return counts[(k * n + i) * n + j];
    }
    std::int64_t total(std::size_t i, std::size_t k) const { return totals[i * layers + k]; }
};

namespace detail {

/// counts(i, j) = sum_{i': mask(i, i')=1} A_{i'j} for one layer slice.
inline void smoothed_counts(const std::uint8_t* slice, const BinaryMatrix& mask, std::size_t n,
                            std::int32_t* out) {
    for (std::size_t x = 0; x < n * n; ++x) out[x] = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::int32_t* acc = out + i * n;
        const std::uint8_t* mrow = mask.row(i);
        for (std::size_t ip = 0; ip < n; ++ip) {
            if (!mrow[ip]) continue;
            const std::uint8_t* arow = slice + ip * n;
            for (std::size_t j = 0; j < n; ++j) acc[j] += arow[j];
        }
    }
}

/// Ratio, symmetrization and structural zero diagonal for one output slice.
inline void finish_slice(const std::int32_t* num, const std::int64_t* den, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(den[i]);
        const std::int32_t* nrow = num + i * n;
        double* orow = out + i * n;
        for (std::size_t j = 0; j < n; ++j) orow[j] = static_cast<double>(nrow[j]) / d;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i * n + i] = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (out[i * n + j] + out[j * n + i]) / 2.0;
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
}

}  // namespace detail

inline SmoothingIntermediates smoothing_intermediates(const AdjacencyTensor& a,
                                                      const NeighborMasks& masks) {
    const std::size_t n = a.node_count();
    const std::size_t layers = a.layer_count();
    if (masks.node.size() != layers || masks.layer.rows() != layers || masks.layer.cols() != layers)
        throw ShapeMismatch("neighbor masks do not match the tensor shape");
    for (const BinaryMatrix& m : masks.node)
        if (m.rows() != n || m.cols() != n) throw ShapeMismatch("node mask shape mismatch");

    SmoothingIntermediates inter;
    inter.n = n;
    inter.layers = layers;
    inter.counts.assign(n * n * layers, 0);
    inter.totals.assign(n * layers, 0);

    std::vector<std::int64_t> sizes(n * layers, 0);  // |N_i^{k}| per (i, k)
    parallel_for(layers, [&](std::size_t k) {
        detail::smoothed_counts(a.slice(k), masks.node[k], n, inter.counts.data() + k * n * n);
        for (std::size_t i = 0; i < n; ++i)
            sizes[i * layers + k] = static_cast<std::int64_t>(masks.node[k].row_sum(i));
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < layers; ++k) {
            std::int64_t acc = 0;
            for (std::size_t kp = 0; kp < layers; ++kp)
                if (masks.layer(k, kp)) acc += sizes[i * layers + kp];
            inter.totals[i * layers + k] = acc;
        }
    return inter;
}

/// Ratio-of-sums smoothing with the supplied masks: the numerator aggregates
/// the per-layer counts over each layer's neighborhood, the denominator is the
/// matching neighborhood-size total, and each slice is symmetrized as
/// (P + P^T)/2 with a structural zero diagonal.
inline ProbabilityTensor smooth_with_masks(const AdjacencyTensor& a, const NeighborMasks& masks) {
    const std::size_t n = a.node_count();
    const std::size_t layers = a.layer_count();
    const SmoothingIntermediates inter = smoothing_intermediates(a, masks);
    for (std::int64_t t : inter.totals)
        if (t == 0) throw ZeroDenominator("a neighborhood total is zero; masks must include self");

    std::vector<double> data(n * n * layers, 0.0);
    parallel_for(layers, [&](std::size_t k) {
        std::vector<std::int32_t> num(n * n, 0);
        for (std::size_t kp = 0; kp < layers; ++kp) {
            if (!masks.layer(k, kp)) continue;
            const std::int32_t* c = inter.counts.data() + kp * n * n;
            for (std::size_t x = 0; x < n * n; ++x) num[x] += c[x];
        }
        std::vector<std::int64_t> den(n);
        for (std::size_t i = 0; i < n; ++i) den[i] = inter.total(i, k);
        detail::finish_slice(num.data(), den.data(), n, data.data() + k * n * n);
    });
    return ProbabilityTensor::from_data(n, layers, std::move(data), true);
}

/// Two-step multi-layer neighborhood smoothing: node and layer neighborhoods
/// are selected by quantile thresholding of the Chebyshev distance matrices,
/// then the adjacency entries are averaged over both.
inline ProbabilityTensor mns_estimate(const AdjacencyTensor& a, const BandwidthParams& params) {
    if (a.node_count() < 3) throw TooFewNodes("estimation needs at least 3 nodes");
    return smooth_with_masks(a, compute_masks(a, params));
}

inline ProbabilityTensor mns_estimate(const AdjacencyTensor& a, double c = 2.0) {
    return mns_estimate(a, compute_bandwidths(a.node_count(), a.layer_count(), c));
}

namespace detail {

inline void single_layer_smooth(const std::uint8_t* slice, const BinaryMatrix& mask, std::size_t n,
                                double* out) {
    std::vector<std::int32_t> num(n * n, 0);
    smoothed_counts(slice, mask, n, num.data());
    std::vector<std::int64_t> den(n);
    for (std::size_t i = 0; i < n; ++i) den[i] = static_cast<std::int64_t>(mask.row_sum(i));
    finish_slice(num.data(), den.data(), n, out);
}

}  // namespace detail

/// Single-layer neighborhood smoothing baseline: neighborhoods from layer k
/// only, at level h = C^{3/2} (ln n / n)^{1/2}.
inline Matrix ns_estimate(const AdjacencyTensor& a, std::size_t k, double c = 2.0) {
    if (k >= a.layer_count()) throw IndexOutOfRange("layer index out of range");
    if (a.node_count() < 3) throw TooFewNodes("estimation needs at least 3 nodes");
    const std::size_t n = a.node_count();
    const double h = std::min(1.0, detail::single_layer_bandwidth(n, c));
    const BinaryMatrix mask = detail::node_mask_for_layer(a, k, h);
    Matrix out(n, n);
    detail::single_layer_smooth(a.slice(k), mask, n, out.data());
    return out;
}

/// The NS baseline applied independently to every layer.
inline ProbabilityTensor ns_estimate_all(const AdjacencyTensor& a, double c = 2.0) {
    const std::size_t n = a.node_count();
    const std::size_t layers = a.layer_count();
    if (n < 3) throw TooFewNodes("estimation needs at least 3 nodes");
    const double h = std::min(1.0, detail::single_layer_bandwidth(n, c));
    std::vector<double> data(n * n * layers, 0.0);
    parallel_for(layers, [&](std::size_t k) {
        const BinaryMatrix mask = detail::node_mask_for_layer(a, k, h);
        detail::single_layer_smooth(a.slice(k), mask, n, data.data() + k * n * n);
    });
    return ProbabilityTensor::from_data(n, layers, std::move(data), true);
}

}  // namespace mns
