#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mns/distance.hpp"
#include "mns/errors.hpp"
#include "mns/matrix.hpp"
#include "mns/parallel.hpp"
#include "mns/tensor.hpp"

namespace mns {

enum class Regime { MultiLayer, SingleLayer };

/// Quantile levels controlling layer (h1) and node (h2) neighborhood sizes.
///
/// With m = C (ln n / (nK))^{1/3} the regimes are
///   MultiLayer  (m >= 1/K, K > 1):  h1 = h2 = min(1, m)
///   SingleLayer (m <  1/K or K = 1): h1 = min(1, 1/K) and the layer mask is
///       the identity; h2 = min(1, C^{3/2} (ln n / n)^{1/2}), the single-layer
///       smoothing level, so the pipeline degenerates to per-layer smoothing.
struct BandwidthParams {
    double c = 2.0;
    double h1 = 1.0;
    double h2 = 1.0;
    Regime regime = Regime::SingleLayer;
};

namespace detail {

inline double multilayer_bandwidth(std::size_t n, std::size_t layers, double c) {
    return c * std::cbrt(std::log(static_cast<double>(n)) /
                         (static_cast<double>(n) * static_cast<double>(layers)));
}

inline double single_layer_bandwidth(std::size_t n, double c) {
    return std::pow(c, 1.5) * std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n));
}

}  // namespace detail

inline BandwidthParams compute_bandwidths(std::size_t n, std::size_t layers, double c = 2.0) {
    if (n < 3) throw InvalidParameter("need at least 3 nodes");
    if (layers < 1) throw InvalidParameter("need at least 1 layer");
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidParameter("C must be a positive real");
    const double m = detail::multilayer_bandwidth(n, layers, c);
    const double inv_k = 1.0 / static_cast<double>(layers);
    BandwidthParams p;
    p.c = c;
    if (layers == 1 || m < inv_k) {
        p.regime = Regime::SingleLayer;
        p.h1 = std::min(1.0, inv_k);
        p.h2 = std::min(1.0, detail::single_layer_bandwidth(n, c));
    } else {
        p.regime = Regime::MultiLayer;
        p.h1 = std::min(1.0, m);
        p.h2 = std::min(1.0, m);
    }
    return p;
}

/// Lower empirical quantile: the r-th order statistic with r = ceil(h * m),
/// 1-based, m = values.size().
inline double sample_quantile(std::vector<double> values, double h) {
    if (values.empty()) throw EmptySet("quantile of an empty set");
    if (!(h > 0.0 && h <= 1.0)) throw InvalidParameter("quantile level must lie in (0, 1]");
    const auto m = static_cast<double>(values.size());
    auto r = static_cast<std::size_t>(std::ceil(h * m));
    if (r < 1) r = 1;
    if (r > values.size()) r = values.size();
    std::nth_element(values.begin(), values.begin() + (r - 1), values.end());
    return values[r - 1];
}

namespace detail {

/// Thresholds each row of a square distance matrix at the h-quantile of its
/// non-self entries. Row i of the result marks the neighborhood of index i;
/// the zero self-distance always passes.
inline BinaryMatrix threshold_rows(const Matrix& d, double h) {
    const std::size_t r = d.rows();
    BinaryMatrix mask(r, r);
    std::vector<double> buf;
    for (std::size_t i = 0; i < r; ++i) {
        buf.clear();
        for (std::size_t j = 0; j < r; ++j)
            if (j != i) buf.push_back(d(i, j));
        const double q = sample_quantile(buf, h);
        for (std::size_t j = 0; j < r; ++j) mask(i, j) = d(i, j) <= q ? 1 : 0;
    }
    return mask;
}

}  // namespace detail

/// Layer neighborhoods: row k marks the layers within the h1-quantile of
/// layer k's distances (self included). Identity in the SingleLayer regime.
inline BinaryMatrix layer_neighbors(const LayerDistanceMatrix& d, const BandwidthParams& params) {
    if (params.regime == Regime::SingleLayer) return BinaryMatrix::identity(d.d.rows());
    return detail::threshold_rows(d.d, params.h1);
}

/// Node neighborhoods within one layer: row i marks the nodes within the
/// h2-quantile of node i's distances (self included; ties at the threshold
/// are all kept).
inline BinaryMatrix node_neighbors(const NodeDistanceMatrix& d, const BandwidthParams& params) {
    return detail::threshold_rows(d.d, params.h2);
}

/// Node neighborhood masks per layer plus the layer neighborhood matrix.
/// node[k](i, j) = 1 iff j is in the neighborhood of i selected in layer k;
/// layer(k, l) = 1 iff l is in the neighborhood of layer k.
struct NeighborMasks {
    std::vector<BinaryMatrix> node;
    BinaryMatrix layer;
};

namespace detail {

inline BinaryMatrix node_mask_for_layer(const AdjacencyTensor& a, std::size_t k, double h) {
    return threshold_rows(node_distances(node_gram(a, k)).d, h);
}

}  // namespace detail

inline NeighborMasks compute_masks(const AdjacencyTensor& a, const BandwidthParams& params) {
    const std::size_t layers = a.layer_count();
    NeighborMasks masks;
    masks.node.resize(layers);
    parallel_for(layers, [&](std::size_t k) {
        masks.node[k] = detail::node_mask_for_layer(a, k, params.h2);
    });
    if (params.regime == Regime::SingleLayer)
        masks.layer = BinaryMatrix::identity(layers);
    else
        masks.layer = layer_neighbors(layer_distances(layer_gram(a)), params);
    return masks;
}

}  // namespace mns
