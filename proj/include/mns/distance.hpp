#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "mns/errors.hpp"
#include "mns/matrix.hpp"
#include "mns/parallel.hpp"
#include "mns/tensor.hpp"

namespace mns {

/// Squared node distances of one layer: D^k_{ii'} = max_{s != i,i'} |G_{is} - G_{i's}|.
struct NodeDistanceMatrix {
    std::size_t layer = 0;
    Matrix d;
};

/// Squared layer distances: D_{kk'} = max_{l != k,k'} |T_{kl} - T_{k'l}|.
struct LayerDistanceMatrix {
    Matrix d;
};

namespace detail {

/// Chebyshev distance between rows a and b of a square matrix with the two
/// involved coordinates excluded. An empty candidate set (2x2 input) gives 0.
inline Matrix chebyshev_excluding(const Matrix& m) {
    const std::size_t r = m.rows();
    Matrix d(r, r, 0.0);
    parallel_for_strided(r, [&](std::size_t a) {
        const double* ra = m.row(a);
        for (std::size_t b = a + 1; b < r; ++b) {
            const double* rb = m.row(b);
            double best = 0.0;
            const auto scan = [&](std::size_t from, std::size_t to) {
                for (std::size_t c = from; c < to; ++c) {
                    const double v = std::abs(ra[c] - rb[c]);
                    if (v > best) best = v;
                }
            };
            // a < b, so the excluded columns split the row into three runs.
            scan(0, a);
            scan(a + 1, b);
            scan(b + 1, r);
            d(a, b) = best;
            d(b, a) = best;
        }
    });
    return d;
}

}  // namespace detail

inline NodeDistanceMatrix node_distances(const NodeGram& g) {
    return NodeDistanceMatrix{g.layer, detail::chebyshev_excluding(g.g)};
}

inline LayerDistanceMatrix layer_distances(const LayerGram& t) {
    if (t.t.rows() < 2) throw TooFewLayers("layer distances need at least 2 layers");
    return LayerDistanceMatrix{detail::chebyshev_excluding(t.t)};
}

}  // namespace mns
