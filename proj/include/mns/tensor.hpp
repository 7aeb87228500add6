#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mns/errors.hpp"
#include "mns/matrix.hpp"
#include "mns/parallel.hpp"

namespace mns {

/// An (i, j, k) index triple naming an undirected edge in layer k.
struct Edge {
    std::size_t i;
    std::size_t j;
    std::size_t k;
};

/// Binary n x n x K tensor of undirected, loop-free adjacency slices.
/// Layer-major dense storage: entry (i, j, k) lives at data[(k*n + i)*n + j].
/// Immutable after construction; every slice is symmetric with zero diagonal.
class AdjacencyTensor {
public:
    AdjacencyTensor(std::size_t n, std::size_t layers)
        : n_(n), layers_(layers), data_(checked_size(n, layers), 0) {}

    /// Builds from a raw layer-major buffer, validating the invariants.
    static AdjacencyTensor from_data(std::size_t n, std::size_t layers, std::vector<std::uint8_t> data) {
        AdjacencyTensor t(n, layers);
        if (data.size() != t.data_.size()) throw ShapeMismatch("adjacency buffer size mismatch");
        t.data_ = std::move(data);
        t.validate();
        return t;
    }

    std::size_t node_count() const { return n_; }
    std::size_t layer_count() const { return layers_; }

    std::uint8_t operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(k * n_ + i) * n_ + j];
    }

    std::uint8_t at(std::size_t i, std::size_t j, std::size_t k) const {
        if (i >= n_ || j >= n_ || k >= layers_) throw IndexOutOfRange("adjacency index out of range");
        return (*this)(i, j, k);
    }

    const std::uint8_t* slice(std::size_t k) const { return data_.data() + k * n_ * n_; }

    std::span<const std::uint8_t> raw() const { return data_; }

    /// Number of nonzero entries of slice k (an undirected edge counts twice).
    std::size_t nonzero_entries(std::size_t k) const {
        if (k >= layers_) throw IndexOutOfRange("layer index out of range");
        const std::uint8_t* s = slice(k);
        std::size_t c = 0;
        for (std::size_t x = 0; x < n_ * n_; ++x) c += s[x];
        return c;
    }

    bool operator==(const AdjacencyTensor&) const = default;

private:
    static std::size_t checked_size(std::size_t n, std::size_t layers) {
        if (n == 0 || layers == 0) throw InvalidParameter("tensor dimensions must be positive");
        return n * n * layers;
    }

    void validate() const {
        for (std::size_t k = 0; k < layers_; ++k) {
            const std::uint8_t* s = slice(k);
            for (std::size_t i = 0; i < n_; ++i) {
                if (s[i * n_ + i] != 0) throw InvalidParameter("adjacency diagonal must be zero");
                for (std::size_t j = i + 1; j < n_; ++j) {
                    const std::uint8_t a = s[i * n_ + j];
                    const std::uint8_t b = s[j * n_ + i];
                    if (a > 1 || b > 1) throw InvalidParameter("adjacency entries must be 0 or 1");
                    if (a != b) throw InvalidParameter("adjacency slices must be symmetric");
                }
            }
        }
    }

    std::size_t n_;
    std::size_t layers_;
    std::vector<std::uint8_t> data_;
};

/// Real n x n x K tensor with entries in [0, 1]; same layout as AdjacencyTensor.
/// `symmetrized` marks tensors whose slices are exactly symmetric.
class ProbabilityTensor {
public:
    ProbabilityTensor(std::size_t n, std::size_t layers, bool symmetrized = true)
        : n_(n), layers_(layers), symmetrized_(symmetrized), data_(checked_size(n, layers), 0.0) {}

    static ProbabilityTensor from_data(std::size_t n, std::size_t layers, std::vector<double> data,
                                       bool symmetrized) {
        ProbabilityTensor t(n, layers, symmetrized);
        if (data.size() != t.data_.size()) throw ShapeMismatch("probability buffer size mismatch");
        t.data_ = std::move(data);
        t.validate();
        return t;
    }

    std::size_t node_count() const { return n_; }
    std::size_t layer_count() const { return layers_; }
    bool symmetrized() const { return symmetrized_; }

    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(k * n_ + i) * n_ + j];
    }

    double at(std::size_t i, std::size_t j, std::size_t k) const {
        if (i >= n_ || j >= n_ || k >= layers_) throw IndexOutOfRange("probability index out of range");
        return (*this)(i, j, k);
    }

    const double* slice(std::size_t k) const { return data_.data() + k * n_ * n_; }
    double* slice(std::size_t k) { return data_.data() + k * n_ * n_; }

    std::span<const double> raw() const { return data_; }

    Matrix slice_matrix(std::size_t k) const {
        if (k >= layers_) throw IndexOutOfRange("layer index out of range");
        Matrix m(n_, n_);
        const double* s = slice(k);
        for (std::size_t x = 0; x < n_ * n_; ++x) m.data()[x] = s[x];
        return m;
    }

    bool operator==(const ProbabilityTensor&) const = default;

private:
    static std::size_t checked_size(std::size_t n, std::size_t layers) {
        if (n == 0 || layers == 0) throw InvalidParameter("tensor dimensions must be positive");
        return n * n * layers;
    }

    void validate() const {
        for (double x : data_)
            if (!(x >= 0.0 && x <= 1.0)) throw InvalidParameter("probability entries must lie in [0, 1]");
        if (symmetrized_) {
            for (std::size_t k = 0; k < layers_; ++k) {
                const double* s = slice(k);
                for (std::size_t i = 0; i < n_; ++i)
                    for (std::size_t j = i + 1; j < n_; ++j)
                        if (s[i * n_ + j] != s[j * n_ + i])
                            throw InvalidParameter("tensor flagged symmetrized has an asymmetric slice");
            }
        }
    }

    std::size_t n_;
    std::size_t layers_;
    bool symmetrized_;
    std::vector<double> data_;
};

/// Node Gram matrix of one layer: G^k = (A^k)^2 / n.
struct NodeGram {
    std::size_t layer = 0;
    Matrix g;
};

/// Layer Gram matrix: T_{kl} = tr[(A^k)^T A^l] / n^2.
struct LayerGram {
    Matrix t;
};

namespace detail {

/// Integer entries of (A^k)^2 for one n x n slice. Exact, so the result does
/// not depend on accumulation order.
inline void gram_counts(const std::uint8_t* a, std::size_t n, std::int32_t* out) {
    for (std::size_t x = 0; x < n * n; ++x) out[x] = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::int32_t* acc = out + i * n;
        const std::uint8_t* arow = a + i * n;
        for (std::size_t l = 0; l < n; ++l) {
            if (!arow[l]) continue;
            const std::uint8_t* row = a + l * n;
            for (std::size_t s = 0; s < n; ++s) acc[s] += row[s];
        }
    }
}

/// Integer inner product of two binary slices: sum_{i,j} a_{ij} b_{ij}.
inline std::int64_t slice_dot(const std::uint8_t* a, const std::uint8_t* b, std::size_t len) {
    std::int64_t acc = 0;
    for (std::size_t x = 0; x < len; ++x) acc += static_cast<std::int32_t>(a[x]) * b[x];
    return acc;
}

}  // namespace detail

/// Builds an adjacency tensor from undirected edge triples; each (i, j, k)
/// sets both orientations.
inline AdjacencyTensor build_adjacency(std::size_t n, std::size_t layers, std::span<const Edge> edges) {
    if (n == 0 || layers == 0) throw InvalidParameter("tensor dimensions must be positive");
    std::vector<std::uint8_t> data(n * n * layers, 0);
    for (const Edge& e : edges) {
        if (e.i >= n || e.j >= n || e.k >= layers)
            throw IndexOutOfRange("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ", " +
                                  std::to_string(e.k) + ") out of range");
        if (e.i == e.j)
            throw SelfLoopRejected("self-loop at node " + std::to_string(e.i) + " rejected");
        data[(e.k * n + e.i) * n + e.j] = 1;
        data[(e.k * n + e.j) * n + e.i] = 1;
    }
    return AdjacencyTensor::from_data(n, layers, std::move(data));
}

/// G^k = (A^k)^2 / n, computed as exact integer counts divided by n.
inline NodeGram node_gram(const AdjacencyTensor& a, std::size_t k) {
    if (k >= a.layer_count()) throw IndexOutOfRange("layer index out of range");
    const std::size_t n = a.node_count();
    std::vector<std::int32_t> counts(n * n);
    detail::gram_counts(a.slice(k), n, counts.data());
    NodeGram out{k, Matrix(n, n)};
    const double dn = static_cast<double>(n);
    for (std::size_t x = 0; x < n * n; ++x) out.g.data()[x] = static_cast<double>(counts[x]) / dn;
    return out;
}

/// T_{kl} = sum_{i,j} A_{ijk} A_{ijl} / n^2 over all layer pairs.
inline LayerGram layer_gram(const AdjacencyTensor& a) {
    const std::size_t n = a.node_count();
    const std::size_t layers = a.layer_count();
    LayerGram out{Matrix(layers, layers)};
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    parallel_for_strided(layers, [&](std::size_t k) {
        for (std::size_t l = k; l < layers; ++l) {
            const double v = static_cast<double>(detail::slice_dot(a.slice(k), a.slice(l), n * n)) / nn;
            out.t(k, l) = v;
            out.t(l, k) = v;
        }
    });
    return out;
}

}  // namespace mns
