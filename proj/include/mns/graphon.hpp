#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "mns/errors.hpp"
#include "mns/parallel.hpp"
#include "mns/rng.hpp"
#include "mns/tensor.hpp"

namespace mns {

enum class GraphonKind { Blocks, SineWave, DiagonalDominant, FullRankCosine, Constant, Tabulated };

/// Logarithm base used for the block count M = floor(log n) of the Blocks
/// graphon. Natural log is the default.
enum class LogBase { Natural, Base2, Base10 };

/// 3-D value grid over [0,1]^3 evaluated by trilinear interpolation.
struct TabulatedGrid {
    std::size_t nu = 0;
    std::size_t nv = 0;
    std::size_t nw = 0;
    std::vector<double> values;  // index (iu*nv + iv)*nw + iw

    double at(std::size_t iu, std::size_t iv, std::size_t iw) const {
        return values[(iu * nv + iv) * nw + iw];
    }
};

/// Declarative description of a ternary graphon f(u, v, w).
///
/// Four built-in families, a constant, and a tabulated grid. Evaluation is
/// symmetric in (u, v) and clamped to [0, 1].
class GraphonSpec {
public:
    static GraphonSpec blocks(LogBase base = LogBase::Natural) {
        GraphonSpec s(GraphonKind::Blocks);
        s.log_base_ = base;
        return s;
    }
    static GraphonSpec sine_wave() { return GraphonSpec(GraphonKind::SineWave); }
    static GraphonSpec diagonal_dominant() { return GraphonSpec(GraphonKind::DiagonalDominant); }
    static GraphonSpec full_rank_cosine() { return GraphonSpec(GraphonKind::FullRankCosine); }

    static GraphonSpec constant(double c) {
        if (!(c >= 0.0 && c <= 1.0)) throw InvalidParameter("constant graphon requires c in [0, 1]");
        GraphonSpec s(GraphonKind::Constant);
        s.constant_ = c;
        return s;
    }

    static GraphonSpec tabulated(TabulatedGrid grid) {
        if (grid.nu == 0 || grid.nv == 0 || grid.nw == 0)
            throw InvalidParameter("tabulated graphon requires a nonempty grid");
        if (grid.values.size() != grid.nu * grid.nv * grid.nw)
            throw InvalidParameter("tabulated graphon grid size mismatch");
        GraphonSpec s(GraphonKind::Tabulated);
        s.grid_ = std::move(grid);
        return s;
    }

    /// Built-in family by its conventional 1-based index.
    static GraphonSpec builtin(int index) {
        switch (index) {
            case 1: return blocks();
            case 2: return sine_wave();
            case 3: return diagonal_dominant();
            case 4: return full_rank_cosine();
            default: throw InvalidParameter("built-in graphon index must be 1..4");
        }
    }

    GraphonKind kind() const { return kind_; }
    double constant_value() const { return constant_; }
    LogBase log_base() const { return log_base_; }
    const TabulatedGrid& grid() const { return grid_; }

    std::string kind_name() const {
        switch (kind_) {
            case GraphonKind::Blocks: return "blocks";
            case GraphonKind::SineWave: return "sine_wave";
            case GraphonKind::DiagonalDominant: return "diagonal_dominant";
            case GraphonKind::FullRankCosine: return "full_rank_cosine";
            case GraphonKind::Constant: return "constant";
            case GraphonKind::Tabulated: return "tabulated";
        }
        return "unknown";
    }

private:
    explicit GraphonSpec(GraphonKind k) : kind_(k) {}

    GraphonKind kind_;
    double constant_ = 0.0;
    LogBase log_base_ = LogBase::Natural;
    TabulatedGrid grid_;
};

/// Latent positions: xi per node, eta per layer, all in [0, 1], reproducible
/// from the seed.
struct LatentDraw {
    std::vector<double> xi;
    std::vector<double> eta;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::size_t block_count(std::size_t n_hint, LogBase base) {
    double l = std::log(static_cast<double>(n_hint));
    if (base == LogBase::Base2) l /= std::numbers::ln2;
    if (base == LogBase::Base10) l /= std::numbers::ln10;
    const auto m = static_cast<std::size_t>(std::floor(l));
    return m == 0 ? 1 : m;
}

/// Block index of x under the half-open partition [(m-1)/M, m/M), last block
/// closed; returns 0-based block.
inline std::size_t block_of(double x, std::size_t blocks) {
    const auto b = static_cast<std::size_t>(x * static_cast<double>(blocks));
    return b >= blocks ? blocks - 1 : b;
}

/// Formula evaluation without argument checks; result not yet clamped.
inline double eval_graphon_raw(const GraphonSpec& spec, double u, double v, double w,
                               std::size_t n_hint) {
    switch (spec.kind()) {
        case GraphonKind::Blocks: {
            const std::size_t blocks = block_count(n_hint, spec.log_base());
            const double mp1 = static_cast<double>(blocks) + 1.0;
            if (block_of(u, blocks) == block_of(v, blocks)) {
                const double m = static_cast<double>(block_of(u, blocks) + 1);
                return m / (mp1 * (w + 1.0));
            }
            return 0.3 / mp1;
        }
        case GraphonKind::SineWave:
            return std::sin(5.0 * std::numbers::pi * (u + v - w) + 1.0) / 2.0 + 0.5;
        case GraphonKind::DiagonalDominant: {
            const double z = 15.0 * std::pow(0.8 * std::abs(u - v), 1.0 / (1.0 + w)) - 0.1;
            return 1.0 - 1.0 / (1.0 + std::exp(z));
        }
        case GraphonKind::FullRankCosine: {
            const double s = u * u + v * v;
            if (s == 0.0) return 0.15;  // analytic limit: prefactor -> 0, cosine bounded
            return (s / 3.0) * std::cos(w / s) + 0.15;
        }
        case GraphonKind::Constant:
            return spec.constant_value();
        case GraphonKind::Tabulated: {
            // Canonical (u, v) ordering keeps the lookup symmetric.
            const double a = std::min(u, v);
            const double b = std::max(u, v);
            const TabulatedGrid& g = spec.grid();
            const auto cell = [](double x, std::size_t dim) {
                if (dim == 1) return std::pair<std::size_t, double>{0, 0.0};
                const double t = x * static_cast<double>(dim - 1);
                auto i = static_cast<std::size_t>(t);
                if (i >= dim - 1) i = dim - 2;
                return std::pair<std::size_t, double>{i, t - static_cast<double>(i)};
            };
            const auto [iu, fu] = cell(a, g.nu);
            const auto [iv, fv] = cell(b, g.nv);
            const auto [iw, fw] = cell(w, g.nw);
            const std::size_t ju = g.nu == 1 ? iu : iu + 1;
            const std::size_t jv = g.nv == 1 ? iv : iv + 1;
            const std::size_t jw = g.nw == 1 ? iw : iw + 1;
            double acc = 0.0;
            acc += g.at(iu, iv, iw) * (1 - fu) * (1 - fv) * (1 - fw);
            acc += g.at(ju, iv, iw) * fu * (1 - fv) * (1 - fw);
            acc += g.at(iu, jv, iw) * (1 - fu) * fv * (1 - fw);
            acc += g.at(ju, jv, iw) * fu * fv * (1 - fw);
            acc += g.at(iu, iv, jw) * (1 - fu) * (1 - fv) * fw;
            acc += g.at(ju, iv, jw) * fu * (1 - fv) * fw;
            acc += g.at(iu, jv, jw) * (1 - fu) * fv * fw;
            acc += g.at(ju, jv, jw) * fu * fv * fw;
            return acc;
        }
    }
    return 0.0;
}

inline double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace detail

/// f(u, v, w) clamped to [0, 1]. n_hint sets the block count of the Blocks
/// family and is ignored by the other kinds.
inline double eval_graphon(const GraphonSpec& spec, double u, double v, double w,
                           std::size_t n_hint) {
    if (!(u >= 0.0 && u <= 1.0) || !(v >= 0.0 && v <= 1.0) || !(w >= 0.0 && w <= 1.0))
        throw InvalidParameter("graphon arguments must lie in [0, 1]");
    if (n_hint < 3) throw InvalidParameter("n_hint must be at least 3");
    return detail::clamp01(detail::eval_graphon_raw(spec, u, v, w, n_hint));
}

/// i.i.d. Uniform[0,1] latent positions for n nodes and K layers.
inline LatentDraw sample_latents(std::size_t n, std::size_t layers, std::uint64_t seed) {
    if (n == 0 || layers == 0) throw InvalidParameter("latent dimensions must be positive");
    LatentDraw d;
    d.seed = seed;
    d.xi.resize(n);
    d.eta.resize(layers);
    for (std::size_t i = 0; i < n; ++i) d.xi[i] = rng::to_unit(rng::hash_coords(seed, {rng::kStreamXi, i}));
    for (std::size_t k = 0; k < layers; ++k)
        d.eta[k] = rng::to_unit(rng::hash_coords(seed, {rng::kStreamEta, k}));
    return d;
}

/// P_{ijk} = f(xi_i, xi_j, eta_k) for i != j, zero diagonal, exactly symmetric
/// slices (each unordered pair is evaluated once and mirrored).
inline ProbabilityTensor build_probability_tensor(const GraphonSpec& spec, const LatentDraw& latents) {
    const std::size_t n = latents.xi.size();
    const std::size_t layers = latents.eta.size();
    if (n == 0 || layers == 0) throw InvalidParameter("latent draw is empty");
    if (n < 3) throw InvalidParameter("need at least 3 nodes");
    for (double x : latents.xi)
        if (!(x >= 0.0 && x <= 1.0)) throw InvalidParameter("latent positions must lie in [0, 1]");
    for (double x : latents.eta)
        if (!(x >= 0.0 && x <= 1.0)) throw InvalidParameter("latent positions must lie in [0, 1]");

    std::vector<double> data(n * n * layers, 0.0);
    parallel_for(layers, [&](std::size_t k) {
        const double w = latents.eta[k];
        double* s = data.data() + k * n * n;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double p =
                    detail::clamp01(detail::eval_graphon_raw(spec, latents.xi[i], latents.xi[j], w, n));
                s[i * n + j] = p;
                s[j * n + i] = p;
            }
        }
    });
    return ProbabilityTensor::from_data(n, layers, std::move(data), true);
}

/// One Bernoulli(P_{ijk}) draw per layer and unordered pair, mirrored.
/// Counter-based draws keyed by (seed, k, i, j), so the result is the same for
/// any thread schedule.
inline AdjacencyTensor sample_adjacency(const ProbabilityTensor& p, std::uint64_t seed) {
    const std::size_t n = p.node_count();
    const std::size_t layers = p.layer_count();
    std::vector<std::uint8_t> data(n * n * layers, 0);
    parallel_for(layers, [&](std::size_t k) {
        std::uint8_t* s = data.data() + k * n * n;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double u = rng::to_unit(rng::hash_coords(seed, {rng::kStreamAdjacency, k, i, j}));
                const std::uint8_t bit = u < p(i, j, k) ? 1 : 0;
                s[i * n + j] = bit;
                s[j * n + i] = bit;
            }
        }
    });
    return AdjacencyTensor::from_data(n, layers, std::move(data));
}

}  // namespace mns
