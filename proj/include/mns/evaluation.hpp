#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "mns/errors.hpp"
#include "mns/estimator.hpp"
#include "mns/graphon.hpp"
#include "mns/parallel.hpp"
#include "mns/rng.hpp"
#include "mns/tensor.hpp"

namespace mns {

enum class Method { Mns, Ns };

/// RMSE/MAE report. Raw scale throughout; the conventional x100 display scale
/// is applied only when serializing.
struct ErrorReport {
    std::vector<double> per_layer_rmse;
    std::vector<double> per_layer_mae;
    double rmse = 0.0;  // mean over layers
    double mae = 0.0;

    // Filled by run_replications: per-replication layer means plus their
    // sample mean/std. std_defined is false when R == 1 (std reported as 0).
    std::vector<double> rep_rmse;
    std::vector<double> rep_mae;
    double rmse_mean = 0.0;
    double rmse_std = 0.0;
    double mae_mean = 0.0;
    double mae_std = 0.0;
    std::size_t replications = 0;
    bool std_defined = false;

    static constexpr double display_scale = 100.0;
};

/// Per-layer RMSE and MAE over the full n x n grid (the structurally zero
/// diagonal included), aggregated as the mean over layers.
inline ErrorReport rmse_mae(const ProbabilityTensor& estimate, const ProbabilityTensor& truth) {
    if (estimate.node_count() != truth.node_count() || estimate.layer_count() != truth.layer_count())
        throw ShapeMismatch("tensors differ in shape");
    const std::size_t n = estimate.node_count();
    const std::size_t layers = estimate.layer_count();
    ErrorReport r;
    r.per_layer_rmse.resize(layers);
    r.per_layer_mae.resize(layers);
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    for (std::size_t k = 0; k < layers; ++k) {
        const double* a = estimate.slice(k);
        const double* b = truth.slice(k);
        double sq = 0.0, ab = 0.0;
        for (std::size_t x = 0; x < n * n; ++x) {
            const double d = a[x] - b[x];
            sq += d * d;
            ab += std::abs(d);
        }
        r.per_layer_rmse[k] = std::sqrt(sq / nn);
        r.per_layer_mae[k] = ab / nn;
    }
    double sr = 0.0, sm = 0.0;
    for (std::size_t k = 0; k < layers; ++k) {
        sr += r.per_layer_rmse[k];
        sm += r.per_layer_mae[k];
    }
    r.rmse = sr / static_cast<double>(layers);
    r.mae = sm / static_cast<double>(layers);
    return r;
}

/// Symmetric binary held-out mask: entry 0 marks a hidden pair. The diagonal
/// is always observed (1).
struct MaskTensor {
    std::size_t n = 0;
    std::size_t layers = 0;
    std::vector<std::uint8_t> data;  // (k*n + i)*n + j
    double removal_prob = 0.0;

    std::uint8_t operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(k * n + i) * n + j];
    }
};

/// Hides each unordered pair independently with probability p (mask entry
/// Bernoulli(1-p), mirrored) and returns the observed tensor A_obs = M * A.
inline std::pair<AdjacencyTensor, MaskTensor> mask_edges(const AdjacencyTensor& a, double p,
                                                         std::uint64_t seed) {
    if (!(p >= 0.0 && p < 1.0)) throw InvalidParameter("removal probability must lie in [0, 1)");
    const std::size_t n = a.node_count();
    const std::size_t layers = a.layer_count();
    MaskTensor m;
    m.n = n;
    m.layers = layers;
    m.removal_prob = p;
    m.data.assign(n * n * layers, 1);
    std::vector<std::uint8_t> obs(a.raw().begin(), a.raw().end());
    parallel_for(layers, [&](std::size_t k) {
        std::uint8_t* ms = m.data.data() + k * n * n;
        std::uint8_t* os = obs.data() + k * n * n;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double u = rng::to_unit(rng::hash_coords(seed, {rng::kStreamMask, k, i, j}));
                const std::uint8_t keep = u >= p ? 1 : 0;
                ms[i * n + j] = keep;
                ms[j * n + i] = keep;
                os[i * n + j] &= keep;
                os[j * n + i] &= keep;
            }
        }
    });
    return {AdjacencyTensor::from_data(n, layers, std::move(obs)), std::move(m)};
}

struct RocPoint {
    double threshold = 0.0;
    double fp = 0.0;
    double tp = 0.0;
};

/// ROC points ordered by decreasing threshold (FP/TP nondecreasing), with the
/// trapezoidal AUC.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

namespace detail {

/// Held-out predictions split by true label. Off-diagonal entries with mask 0
/// only; both orientations of a pair are counted, matching a plain sum over
/// all (i, j, k).
inline void holdout_split(const ProbabilityTensor& estimate, const AdjacencyTensor& truth,
                          const MaskTensor& mask, std::vector<double>& pos, std::vector<double>& neg) {
    if (estimate.node_count() != truth.node_count() || estimate.layer_count() != truth.layer_count() ||
        mask.n != truth.node_count() || mask.layers != truth.layer_count())
        throw ShapeMismatch("tensors differ in shape");
    const std::size_t n = truth.node_count();
    for (std::size_t k = 0; k < truth.layer_count(); ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || mask(i, j, k)) continue;
                (truth(i, j, k) ? pos : neg).push_back(estimate(i, j, k));
            }
    if (pos.empty() || neg.empty())
        throw DegenerateHoldout("need at least one held-out edge and one held-out non-edge");
}

inline double trapezoid_auc(const std::vector<RocPoint>& pts) {
    double auc = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        auc += (pts[i].fp - pts[i - 1].fp) * (pts[i].tp + pts[i - 1].tp) / 2.0;
    return auc;
}

inline RocCurve curve_from_sorted(std::vector<double> pos, std::vector<double> neg,
                                  std::vector<double> thresholds) {
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    RocCurve c;
    c.points.reserve(thresholds.size());
    const double np = static_cast<double>(pos.size());
    const double nn = static_cast<double>(neg.size());
    for (double t : thresholds) {
        const double tp =
            static_cast<double>(pos.end() - std::upper_bound(pos.begin(), pos.end(), t)) / np;
        const double fp =
            static_cast<double>(neg.end() - std::upper_bound(neg.begin(), neg.end(), t)) / nn;
        c.points.push_back({t, fp, tp});
    }
    c.auc = trapezoid_auc(c.points);
    return c;
}

}  // namespace detail

/// FP(t) and TP(t) over the held-out entries, swept over every distinct
/// predicted value plus sentinels above the maximum, at 0, and below the
/// minimum (so the (0,0) and (1,1) endpoints are always present).
inline RocCurve roc_curve(const ProbabilityTensor& estimate, const AdjacencyTensor& truth,
                          const MaskTensor& mask) {
    std::vector<double> pos, neg;
    detail::holdout_split(estimate, truth, mask, pos, neg);
    std::vector<double> thresholds;
    thresholds.reserve(pos.size() + neg.size() + 3);
    thresholds.insert(thresholds.end(), pos.begin(), pos.end());
    thresholds.insert(thresholds.end(), neg.begin(), neg.end());
    const double top = *std::max_element(thresholds.begin(), thresholds.end()) + 1.0;
    thresholds.push_back(top);
    thresholds.push_back(0.0);
    thresholds.push_back(-1.0);
    return detail::curve_from_sorted(std::move(pos), std::move(neg), std::move(thresholds));
}

/// FP/TP evaluated at caller-supplied thresholds (used to average replicated
/// curves on a shared grid).
inline RocCurve roc_curve_at(const ProbabilityTensor& estimate, const AdjacencyTensor& truth,
                             const MaskTensor& mask, std::vector<double> thresholds) {
    if (thresholds.empty()) throw InvalidParameter("threshold grid is empty");
    std::vector<double> pos, neg;
    detail::holdout_split(estimate, truth, mask, pos, neg);
    return detail::curve_from_sorted(std::move(pos), std::move(neg), std::move(thresholds));
}

/// Held-out predictions of one replication split by true label (positives
/// first). Useful for pooling replicated curves onto one threshold grid.
inline std::pair<std::vector<double>, std::vector<double>> holdout_scores(
    const ProbabilityTensor& estimate, const AdjacencyTensor& truth, const MaskTensor& mask) {
    std::vector<double> pos, neg;
    detail::holdout_split(estimate, truth, mask, pos, neg);
    return {std::move(pos), std::move(neg)};
}

/// Curve from pre-split scores at the given thresholds.
inline RocCurve roc_from_scores(std::vector<double> pos, std::vector<double> neg,
                                std::vector<double> thresholds) {
    if (pos.empty() || neg.empty())
        throw DegenerateHoldout("need at least one held-out edge and one held-out non-edge");
    if (thresholds.empty()) throw InvalidParameter("threshold grid is empty");
    return detail::curve_from_sorted(std::move(pos), std::move(neg), std::move(thresholds));
}

/// Distinct predicted values on the held-out entry set of one replication.
inline std::vector<double> holdout_values(const ProbabilityTensor& estimate, const MaskTensor& mask) {
    const std::size_t n = mask.n;
    std::vector<double> vals;
    for (std::size_t k = 0; k < mask.layers; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && !mask(i, j, k)) vals.push_back(estimate(i, j, k));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

/// Pointwise mean of curves sharing one threshold grid.
inline RocCurve average_roc(const std::vector<RocCurve>& curves) {
    if (curves.empty()) throw InvalidParameter("no curves to average");
    const std::size_t npts = curves.front().points.size();
    for (const RocCurve& c : curves)
        if (c.points.size() != npts) throw ShapeMismatch("curves do not share a threshold grid");
    RocCurve avg;
    avg.points.resize(npts);
    for (std::size_t x = 0; x < npts; ++x) {
        double fp = 0.0, tp = 0.0;
        for (const RocCurve& c : curves) {
            if (c.points[x].threshold != curves.front().points[x].threshold)
                throw ShapeMismatch("curves do not share a threshold grid");
            fp += c.points[x].fp;
            tp += c.points[x].tp;
        }
        avg.points[x] = {curves.front().points[x].threshold, fp / static_cast<double>(curves.size()),
                         tp / static_cast<double>(curves.size())};
    }
    avg.auc = detail::trapezoid_auc(avg.points);
    return avg;
}

/// One synthetic experiment cell: estimate the tensor drawn from a graphon.
struct ReplicationConfig {
    GraphonSpec graphon = GraphonSpec::constant(0.5);
    std::size_t n = 0;
    std::size_t layers = 0;
    double c = 2.0;
    Method method = Method::Mns;
    std::uint64_t seed = 0;
};

namespace detail {

inline ProbabilityTensor estimate_with(const AdjacencyTensor& a, Method method, double c) {
    if (method == Method::Mns) return mns_estimate(a, c);
    return ns_estimate_all(a, c);
}

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
    const double m =
        std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() < 2) return {m, 0.0};
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return {m, std::sqrt(acc / static_cast<double>(v.size() - 1))};
}

}  // namespace detail

/// Runs R independent draws with seeds derived from the master seed and
/// aggregates the per-replication layer-mean errors.
inline ErrorReport run_replications(const ReplicationConfig& cfg, std::size_t reps) {
    if (reps < 1) throw InvalidParameter("need at least one replication");
    ErrorReport out;
    out.rep_rmse.resize(reps);
    out.rep_mae.resize(reps);
    parallel_for(reps, [&](std::size_t r) {
        const std::uint64_t seed = rng::derive_seed(cfg.seed, r);
        const LatentDraw latents = sample_latents(cfg.n, cfg.layers, seed);
        const ProbabilityTensor truth = build_probability_tensor(cfg.graphon, latents);
        const AdjacencyTensor a = sample_adjacency(truth, seed);
        const ErrorReport rep = rmse_mae(detail::estimate_with(a, cfg.method, cfg.c), truth);
        out.rep_rmse[r] = rep.rmse;
        out.rep_mae[r] = rep.mae;
    });
    const auto [rm, rs] = detail::mean_std(out.rep_rmse);
    const auto [mm, ms] = detail::mean_std(out.rep_mae);
    out.rmse_mean = rm;
    out.rmse_std = rs;
    out.mae_mean = mm;
    out.mae_std = ms;
    out.rmse = rm;
    out.mae = mm;
    out.replications = reps;
    out.std_defined = reps >= 2;
    return out;
}

}  // namespace mns
