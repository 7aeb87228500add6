#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mns/errors.hpp"
#include "mns/evaluation.hpp"
#include "mns/graphon.hpp"
#include "mns/tensor.hpp"

namespace mns {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Multi-layer edge lists
//
// Text format: a header row `layer,src,dst` followed by one record per line
// (tab-separated for the tsv variant). Extra columns are ignored. Labels are
// arbitrary strings; indices are assigned in order of first appearance.
// ---------------------------------------------------------------------------

enum class EdgeListFormat { Csv, Tsv };

struct MultiLayerEdgeList {
    struct Record {
        std::size_t layer;
        std::size_t src;
        std::size_t dst;
    };
    std::vector<std::string> node_labels;
    std::vector<std::string> layer_labels;
    std::vector<Record> records;  // deduplicated exact (layer, src, dst) triples
};

enum class DegreeMode { UnionGraph, LayerSum };

struct PreprocessConfig {
    long min_degree = 0;       // keep nodes with degree strictly greater
    long min_layer_edges = 0;  // keep layers with at least this many nonzero entries
    bool symmetrize_input = true;
    DegreeMode degree_mode = DegreeMode::UnionGraph;
};

struct PreprocessResult {
    AdjacencyTensor tensor;
    std::vector<std::string> node_labels;
    std::vector<std::string> layer_labels;
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(field);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

inline std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

}  // namespace detail

inline MultiLayerEdgeList read_edge_list(const std::filesystem::path& path, EdgeListFormat format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    const char delim = format == EdgeListFormat::Csv ? ',' : '\t';

    MultiLayerEdgeList out;
    std::map<std::string, std::size_t> node_index, layer_index;
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;

    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_line(line, delim);
        if (!have_header) {
            if (fields.size() < 3 || detail::trim(fields[0]) != "layer" ||
                detail::trim(fields[1]) != "src" || detail::trim(fields[2]) != "dst")
                throw ParseError("expected header 'layer,src,dst'", line_no);
            have_header = true;
            continue;
        }
        if (fields.size() < 3) throw ParseError("expected at least 3 fields", line_no);
        const std::string layer = detail::trim(fields[0]);
        const std::string src = detail::trim(fields[1]);
        const std::string dst = detail::trim(fields[2]);
        if (layer.empty() || src.empty() || dst.empty())
            throw ParseError("empty field", line_no);
        const auto intern = [](std::map<std::string, std::size_t>& index,
                               std::vector<std::string>& labels, const std::string& s) {
            auto [it, inserted] = index.try_emplace(s, labels.size());
            if (inserted) labels.push_back(s);
            return it->second;
        };
        const std::size_t k = intern(layer_index, out.layer_labels, layer);
        const std::size_t a = intern(node_index, out.node_labels, src);
        const std::size_t b = intern(node_index, out.node_labels, dst);
        if (seen.insert({k, a, b}).second) out.records.push_back({k, a, b});
    }
    if (!have_header) throw EmptyFile("no content in " + path.string());
    if (out.records.empty()) throw EmptyFile("no edge records in " + path.string());
    return out;
}

/// Writes one record per undirected edge (src index < dst index).
inline void write_edge_list(const std::filesystem::path& path, const AdjacencyTensor& a,
                            const std::vector<std::string>& node_labels,
                            const std::vector<std::string>& layer_labels,
                            EdgeListFormat format = EdgeListFormat::Csv) {
    if (node_labels.size() != a.node_count() || layer_labels.size() != a.layer_count())
        throw ShapeMismatch("label count does not match tensor shape");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    const char delim = format == EdgeListFormat::Csv ? ',' : '\t';
    out << "layer" << delim << "src" << delim << "dst\n";
    for (std::size_t k = 0; k < a.layer_count(); ++k)
        for (std::size_t i = 0; i < a.node_count(); ++i)
            for (std::size_t j = i + 1; j < a.node_count(); ++j)
                if (a(i, j, k))
                    out << layer_labels[k] << delim << node_labels[i] << delim << node_labels[j]
                        << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

/// Applies the node-degree filter, rebuilds the per-layer adjacency over the
/// surviving nodes, then applies the per-layer edge-count filter (ordered
/// nonzero entries, so an undirected edge counts twice). Self-loop records are
/// dropped. With symmetrize_input every record is an undirected edge; without
/// it only mutual record pairs count.
inline PreprocessResult preprocess(const MultiLayerEdgeList& edges, const PreprocessConfig& cfg) {
    if (cfg.min_degree < 0 || cfg.min_layer_edges < 0)
        throw InvalidParameter("filter thresholds must be nonnegative");
    const std::size_t n0 = edges.node_labels.size();
    const std::size_t k0 = edges.layer_labels.size();

    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> directed;
    for (const auto& r : edges.records)
        if (r.src != r.dst) directed.insert({r.layer, r.src, r.dst});
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> undirected;  // (k, min, max)
    for (const auto& [k, a, b] : directed) {
        if (!cfg.symmetrize_input && !directed.count({k, b, a})) continue;
        undirected.insert({k, std::min(a, b), std::max(a, b)});
    }

    // Degree filter on the original node set.
    std::vector<long> degree(n0, 0);
    if (cfg.degree_mode == DegreeMode::UnionGraph) {
        std::set<std::pair<std::size_t, std::size_t>> union_edges;
        for (const auto& [k, a, b] : undirected) union_edges.insert({a, b});
        for (const auto& [a, b] : union_edges) {
            ++degree[a];
            ++degree[b];
        }
    } else {
        for (const auto& [k, a, b] : undirected) {
            ++degree[a];
            ++degree[b];
        }
    }
    std::vector<std::size_t> node_map(n0, static_cast<std::size_t>(-1));
    PreprocessResult res{AdjacencyTensor(1, 1), {}, {}};
    for (std::size_t v = 0; v < n0; ++v)
        if (degree[v] > cfg.min_degree) {
            node_map[v] = res.node_labels.size();
            res.node_labels.push_back(edges.node_labels[v]);
        }
    const std::size_t n = res.node_labels.size();
    if (n < 2) throw EmptyAfterFilter("fewer than 2 nodes survive the degree filter");

    // Layer filter over the surviving nodes.
    std::vector<std::vector<Edge>> per_layer(k0);
    for (const auto& [k, a, b] : undirected) {
        const std::size_t ia = node_map[a];
        const std::size_t ib = node_map[b];
        if (ia == static_cast<std::size_t>(-1) || ib == static_cast<std::size_t>(-1)) continue;
        per_layer[k].push_back({ia, ib, 0});
    }
    std::vector<Edge> kept_edges;
    for (std::size_t k = 0; k < k0; ++k) {
        const long nonzero = 2 * static_cast<long>(per_layer[k].size());
        if (nonzero < cfg.min_layer_edges) continue;
        const std::size_t kk = res.layer_labels.size();
        res.layer_labels.push_back(edges.layer_labels[k]);
        for (Edge e : per_layer[k]) kept_edges.push_back({e.i, e.j, kk});
    }
    if (res.layer_labels.empty()) throw EmptyAfterFilter("no layers survive the edge-count filter");
    res.tensor = build_adjacency(n, res.layer_labels.size(), kept_edges);
    return res;
}

// ---------------------------------------------------------------------------
// Tensor persistence: one CSV per layer plus a JSON manifest
// {format, kind, n, layers, node_labels, layer_labels, files}. Probability
// values are written with 17 significant digits (lossless for doubles).
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IoError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

inline void save_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::vector<std::string> layer_file_names(const std::string& stem, std::size_t layers) {
    std::vector<std::string> names;
    names.reserve(layers);
    for (std::size_t k = 0; k < layers; ++k) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "_layer%03zu.csv", k);
        names.push_back(stem + buf);
    }
    return names;
}

template <class WriteCell>
void write_layer_csv(const std::filesystem::path& path, std::size_t n, WriteCell&& cell) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ',';
            cell(out, i, j);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::vector<std::vector<std::string>> read_csv_cells(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_line(line, ','));
    }
    return rows;
}

inline json tensor_manifest(const std::string& kind, std::size_t n, std::size_t layers,
                            const std::vector<std::string>& node_labels,
                            const std::vector<std::string>& layer_labels,
                            const std::vector<std::string>& files) {
    json j;
    j["format"] = "mns-tensor";
    j["kind"] = kind;
    j["n"] = n;
    j["layers"] = layers;
    j["node_labels"] = node_labels;
    j["layer_labels"] = layer_labels;
    j["files"] = files;
    return j;
}

struct ManifestInfo {
    std::string kind;
    std::size_t n;
    std::size_t layers;
    std::vector<std::string> node_labels;
    std::vector<std::string> layer_labels;
    std::vector<std::filesystem::path> files;
    json raw;
};

inline ManifestInfo read_manifest(const std::filesystem::path& path, const std::string& want_kind) {
    const json j = load_json(path);
    if (!j.contains("format") || j["format"] != "mns-tensor")
        throw ManifestMismatch("not a tensor manifest: " + path.string());
    ManifestInfo info;
    info.raw = j;
    info.kind = j.value("kind", "");
    if (info.kind != want_kind)
        throw ManifestMismatch("manifest kind '" + info.kind + "', expected '" + want_kind + "'");
    info.n = j.at("n").get<std::size_t>();
    info.layers = j.at("layers").get<std::size_t>();
    info.node_labels = j.value("node_labels", std::vector<std::string>{});
    info.layer_labels = j.value("layer_labels", std::vector<std::string>{});
    const auto files = j.at("files").get<std::vector<std::string>>();
    if (files.size() != info.layers)
        throw ManifestMismatch("manifest lists " + std::to_string(files.size()) + " files for " +
                               std::to_string(info.layers) + " layers");
    for (const auto& f : files) info.files.push_back(path.parent_path() / f);
    return info;
}

}  // namespace detail

inline void write_adjacency(const std::filesystem::path& manifest_path, const AdjacencyTensor& a,
                            std::vector<std::string> node_labels = {},
                            std::vector<std::string> layer_labels = {}) {
    const std::string stem = manifest_path.stem().string();
    const auto files = detail::layer_file_names(stem, a.layer_count());
    for (std::size_t k = 0; k < a.layer_count(); ++k) {
        detail::write_layer_csv(manifest_path.parent_path() / files[k], a.node_count(),
                                [&](std::ostream& out, std::size_t i, std::size_t j) {
                                    out << static_cast<int>(a(i, j, k));
                                });
    }
    detail::save_json(manifest_path, detail::tensor_manifest("adjacency", a.node_count(),
                                                             a.layer_count(), node_labels,
                                                             layer_labels, files));
}

inline void write_probability(const std::filesystem::path& manifest_path, const ProbabilityTensor& p,
                              std::vector<std::string> node_labels = {},
                              std::vector<std::string> layer_labels = {}, json extra = {}) {
    const std::string stem = manifest_path.stem().string();
    const auto files = detail::layer_file_names(stem, p.layer_count());
    for (std::size_t k = 0; k < p.layer_count(); ++k) {
        detail::write_layer_csv(manifest_path.parent_path() / files[k], p.node_count(),
                                [&](std::ostream& out, std::size_t i, std::size_t j) {
                                    out << detail::fmt17(p(i, j, k));
                                });
    }
    json j = detail::tensor_manifest("probability", p.node_count(), p.layer_count(), node_labels,
                                     layer_labels, files);
    j["symmetrized"] = p.symmetrized();
    for (auto& [key, val] : extra.items()) j[key] = val;
    detail::save_json(manifest_path, j);
}

namespace detail {

template <class Cell>
void read_layers(const ManifestInfo& info, Cell&& cell) {
    for (std::size_t k = 0; k < info.layers; ++k) {
        const auto rows = read_csv_cells(info.files[k]);
        if (rows.size() != info.n)
            throw ManifestMismatch(info.files[k].string() + ": " + std::to_string(rows.size()) +
                                   " rows, manifest says n=" + std::to_string(info.n));
        for (std::size_t i = 0; i < info.n; ++i) {
            if (rows[i].size() != info.n)
                throw ManifestMismatch(info.files[k].string() + ": row " + std::to_string(i) +
                                       " has " + std::to_string(rows[i].size()) + " columns");
            for (std::size_t j = 0; j < info.n; ++j) cell(i, j, k, rows[i][j]);
        }
    }
}

}  // namespace detail

inline AdjacencyTensor read_adjacency(const std::filesystem::path& manifest_path,
                                      std::vector<std::string>* node_labels = nullptr,
                                      std::vector<std::string>* layer_labels = nullptr) {
    const auto info = detail::read_manifest(manifest_path, "adjacency");
    std::vector<std::uint8_t> data(info.n * info.n * info.layers, 0);
    detail::read_layers(info, [&](std::size_t i, std::size_t j, std::size_t k, const std::string& s) {
        if (s == "0")
            data[(k * info.n + i) * info.n + j] = 0;
        else if (s == "1")
            data[(k * info.n + i) * info.n + j] = 1;
        else
            throw ManifestMismatch("adjacency cell '" + s + "' is not 0/1");
    });
    if (node_labels) *node_labels = info.node_labels;
    if (layer_labels) *layer_labels = info.layer_labels;
    try {
        return AdjacencyTensor::from_data(info.n, info.layers, std::move(data));
    } catch (const InvalidParameter& e) {
        throw ManifestMismatch(std::string("invalid adjacency data: ") + e.what());
    }
}

inline ProbabilityTensor read_probability(const std::filesystem::path& manifest_path,
                                          json* manifest_out = nullptr) {
    const auto info = detail::read_manifest(manifest_path, "probability");
    std::vector<double> data(info.n * info.n * info.layers, 0.0);
    detail::read_layers(info, [&](std::size_t i, std::size_t j, std::size_t k, const std::string& s) {
        try {
            data[(k * info.n + i) * info.n + j] = std::stod(s);
        } catch (const std::exception&) {
            throw ManifestMismatch("probability cell '" + s + "' is not a number");
        }
    });
    if (manifest_out) *manifest_out = info.raw;
    const bool sym = info.raw.value("symmetrized", false);
    try {
        return ProbabilityTensor::from_data(info.n, info.layers, std::move(data), sym);
    } catch (const InvalidParameter& e) {
        throw ManifestMismatch(std::string("invalid probability data: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Latent draws
// ---------------------------------------------------------------------------

inline void write_latents(const std::filesystem::path& path, const LatentDraw& d) {
    json j;
    j["format"] = "mns-latents";
    j["seed"] = d.seed;
    j["xi"] = d.xi;
    j["eta"] = d.eta;
    detail::save_json(path, j);
}

inline LatentDraw read_latents(const std::filesystem::path& path) {
    const json j = detail::load_json(path);
    if (!j.contains("format") || j["format"] != "mns-latents")
        throw ManifestMismatch("not a latents file: " + path.string());
    LatentDraw d;
    d.seed = j.at("seed").get<std::uint64_t>();
    d.xi = j.at("xi").get<std::vector<double>>();
    d.eta = j.at("eta").get<std::vector<double>>();
    return d;
}

// ---------------------------------------------------------------------------
// Graphon spec JSON: {"kind": "...", "params": {...}}
// ---------------------------------------------------------------------------

inline json graphon_to_json(const GraphonSpec& spec) {
    json j;
    j["kind"] = spec.kind_name();
    j["params"] = json::object();
    switch (spec.kind()) {
        case GraphonKind::Constant:
            j["params"]["c"] = spec.constant_value();
            break;
        case GraphonKind::Blocks: {
            const char* base = spec.log_base() == LogBase::Natural ? "e"
                               : spec.log_base() == LogBase::Base2 ? "2"
                                                                   : "10";
            j["params"]["log_base"] = base;
            break;
        }
        case GraphonKind::Tabulated: {
            const TabulatedGrid& g = spec.grid();
            j["params"]["shape"] = {g.nu, g.nv, g.nw};
            j["params"]["values"] = g.values;
            break;
        }
        default:
            break;
    }
    return j;
}

inline GraphonSpec graphon_from_json(const json& j) {
    if (!j.contains("kind")) throw InvalidParameter("graphon spec is missing 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    const json params = j.value("params", json::object());
    if (kind == "blocks") {
        const std::string base = params.value("log_base", "e");
        if (base == "e") return GraphonSpec::blocks(LogBase::Natural);
        if (base == "2") return GraphonSpec::blocks(LogBase::Base2);
        if (base == "10") return GraphonSpec::blocks(LogBase::Base10);
        throw InvalidParameter("unknown log_base '" + base + "'");
    }
    if (kind == "sine_wave") return GraphonSpec::sine_wave();
    if (kind == "diagonal_dominant") return GraphonSpec::diagonal_dominant();
    if (kind == "full_rank_cosine") return GraphonSpec::full_rank_cosine();
    if (kind == "constant") {
        if (!params.contains("c")) throw InvalidParameter("constant graphon needs params.c");
        return GraphonSpec::constant(params.at("c").get<double>());
    }
    if (kind == "tabulated") {
        if (!params.contains("shape") || !params.contains("values"))
            throw InvalidParameter("tabulated graphon needs params.shape and params.values");
        const auto shape = params.at("shape").get<std::vector<std::size_t>>();
        if (shape.size() != 3) throw InvalidParameter("tabulated shape must have 3 entries");
        TabulatedGrid g;
        g.nu = shape[0];
        g.nv = shape[1];
        g.nw = shape[2];
        g.values = params.at("values").get<std::vector<double>>();
        return GraphonSpec::tabulated(std::move(g));
    }
    throw InvalidParameter("unknown graphon kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json report_to_json(const ErrorReport& r) {
    json j;
    j["rmse"] = r.rmse;
    j["mae"] = r.mae;
    j["rmse_x100"] = r.rmse * ErrorReport::display_scale;
    j["mae_x100"] = r.mae * ErrorReport::display_scale;
    if (!r.per_layer_rmse.empty()) {
        j["per_layer_rmse"] = r.per_layer_rmse;
        j["per_layer_mae"] = r.per_layer_mae;
    }
    if (r.replications > 0) {
        j["replications"] = r.replications;
        j["std_defined"] = r.std_defined;
        j["rmse_mean_x100"] = r.rmse_mean * ErrorReport::display_scale;
        j["rmse_std_x100"] = r.rmse_std * ErrorReport::display_scale;
        j["mae_mean_x100"] = r.mae_mean * ErrorReport::display_scale;
        j["mae_std_x100"] = r.mae_std * ErrorReport::display_scale;
        j["rep_rmse"] = r.rep_rmse;
        j["rep_mae"] = r.rep_mae;
    }
    return j;
}

/// Table-style "mean (std)" string of x100 display values.
inline std::string format_mean_std(double mean_raw, double std_raw) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f (%.2f)", mean_raw * ErrorReport::display_scale,
                  std_raw * ErrorReport::display_scale);
    return buf;
}

/// One row per layer (single evaluation) or per replication, then a summary
/// row. Values are on the x100 display scale.
inline void write_report_csv(const std::filesystem::path& path, const ErrorReport& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    const double s = ErrorReport::display_scale;
    if (r.replications > 0) {
        out << "replication,rmse_x100,mae_x100\n";
        for (std::size_t i = 0; i < r.rep_rmse.size(); ++i)
            out << i << ',' << detail::fmt17(r.rep_rmse[i] * s) << ','
                << detail::fmt17(r.rep_mae[i] * s) << '\n';
        out << "mean," << detail::fmt17(r.rmse_mean * s) << ',' << detail::fmt17(r.mae_mean * s)
            << '\n';
        out << "std," << detail::fmt17(r.rmse_std * s) << ',' << detail::fmt17(r.mae_std * s) << '\n';
    } else {
        out << "layer,rmse_x100,mae_x100\n";
        for (std::size_t k = 0; k < r.per_layer_rmse.size(); ++k)
            out << k << ',' << detail::fmt17(r.per_layer_rmse[k] * s) << ','
                << detail::fmt17(r.per_layer_mae[k] * s) << '\n';
        out << "mean," << detail::fmt17(r.rmse * s) << ',' << detail::fmt17(r.mae * s) << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

inline json roc_to_json(const RocCurve& c) {
    json j;
    j["auc"] = c.auc;
    json pts = json::array();
    for (const RocPoint& p : c.points) pts.push_back({{"threshold", p.threshold}, {"fp", p.fp}, {"tp", p.tp}});
    j["points"] = pts;
    return j;
}

inline void write_roc_csv(const std::filesystem::path& path, const RocCurve& c) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "threshold,fp,tp\n";
    for (const RocPoint& p : c.points)
        out << detail::fmt17(p.threshold) << ',' << detail::fmt17(p.fp) << ',' << detail::fmt17(p.tp)
            << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace mns
