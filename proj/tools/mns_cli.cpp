// Command-line front end: reproducible simulation, estimation and evaluation
// experiments for multi-layer networks. A JSON config is the source of truth;
// flags override individual fields and the resolved config is persisted next
// to the outputs.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mns/mns.hpp"

namespace fs = std::filesystem;
using mns::json;

namespace {

struct Flags {
    std::string config;
    std::string out = ".";
    std::string in;
    std::string p_hat;
    std::string p_true;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::size_t n = 0;
    std::size_t layers = 0;
    double c = 2.0;
    std::string method = "mns";
    std::size_t reps = 1;
    std::string graphon;
    double remove_prob = 0.1;
    long min_degree = 0;
    long min_layer_edges = 0;
    std::string format = "csv";
};

mns::GraphonSpec parse_graphon_string(const std::string& s) {
    if (s == "1" || s == "2" || s == "3" || s == "4") return mns::GraphonSpec::builtin(s[0] - '0');
    if (s == "blocks") return mns::GraphonSpec::blocks();
    if (s == "sine_wave") return mns::GraphonSpec::sine_wave();
    if (s == "diagonal_dominant") return mns::GraphonSpec::diagonal_dominant();
    if (s == "full_rank_cosine") return mns::GraphonSpec::full_rank_cosine();
    if (s.rfind("constant:", 0) == 0) return mns::GraphonSpec::constant(std::stod(s.substr(9)));
    throw mns::InvalidParameter("unknown graphon '" + s +
                                "' (use 1..4, a family name, or constant:<c>)");
}

mns::GraphonSpec graphon_from_config(const json& cfg) {
    if (!cfg.contains("graphon")) throw mns::InvalidParameter("config needs a graphon");
    const json& g = cfg.at("graphon");
    if (g.is_string()) return parse_graphon_string(g.get<std::string>());
    return mns::graphon_from_json(g);
}

mns::Method parse_method(const std::string& m) {
    if (m == "mns") return mns::Method::Mns;
    if (m == "ns") return mns::Method::Ns;
    throw mns::InvalidParameter("method must be 'mns' or 'ns'");
}

mns::EdgeListFormat parse_format(const std::string& f) {
    if (f == "csv") return mns::EdgeListFormat::Csv;
    if (f == "tsv") return mns::EdgeListFormat::Tsv;
    throw mns::InvalidParameter("format must be 'csv' or 'tsv'");
}

/// Merges the config file with explicitly set flags (flags win) and fills in
/// defaults for anything still missing.
json resolve_config(const CLI::App& cmd, const Flags& f) {
    json cfg = json::object();
    if (!f.config.empty()) cfg = mns::detail::load_json(f.config);
    const auto set_if = [&](const char* flag, const char* key, auto value) {
        if (cmd.count(flag) > 0 || !cfg.contains(key)) cfg[key] = value;
    };
    set_if("--out", "out", f.out);
    set_if("--in", "in", f.in);
    set_if("--p-hat", "p_hat", f.p_hat);
    set_if("--p-true", "p_true", f.p_true);
    set_if("--seed", "seed", f.seed);
    set_if("--threads", "threads", f.threads);
    set_if("-n", "n", f.n);
    set_if("-K", "K", f.layers);
    set_if("-C", "C", f.c);
    set_if("--method", "method", f.method);
    set_if("--reps", "reps", f.reps);
    set_if("--remove-prob", "remove_prob", f.remove_prob);
    set_if("--min-degree", "min_degree", f.min_degree);
    set_if("--min-layer-edges", "min_layer_edges", f.min_layer_edges);
    set_if("--format", "format", f.format);
    if (cmd.count("--graphon") > 0 || !cfg.contains("graphon")) {
        if (!f.graphon.empty()) cfg["graphon"] = f.graphon;
    }
    return cfg;
}

fs::path prepare_out(json& cfg, const std::string& command) {
    cfg["command"] = command;
    const fs::path out(cfg.at("out").get<std::string>());
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw mns::IoError("cannot create output directory " + out.string());
    mns::set_max_threads(cfg.value("threads", 0u));
    return out;
}

void persist_config(const fs::path& out, json cfg) {
    if (cfg.contains("graphon") && cfg["graphon"].is_string())
        cfg["graphon"] = mns::graphon_to_json(parse_graphon_string(cfg["graphon"].get<std::string>()));
    mns::detail::save_json(out / "config.json", cfg);
}

mns::AdjacencyTensor load_adjacency(const json& cfg) {
    if (!cfg.contains("in") || cfg.at("in").get<std::string>().empty())
        throw mns::InvalidParameter("an input path is required (--in)");
    const fs::path in(cfg.at("in").get<std::string>());
    const std::string ext = in.extension().string();
    if (ext == ".csv" || ext == ".tsv") {
        mns::PreprocessConfig pc;
        pc.min_degree = cfg.value("min_degree", 0l);
        pc.min_layer_edges = cfg.value("min_layer_edges", 0l);
        const auto fmt = ext == ".tsv" ? mns::EdgeListFormat::Tsv
                                       : parse_format(cfg.value("format", std::string("csv")));
        return mns::preprocess(mns::read_edge_list(in, fmt), pc).tensor;
    }
    return mns::read_adjacency(in);
}

int cmd_simulate(json cfg) {
    const fs::path out = prepare_out(cfg, "simulate");
    const mns::GraphonSpec graphon = graphon_from_config(cfg);
    const auto n = cfg.at("n").get<std::size_t>();
    const auto layers = cfg.at("K").get<std::size_t>();
    const auto seed = cfg.at("seed").get<std::uint64_t>();
    persist_config(out, cfg);

    const mns::LatentDraw latents = mns::sample_latents(n, layers, seed);
    const mns::ProbabilityTensor p = mns::build_probability_tensor(graphon, latents);
    const mns::AdjacencyTensor a = mns::sample_adjacency(p, seed);
    mns::write_latents(out / "latents.json", latents);
    mns::write_probability(out / "probability.json", p, {}, {},
                           json{{"graphon", mns::graphon_to_json(graphon)}, {"seed", seed}});
    mns::write_adjacency(out / "adjacency.json", a);
    std::cout << "simulated n=" << n << " K=" << layers << " -> " << out.string() << "\n";
    return 0;
}

int cmd_estimate(json cfg) {
    const fs::path out = prepare_out(cfg, "estimate");
    const mns::AdjacencyTensor a = load_adjacency(cfg);
    const double c = cfg.value("C", 2.0);
    const mns::Method method = parse_method(cfg.value("method", std::string("mns")));
    persist_config(out, cfg);

    json extra;
    extra["method"] = method == mns::Method::Mns ? "mns" : "ns";
    extra["C"] = c;
    mns::ProbabilityTensor est(1, 1);
    if (method == mns::Method::Mns) {
        const mns::BandwidthParams bw = mns::compute_bandwidths(a.node_count(), a.layer_count(), c);
        est = mns::mns_estimate(a, bw);
        extra["bandwidths"] = {
            {"h1", bw.h1},
            {"h2", bw.h2},
            {"regime", bw.regime == mns::Regime::MultiLayer ? "multi_layer" : "single_layer"}};
    } else {
        est = mns::ns_estimate_all(a, c);
        extra["bandwidths"] = {
            {"h2", std::min(1.0, mns::detail::single_layer_bandwidth(a.node_count(), c))},
            {"regime", "single_layer"}};
    }
    mns::write_probability(out / "estimate.json", est, {}, {}, extra);
    std::cout << "estimated n=" << a.node_count() << " K=" << a.layer_count() << " -> "
              << (out / "estimate.json").string() << "\n";
    return 0;
}

int cmd_evaluate(json cfg) {
    const fs::path out = prepare_out(cfg, "evaluate");
    persist_config(out, cfg);
    if (cfg.contains("p_hat") && !cfg.at("p_hat").get<std::string>().empty()) {
        if (!cfg.contains("p_true") || cfg.at("p_true").get<std::string>().empty())
            throw mns::InvalidParameter("evaluate needs both p_hat and p_true (or a graphon config)");
        const mns::ProbabilityTensor est = mns::read_probability(cfg.at("p_hat").get<std::string>());
        const mns::ProbabilityTensor truth = mns::read_probability(cfg.at("p_true").get<std::string>());
        const mns::ErrorReport r = mns::rmse_mae(est, truth);
        mns::detail::save_json(out / "report.json", mns::report_to_json(r));
        mns::write_report_csv(out / "report.csv", r);
        std::cout << "rmse_x100=" << r.rmse * 100.0 << " mae_x100=" << r.mae * 100.0 << "\n";
        return 0;
    }
    mns::ReplicationConfig rc;
    rc.graphon = graphon_from_config(cfg);
    rc.n = cfg.at("n").get<std::size_t>();
    rc.layers = cfg.at("K").get<std::size_t>();
    rc.c = cfg.value("C", 2.0);
    rc.method = parse_method(cfg.value("method", std::string("mns")));
    rc.seed = cfg.at("seed").get<std::uint64_t>();
    const auto reps = cfg.value("reps", std::size_t{1});
    const mns::ErrorReport r = mns::run_replications(rc, reps);
    mns::detail::save_json(out / "report.json", mns::report_to_json(r));
    mns::write_report_csv(out / "report.csv", r);
    {
        std::ofstream sum(out / "summary.csv", std::ios::binary);
        sum << "graphon,method,n,K,reps,rmse_mean_x100,rmse_std_x100,mae_mean_x100,mae_std_x100,"
               "rmse_display,mae_display\n";
        sum << rc.graphon.kind_name() << ',' << cfg.value("method", std::string("mns")) << ','
            << rc.n << ',' << rc.layers << ',' << reps << ','
            << mns::detail::fmt17(r.rmse_mean * 100.0) << ','
            << mns::detail::fmt17(r.rmse_std * 100.0) << ','
            << mns::detail::fmt17(r.mae_mean * 100.0) << ','
            << mns::detail::fmt17(r.mae_std * 100.0) << ','
            << mns::format_mean_std(r.rmse_mean, r.rmse_std) << ','
            << mns::format_mean_std(r.mae_mean, r.mae_std) << '\n';
    }
    std::cout << "RMSE x100: " << mns::format_mean_std(r.rmse_mean, r.rmse_std)
              << "  MAE x100: " << mns::format_mean_std(r.mae_mean, r.mae_std) << "\n";
    return 0;
}

int cmd_linkpred(json cfg) {
    const fs::path out = prepare_out(cfg, "linkpred");
    const double p = cfg.value("remove_prob", 0.1);
    const double c = cfg.value("C", 2.0);
    const mns::Method method = parse_method(cfg.value("method", std::string("mns")));
    const auto reps = cfg.value("reps", std::size_t{1});
    const auto seed = cfg.at("seed").get<std::uint64_t>();
    persist_config(out, cfg);

    mns::AdjacencyTensor a(1, 1);
    if (cfg.contains("in") && !cfg.at("in").get<std::string>().empty()) {
        a = load_adjacency(cfg);
    } else {
        const mns::GraphonSpec graphon = graphon_from_config(cfg);
        const auto n = cfg.at("n").get<std::size_t>();
        const auto layers = cfg.at("K").get<std::size_t>();
        a = mns::sample_adjacency(
            mns::build_probability_tensor(graphon, mns::sample_latents(n, layers, seed)), seed);
    }

    std::vector<std::vector<double>> pos(reps), neg(reps);
    std::vector<double> grid;
    for (std::size_t r = 0; r < reps; ++r) {
        const std::uint64_t mask_seed = mns::rng::derive_seed(seed, r);
        const auto [obs, mask] = mns::mask_edges(a, p, mask_seed);
        const mns::ProbabilityTensor est =
            method == mns::Method::Mns ? mns::mns_estimate(obs, c) : mns::ns_estimate_all(obs, c);
        auto scores = mns::holdout_scores(est, a, mask);
        grid.insert(grid.end(), scores.first.begin(), scores.first.end());
        grid.insert(grid.end(), scores.second.begin(), scores.second.end());
        pos[r] = std::move(scores.first);
        neg[r] = std::move(scores.second);
    }
    grid.push_back(*std::max_element(grid.begin(), grid.end()) + 1.0);
    grid.push_back(0.0);
    grid.push_back(-1.0);

    std::vector<mns::RocCurve> curves;
    std::vector<double> aucs;
    for (std::size_t r = 0; r < reps; ++r) {
        curves.push_back(mns::roc_from_scores(pos[r], neg[r], grid));
        aucs.push_back(curves.back().auc);
    }
    const mns::RocCurve avg = mns::average_roc(curves);
    mns::write_roc_csv(out / "roc_avg.csv", avg);
    json j;
    j["auc_of_averaged_curve"] = avg.auc;
    j["per_rep_auc"] = aucs;
    double am = 0;
    for (double x : aucs) am += x;
    am /= static_cast<double>(aucs.size());
    j["auc_mean"] = am;
    j["replications"] = reps;
    j["remove_prob"] = p;
    mns::detail::save_json(out / "auc.json", j);
    std::cout << "AUC (mean over " << reps << " mask draws): " << am << "\n";
    return 0;
}

int cmd_bench(json cfg) {
    const fs::path out = prepare_out(cfg, "bench");
    const double c = cfg.value("C", 2.0);
    const auto reps = cfg.value("reps", std::size_t{1});
    const auto seed = cfg.at("seed").get<std::uint64_t>();

    std::vector<std::size_t> n_grid, k_grid;
    if (cfg.contains("n_grid"))
        n_grid = cfg.at("n_grid").get<std::vector<std::size_t>>();
    else if (cfg.contains("n"))
        n_grid = {cfg.at("n").get<std::size_t>()};
    if (cfg.contains("K_grid"))
        k_grid = cfg.at("K_grid").get<std::vector<std::size_t>>();
    else if (cfg.contains("K"))
        k_grid = {cfg.at("K").get<std::size_t>()};
    if (n_grid.empty() || k_grid.empty())
        throw mns::InvalidParameter("bench needs n/n_grid and K/K_grid");

    std::vector<std::string> graphons;
    if (cfg.contains("graphons"))
        graphons = cfg.at("graphons").get<std::vector<std::string>>();
    else if (cfg.contains("graphon") && cfg.at("graphon").is_string())
        graphons = {cfg.at("graphon").get<std::string>()};
    else
        throw mns::InvalidParameter("bench needs graphons (strings)");
    std::vector<std::string> methods =
        cfg.contains("methods") ? cfg.at("methods").get<std::vector<std::string>>()
                                : std::vector<std::string>{cfg.value("method", std::string("mns"))};
    persist_config(out, cfg);

    std::ofstream csv(out / "bench.csv", std::ios::binary);
    csv << "graphon,method,n,K,reps,rmse_mean_x100,rmse_std_x100,mae_mean_x100,mae_std_x100\n";
    for (const std::string& g : graphons)
        for (const std::string& m : methods)
            for (std::size_t n : n_grid)
                for (std::size_t k : k_grid) {
                    mns::ReplicationConfig rc;
                    rc.graphon = parse_graphon_string(g);
                    rc.n = n;
                    rc.layers = k;
                    rc.c = c;
                    rc.method = parse_method(m);
                    rc.seed = seed;
                    const mns::ErrorReport r = mns::run_replications(rc, reps);
                    csv << g << ',' << m << ',' << n << ',' << k << ',' << reps << ','
                        << mns::detail::fmt17(r.rmse_mean * 100.0) << ','
                        << mns::detail::fmt17(r.rmse_std * 100.0) << ','
                        << mns::detail::fmt17(r.mae_mean * 100.0) << ','
                        << mns::detail::fmt17(r.mae_std * 100.0) << '\n';
                    std::cout << g << '/' << m << " n=" << n << " K=" << k
                              << " rmse_x100=" << mns::format_mean_std(r.rmse_mean, r.rmse_std)
                              << "\n";
                }
    return 0;
}

int dispatch(const std::string& name, const CLI::App& cmd, const Flags& f) {
    json cfg = resolve_config(cmd, f);
    if (name == "simulate") return cmd_simulate(std::move(cfg));
    if (name == "estimate") return cmd_estimate(std::move(cfg));
    if (name == "evaluate") return cmd_evaluate(std::move(cfg));
    if (name == "linkpred") return cmd_linkpred(std::move(cfg));
    return cmd_bench(std::move(cfg));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-layer network edge-probability estimation by neighborhood smoothing"};
    app.require_subcommand(1);
    Flags f;

    std::vector<std::pair<std::string, CLI::App*>> cmds;
    for (const char* name : {"simulate", "estimate", "evaluate", "linkpred", "bench"}) {
        CLI::App* c = app.add_subcommand(name);
        c->add_option("--config", f.config, "JSON config file (single source of truth)");
        c->add_option("--out", f.out, "output directory");
        c->add_option("--in", f.in, "input adjacency manifest (.json) or edge list (.csv/.tsv)");
        c->add_option("--p-hat", f.p_hat, "estimated probability manifest");
        c->add_option("--p-true", f.p_true, "true probability manifest");
        c->add_option("--seed", f.seed, "master seed");
        c->add_option("--threads", f.threads, "worker thread cap (0 = hardware)");
        c->add_option("-n", f.n, "node count");
        c->add_option("-K", f.layers, "layer count");
        c->add_option("-C", f.c, "bandwidth constant");
        c->add_option("--method", f.method, "mns | ns");
        c->add_option("--reps", f.reps, "replication count");
        c->add_option("--graphon", f.graphon, "1..4, family name, or constant:<c>");
        c->add_option("--remove-prob", f.remove_prob, "edge removal probability");
        c->add_option("--min-degree", f.min_degree, "drop nodes with union-graph degree <= this");
        c->add_option("--min-layer-edges", f.min_layer_edges,
                      "drop layers with fewer nonzero entries");
        c->add_option("--format", f.format, "edge list format: csv | tsv");
        cmds.emplace_back(name, c);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        for (auto& [name, cmd] : cmds)
            if (cmd->parsed()) return dispatch(name, *cmd, f);
        return 1;
    } catch (const mns::InvalidParameter& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const mns::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const mns::EmptyFile& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const mns::IoError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const mns::ManifestMismatch& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const mns::EmptyAfterFilter& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const mns::ShapeMismatch& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const mns::IndexOutOfRange& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const mns::SelfLoopRejected& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const mns::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
