#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mns/mns.hpp"
#include "oracle.hpp"

using namespace mns;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mns_cli_" + std::to_string(rng::hash_coords(
                                 std::chrono::steady_clock::now().time_since_epoch().count(), {2})));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MNS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path kDataDir = fs::path(MNS_TEST_DATA_DIR);
const fs::path kFixtureEdges = kDataDir / "fixture_n6k3.csv";
const fs::path kGolden = kDataDir / "golden_estimate.json";

}  // namespace

// Hidden generator: writes the committed fixture + golden files from the loop
// reference. Run explicitly with: cli_tests "[golden-gen]"
TEST_CASE("generate golden fixture", "[.][golden-gen]") {
    const AdjacencyTensor raw = oracle::random_adjacency(6, 3, 0.5, 20260810);
    write_edge_list(kFixtureEdges, raw, {"n0", "n1", "n2", "n3", "n4", "n5"}, {"l0", "l1", "l2"});
    const PreprocessResult rt = preprocess(read_edge_list(kFixtureEdges, EdgeListFormat::Csv), {});
    REQUIRE(rt.tensor.node_count() == 6);  // no isolated nodes in the fixture
    const BandwidthParams p = compute_bandwidths(6, 3, 2.0);
    const auto slices = oracle::mns(rt.tensor, p);
    std::vector<double> data;
    for (const Matrix& m : slices)
        data.insert(data.end(), m.data(), m.data() + m.rows() * m.cols());
    const ProbabilityTensor golden = ProbabilityTensor::from_data(6, 3, data, true);
    write_probability(kGolden, golden);
}

TEST_CASE("simulate writes deterministic files", "[cli]") {
    TempDir a, b;
    const std::string common = "simulate --graphon constant:0.5 -n 10 -K 2 --seed 7 --out ";
    REQUIRE(run_cli(common + a.path.string()) == 0);
    REQUIRE(run_cli(common + b.path.string()) == 0);
    for (const char* f :
         {"probability.json", "probability_layer000.csv", "probability_layer001.csv",
          "adjacency.json", "adjacency_layer000.csv", "latents.json"}) {
        CAPTURE(f);
        REQUIRE(slurp(a.path / f) == slurp(b.path / f));
        REQUIRE(!slurp(a.path / f).empty());
    }
    // The resolved config embeds the output path, so it is compared per run.
    REQUIRE(fs::exists(a.path / "config.json"));
    const ProbabilityTensor p = read_probability(a.path / "probability.json");
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < 10; ++j) REQUIRE(p(i, j, k) == (i == j ? 0.0 : 0.5));
}

TEST_CASE("estimate matches the committed golden file", "[cli]") {
    TempDir out;
    REQUIRE(run_cli("estimate --in " + kFixtureEdges.string() + " --method mns -C 2 --out " +
                    out.path.string()) == 0);
    json manifest;
    const ProbabilityTensor got = read_probability(out.path / "estimate.json", &manifest);
    const ProbabilityTensor want = read_probability(kGolden);
    REQUIRE(got.node_count() == want.node_count());
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j)
                REQUIRE(std::abs(got(i, j, k) - want(i, j, k)) <= 1e-12);
    REQUIRE(manifest["method"] == "mns");
    REQUIRE(manifest["bandwidths"].contains("regime"));
}

TEST_CASE("ns on a single-layer input equals mns", "[cli]") {
    TempDir sim, e1, e2;
    REQUIRE(run_cli("simulate --graphon 3 -n 30 -K 1 --seed 5 --out " + sim.path.string()) == 0);
    const std::string in = (sim.path / "adjacency.json").string();
    REQUIRE(run_cli("estimate --in " + in + " --method ns --out " + e1.path.string()) == 0);
    REQUIRE(run_cli("estimate --in " + in + " --method mns --out " + e2.path.string()) == 0);
    const ProbabilityTensor ns = read_probability(e1.path / "estimate.json");
    json m2;
    const ProbabilityTensor mns_t = read_probability(e2.path / "estimate.json", &m2);
    REQUIRE(ns.raw().size() == mns_t.raw().size());
    for (std::size_t x = 0; x < ns.raw().size(); ++x) REQUIRE(ns.raw()[x] == mns_t.raw()[x]);
    REQUIRE(m2["bandwidths"]["regime"] == "single_layer");
}

TEST_CASE("evaluate on identical tensors reports zero", "[cli]") {
    TempDir sim, ev;
    REQUIRE(run_cli("simulate --graphon 2 -n 12 -K 2 --seed 3 --out " + sim.path.string()) == 0);
    const std::string p = (sim.path / "probability.json").string();
    REQUIRE(run_cli("evaluate --p-hat " + p + " --p-true " + p + " --out " + ev.path.string()) == 0);
    const json r = detail::load_json(ev.path / "report.json");
    REQUIRE(r["rmse"].get<double>() == 0.0);
    REQUIRE(r["mae"].get<double>() == 0.0);
}

TEST_CASE("inline evaluate is reproducible byte for byte", "[cli]") {
    TempDir a, b;
    const std::string common =
        "evaluate --graphon 1 -n 24 -K 6 --method mns --reps 3 --seed 11 --out ";
    REQUIRE(run_cli(common + a.path.string()) == 0);
    REQUIRE(run_cli(common + b.path.string()) == 0);
    REQUIRE(slurp(a.path / "report.csv") == slurp(b.path / "report.csv"));
    REQUIRE(slurp(a.path / "summary.csv") == slurp(b.path / "summary.csv"));
    REQUIRE(slurp(a.path / "report.csv").find("mean,") != std::string::npos);
}

TEST_CASE("config file drives commands and flags override it", "[cli]") {
    TempDir dir;
    const fs::path cfg = dir.path / "cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"graphon":"constant:0.4","n":8,"K":2,"seed":1,"out":")" << dir.path.string()
            << R"(/fromcfg"})";
    }
    REQUIRE(run_cli("simulate --config " + cfg.string()) == 0);
    REQUIRE(fs::exists(dir.path / "fromcfg" / "adjacency.json"));
    // flag overrides out
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " + dir.path.string() +
                    "/flagged") == 0);
    REQUIRE(fs::exists(dir.path / "flagged" / "adjacency.json"));
    const json persisted = detail::load_json(dir.path / "flagged" / "config.json");
    REQUIRE(persisted["n"].get<int>() == 8);
    REQUIRE(persisted["graphon"]["kind"] == "constant");
}

TEST_CASE("linkpred produces an averaged curve and auc", "[cli]") {
    TempDir dir;
    REQUIRE(run_cli("linkpred --graphon 3 -n 40 -K 6 --seed 9 --reps 3 --remove-prob 0.2 "
                    "--method mns --out " +
                    dir.path.string()) == 0);
    const json auc = detail::load_json(dir.path / "auc.json");
    REQUIRE(auc["per_rep_auc"].size() == 3);
    REQUIRE(auc["auc_mean"].get<double>() > 0.5);  // strong diagonal structure is learnable
    REQUIRE(auc["auc_mean"].get<double>() <= 1.0);
    const std::string roc = slurp(dir.path / "roc_avg.csv");
    REQUIRE(roc.rfind("threshold,fp,tp", 0) == 0);
}

TEST_CASE("exit codes distinguish usage, data and degenerate errors", "[cli]") {
    TempDir dir;
    REQUIRE(run_cli("estimate --no-such-flag") == 1);
    REQUIRE(run_cli("evaluate --graphon nope -n 8 -K 2 --seed 1 --out " + dir.path.string()) == 1);
    REQUIRE(run_cli("estimate --in /does/not/exist.json --out " + dir.path.string()) == 2);
    REQUIRE(run_cli("estimate --in /does/not/exist.csv --out " + dir.path.string()) == 2);
    REQUIRE(run_cli("linkpred --graphon constant:0.5 -n 12 -K 2 --seed 1 --reps 1 "
                    "--remove-prob 0 --out " +
                    dir.path.string()) == 3);
}

TEST_CASE("bench writes one row per grid cell", "[cli]") {
    TempDir dir;
    const fs::path cfg = dir.path / "bench.json";
    {
        std::ofstream out(cfg);
        out << R"({"n_grid":[12,16],"K_grid":[2,4],"graphons":["1"],"methods":["mns","ns"],)"
            << R"("reps":2,"seed":4,"out":")" << dir.path.string() << R"("})";
    }
    REQUIRE(run_cli("bench --config " + cfg.string()) == 0);
    const std::string csv = slurp(dir.path / "bench.csv");
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    REQUIRE(lines == 1 + 2 * 2 * 2);  // header + graphons*methods*n*K rows
}
