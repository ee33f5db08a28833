#include "tumorgnn/pipeline/commands.hpp"
#include "tumorgnn/pipeline/config.hpp"
#include "tumorgnn/pipeline/dataset.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace tumorgnn;
using namespace tumorgnn::pipeline;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("tumorgnn_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Smallest configuration that still covers the cut battery.
PipelineConfig tiny_config() {
    PipelineConfig c = desk_preset();
    c.master_seed = 3;
    c.sim.global.max_birth_events = 70000;
    c.tumors = {2, 2, 2};
    c.dataset_mutation_probabilities = {0.05, 0.2};
    c.patches.per_cut = 4;
    c.features.volume_samples = 2000;
    c.model.d = 8;
    c.model.d_prime = 8;
    c.model.heads = 2;
    c.train.epochs = 2;
    c.train.batch_size = 8;
    c.ablation_masks = {{0}, {0, 1, 2, 3, 4, 5, 6}};
    c.sweep.mutation_probabilities = {0.03, 0.1, 0.2};
    c.sweep.tumors_per_level = 1;
    return c;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(TUMORGNN_CLI) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config json round trip and overlay") {
    for (const char* name : {"paper", "desk"}) {
        PipelineConfig c = preset(name);
        CHECK_NOTHROW(c.validate());
        json j = to_json(c);
        PipelineConfig back = from_json(j, PipelineConfig{});
        CHECK(to_json(back) == j);
        CHECK(to_json(from_json(json::parse(j.dump()), PipelineConfig{})).dump() == j.dump());
    }
    PipelineConfig desk = desk_preset();
    CHECK(desk.tumors.train == 16);
    CHECK(desk.tumors.val == 2);
    CHECK(desk.tumors.test == 2);
    CHECK(desk.sim.global.max_birth_events == 100000);
    CHECK(desk.patches.per_cut >= 20);
    CHECK(desk.model.heads == 4);
    CHECK(desk.train.epochs == 25);
    CHECK(desk.train.decay_factor == 0.4);
    CHECK(desk.train.decay_period == 5);
    PipelineConfig paper = paper_preset();
    CHECK(paper.tumors.total() == 200);
    CHECK(paper.patches.per_cut == 100);
    CHECK(paper.train.epochs == 200);
    CHECK(paper.train.decay_factor == 0.5);
    CHECK(paper.train.decay_period == 33);
    CHECK(paper.model.d == 64);
    CHECK(paper.model.dropout == 0.15);
    CHECK(paper.labeling.threshold == 0.4);
    CHECK(paper.labeling.margin == 0.05);
    CHECK_THROWS_AS(preset("huge"), ConfigError);

    PipelineConfig o = from_json(json::parse(R"({"patches":{"per_cut":7},"model":{"heads":2}})"), desk);
    CHECK(o.patches.per_cut == 7);
    CHECK(o.patches.radius == desk.patches.radius);
    CHECK(o.model.heads == 2);
    CHECK(o.model.d == desk.model.d);
    CHECK(o.train == desk.train);

    CHECK_THROWS_AS(from_json(json::parse(R"({"model":{"variant":"deep"}})"), desk), ConfigError);
    CHECK_THROWS_AS(from_json(json::parse(R"({"model":{"heads":3}})"), desk).validate(), ConfigError);
    PipelineConfig bad = desk;
    bad.tumors.test = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = desk;
    bad.dataset_mutation_probabilities = {1.5};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(desk.required_end_time() == 61.0);
}

TEST_CASE("tumor allocation and seeds") {
    PipelineConfig c = desk_preset();
    auto alloc = tumor_allocation(c);
    REQUIRE(alloc.size() == 20);
    std::map<Split, std::multiset<double>> per;
    for (auto [s, p] : alloc) per[s].insert(p);
    CHECK(per[Split::train].size() == 16);
    for (Split s : {Split::train, Split::val, Split::test}) {
        CHECK(*per[s].begin() == c.dataset_mutation_probabilities.front());
        CHECK(*per[s].rbegin() == c.dataset_mutation_probabilities.back());
    }
    for (double p : c.dataset_mutation_probabilities) CHECK(per[Split::train].count(p) >= 3);

    CHECK(tumor_seed(1, 0, 0, 0) == tumor_seed(1, 0, 0, 0));
    std::set<std::uint64_t> seeds;
    for (std::uint64_t m : {1, 2})
        for (std::uint64_t s = 0; s < 3; ++s)
            for (std::uint64_t i = 0; i < 5; ++i)
                for (int a = 0; a < 3; ++a) seeds.insert(tumor_seed(m, s, i, a));
    CHECK(seeds.size() == 2 * 3 * 5 * 3);
}

TEST_CASE("spearman and trend table") {
    CHECK(spearman({1, 2, 3, 4, 5}, {0.1, 0.2, 0.5, 0.7, 0.9}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 2, 3}, {0.5, 0.5, 0.5}) == 0.0);
    // Average ranks for ties: x ranks (1, 2.5, 2.5, 4), y ranks (1, 2, 3, 4).
    CHECK(spearman({1, 2, 2, 3}, {1, 2, 3, 4}) == doctest::Approx(4.5 / std::sqrt(4.5 * 5.0)).epsilon(1e-12));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x(8), y(8);
        for (auto& v : x) v = u(rng);
        for (auto& v : y) v = u(rng);
        double r = spearman(x, y);
        CHECK(r >= -1.0 - 1e-12);
        CHECK(r <= 1.0 + 1e-12);
        std::vector<double> y3 = y;
        for (auto& v : y3) v = v * v * v;  // monotone transform
        CHECK(spearman(x, y3) == doctest::Approx(r).epsilon(1e-12));
    }
    json t = trend_table({0.01, 0.05, 0.1}, {0.1, 0.3, 0.6});
    CHECK(t["spearman"].get<double>() == doctest::Approx(1.0));
    CHECK(t["levels"].size() == 3);
}

TEST_CASE("end-to-end commands are deterministic") {
    PipelineConfig c = tiny_config();
    fs::path root = scratch_dir("e2e");
    json sim = cmd_simulate(c, root / "traces", false);
    CHECK(fs::exists(root / "traces" / "manifest.json"));
    CHECK(sim["tumors"].size() == 6);
    CHECK_THROWS_AS(cmd_simulate(c, root / "traces", false), DataError);
    cmd_simulate(c, root / "traces2", false);
    CHECK(slurp(root / "traces" / "tumor_000.trace") == slurp(root / "traces2" / "tumor_000.trace"));
    CHECK(slurp(root / "traces" / "manifest.json") == slurp(root / "traces2" / "manifest.json"));

    cmd_dataset(c, root / "traces", root / "data", false);
    cmd_dataset(c, root / "traces2", root / "data2", false);
    for (const char* f : {"train.jsonl", "val.jsonl", "test.jsonl", "stats.json"})
        CHECK(slurp(root / "data" / f) == slurp(root / "data2" / f));

    auto train = load_split(root / "data", Split::train);
    REQUIRE(!train.empty());
    std::size_t low = 0;
    for (const auto& r : train) {
        low += r.label.cls == label::HeterogeneityClass::low;
        CHECK(r.graph.nodes.size() > c.patches.min_nodes);
        CHECK(r.graph.edges.size() > c.patches.min_edges);
        CHECK(r.features.rows == r.graph.nodes.size());
        CHECK(record_from_json(record_to_json(r)).features == r.features);
        CHECK(record_from_json(record_to_json(r)).graph == r.graph);
    }
    CHECK(2 * low == train.size());

    json rep = cmd_train(c, root / "data", root / "run", false);
    CHECK(fs::exists(root / "run" / "checkpoint.bin"));
    CHECK(fs::exists(root / "run" / "metrics.csv"));
    CHECK(rep["model"].get<std::string>() == "vanilla/2-head");
    cmd_train(c, root / "data", root / "run2", false);
    CHECK(slurp(root / "run" / "metrics.csv") == slurp(root / "run2" / "metrics.csv"));
    CHECK(slurp(root / "run" / "checkpoint.bin") == slurp(root / "run2" / "checkpoint.bin"));
    json ev = cmd_eval(root / "run" / "checkpoint.bin", root / "data");
    CHECK(ev["test_acc"].get<double>() == rep["best"]["test_acc"].get<double>());

    json ab = cmd_ablate(c, root / "data", root / "abl", false);
    CHECK(ab["rows"].size() == 2);
    CHECK(fs::exists(root / "abl" / "ablation.csv"));

    CHECK_THROWS_AS(cmd_dataset(c, root / "missing", root / "data3", false), DataError);
    CHECK_THROWS_AS(cmd_eval(root / "missing.bin", root / "data"), DataError);
    fs::remove_all(root);
}

TEST_CASE("cli exit codes") {
    fs::path root = scratch_dir("cli");
    fs::create_directories(root);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("--preset galactic simulate --out " + (root / "x").string()) == 2);
    {
        std::ofstream bad(root / "bad.json");
        bad << "{ not json";
    }
    CHECK(run_cli("--config " + (root / "bad.json").string() + " simulate --out " + (root / "x").string()) == 2);
    CHECK(run_cli("--config " + (root / "nope.json").string() + " simulate --out " + (root / "x").string()) == 2);
    CHECK(run_cli("dataset --traces " + (root / "none").string() + " --out " + (root / "d").string()) == 3);
    CHECK(run_cli("eval --checkpoint " + (root / "none.bin").string() + " --dataset " + root.string()) == 3);
    fs::remove_all(root);
}
