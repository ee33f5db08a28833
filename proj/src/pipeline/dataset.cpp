#include "tumorgnn/pipeline/dataset.hpp"

#include "tumorgnn/seeding.hpp"
#include "tumorgnn/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace tumorgnn::pipeline {

using nlohmann::json;

namespace {

constexpr std::uint64_t kCenterTag = 0x63656e74;   // "cent"
constexpr std::uint64_t kBalanceTag = 0x62616c61;  // "bala"

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd r;
    if (v.empty()) return r;
    r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(v.size()));
    return r;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t q = i; q <= j; ++q) rank[idx[q]] = r;
        i = j + 1;
    }
    return rank;
}

}  // namespace

std::uint64_t tumor_seed(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index, int attempt) {
    return derive_seed({master_seed, stream, index, static_cast<std::uint64_t>(attempt)});
}

SimulatedTumor simulate_tumor(const PipelineConfig& cfg, std::uint64_t stream, std::size_t index, double p_mut) {
    const double needed = cfg.required_end_time();
    std::ostringstream failures;
    for (int attempt = 0; attempt < cfg.sim.max_attempts; ++attempt) {
        sim::GlobalParams gp = cfg.sim.global;
        gp.mutation_probability = p_mut;
        gp.rng_seed = tumor_seed(cfg.master_seed, stream, index, attempt);
        SimulatedTumor st;
        st.history = sim::simulate(gp, cfg.sim.initial, cfg.sim.initial_cells);
        if (!st.history.extinct() && st.history.end_time >= needed) {
            st.entry.index = index;
            st.entry.p_mut = p_mut;
            st.entry.seed = gp.rng_seed;
            st.entry.attempts = attempt + 1;
            st.entry.end_time = st.history.end_time;
            st.entry.birth_count = st.history.birth_count;
            return st;
        }
        failures << (attempt ? "; " : "") << "seed " << gp.rng_seed
                 << (st.history.extinct() ? " went extinct" : " ended early") << " at t=" << st.history.end_time;
    }
    throw DataError("tumor " + std::to_string(index) + " never reached t=" + std::to_string(needed) + " after " +
                    std::to_string(cfg.sim.max_attempts) + " attempts (" + failures.str() + ")");
}

std::vector<std::pair<Split, double>> tumor_allocation(const PipelineConfig& cfg) {
    std::vector<std::pair<Split, double>> out;
    const auto& probs = cfg.dataset_mutation_probabilities;
    auto add = [&](Split s, std::size_t n) {
        const std::size_t last = probs.size() - 1;
        for (std::size_t i = 0; i < n; ++i) {
            // Level index round(i * last / (n - 1)); a single tumor takes the middle level.
            std::size_t level = n == 1 ? last / 2 : (2 * i * last + (n - 1)) / (2 * (n - 1));
            out.emplace_back(s, probs[level]);
        }
    };
    add(Split::train, cfg.tumors.train);
    add(Split::val, cfg.tumors.val);
    add(Split::test, cfg.tumors.test);
    return out;
}

FilterCounts& FilterCounts::operator+=(const FilterCounts& o) {
    sampled += o.sampled;
    degenerate += o.degenerate;
    too_small += o.too_small;
    discarded += o.discarded;
    kept += o.kept;
    return *this;
}

json FilterCounts::to_json() const {
    return json{{"sampled", sampled},
                {"degenerate", degenerate},
                {"too_small", too_small},
                {"discarded_band", discarded},
                {"kept", kept}};
}

std::vector<PatchRecord> tumor_patches(const sim::TumorHistory& h, std::uint64_t tumor_id, const PipelineConfig& cfg,
                                       bool with_features, FilterCounts& counts) {
    std::vector<PatchRecord> out;
    for (std::size_t ci = 0; ci < cfg.cuts.size(); ++ci) {
        const cut::CutSpec& spec = cfg.cuts[ci];
        if (spec.t_end() > h.end_time)
            throw DataError("history ends at t=" + std::to_string(h.end_time) + " before cut window end " +
                            std::to_string(spec.t_end()));
        std::vector<cut::CutCell> cells = cut::extract_cut(h, spec);
        counts.sampled += cfg.patches.per_cut;
        if (cells.empty()) {
            counts.degenerate += cfg.patches.per_cut;
            continue;
        }
        std::mt19937_64 rng(derive_seed({cfg.master_seed, tumor_id, ci, kCenterTag}));
        std::vector<Vec3> centers = cut::sample_patch_centers(cells, cfg.patches.per_cut, rng);
        for (std::size_t pi = 0; pi < centers.size(); ++pi) {
            std::vector<cut::CutCell> nodes = cut::extract_patch(cells, centers[pi], cfg.patches.radius);
            if (nodes.size() < 2) {
                ++counts.degenerate;
                continue;
            }
            PatchRecord r;
            r.graph = cut::build_knn_graph(std::move(nodes), cfg.patches.k);
            r.graph.center = centers[pi];
            r.graph.radius = cfg.patches.radius;
            r.graph.source = cut::PatchSource{tumor_id, spec, static_cast<std::uint32_t>(pi)};
            r.cut_index = ci;
            if (!cut::accept_graph(r.graph, cfg.patches.min_nodes, cfg.patches.min_edges)) {
                ++counts.too_small;
                continue;
            }
            r.label = label::assign_class(label::normalized_entropy(label::clone_proportions(r.graph)), cfg.labeling);
            if (r.label.cls == label::HeterogeneityClass::discarded) {
                ++counts.discarded;
                continue;
            }
            if (with_features) r.features = feat::assemble_features(r.graph, cfg.features);
            ++counts.kept;
            out.push_back(std::move(r));
        }
    }
    return out;
}

json split_stats(const std::vector<PatchRecord>& patches) {
    std::vector<double> cells, births, deaths, entropy;
    std::size_t low = 0, high = 0;
    for (const auto& r : patches) {
        cells.push_back(static_cast<double>(r.graph.nodes.size()));
        double b = 0.0, d = 0.0;
        for (const auto& n : r.graph.nodes) {
            b += n.birth_flag;
            d += n.death_flag;
        }
        births.push_back(b);
        deaths.push_back(d);
        entropy.push_back(r.label.entropy);
        (r.label.cls == label::HeterogeneityClass::high ? high : low)++;
    }
    auto ms = [](const std::vector<double>& v) {
        MeanStd m = mean_std(v);
        return json{{"mean", m.mean}, {"std", m.std}};
    };
    return json{{"patches", patches.size()},   {"low", low},        {"high", high},
                {"cells", ms(cells)},          {"births", ms(births)}, {"deaths", ms(deaths)},
                {"entropy", ms(entropy)}};
}

Dataset build_dataset(const PipelineConfig& cfg, const std::vector<SimulatedTumor>& tumors) {
    Dataset ds;
    std::array<std::vector<PatchRecord>, 3> raw;
    for (const auto& t : tumors) {
        const auto s = static_cast<std::size_t>(t.entry.split);
        FilterCounts fc;
        auto recs = tumor_patches(t.history, t.entry.seed, cfg, true, fc);
        ds.filters[s] += fc;
        for (auto& r : recs) {
            r.split = t.entry.split;
            r.p_mut = t.entry.p_mut;
            raw[s].push_back(std::move(r));
        }
    }
    json stats = json::object();
    for (std::size_t s = 0; s < 3; ++s) {
        const char* name = to_string(static_cast<Split>(s));
        if (raw[s].empty())
            throw DataError(std::string("split '") + name + "' lost every patch to the filters: " +
                            ds.filters[s].to_json().dump());
        std::mt19937_64 rng(derive_seed({cfg.master_seed, s, kBalanceTag}));
        try {
            ds.splits[s] = label::rebalance(raw[s], [](const PatchRecord& r) { return r.label.cls; }, rng);
        } catch (const std::runtime_error& e) {
            throw DataError(std::string("split '") + name + "': " + e.what() + "; " + split_stats(raw[s]).dump());
        }
        stats[name] = split_stats(ds.splits[s]);
        stats[name]["before_balancing"] = split_stats(raw[s]);
        stats[name]["filters"] = ds.filters[s].to_json();
    }
    ds.stats = stats;
    return ds;
}

json record_to_json(const PatchRecord& r) {
    const cut::PatchGraph& g = r.graph;
    json nodes = json::array();
    for (const auto& n : g.nodes)
        nodes.push_back(json{{"id", n.cell_id},
                             {"pos", n.position},
                             {"mut_id", n.mutation_id},
                             {"birth", n.birth_flag},
                             {"death", n.death_flag},
                             {"density", n.density}});
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back(json::array({e.i, e.j, e.distance}));
    json H = json::array();
    for (std::size_t i = 0; i < r.features.rows; ++i)
        H.push_back(std::vector<double>(r.features.H.begin() + static_cast<std::ptrdiff_t>(i * feat::kNumFeatures),
                                        r.features.H.begin() + static_cast<std::ptrdiff_t>((i + 1) * feat::kNumFeatures)));
    return json{{"source",
                 {{"tumor_seed", g.source.tumor_id},
                  {"cut_index", r.cut_index},
                  {"cut", cut_spec_json(g.source.cut)},
                  {"patch_index", g.source.patch_index}}},
                {"split", to_string(r.split)},
                {"p_mut", r.p_mut},
                {"center", g.center},
                {"radius", g.radius},
                {"nodes", nodes},
                {"edges", edges},
                {"entropy", r.label.entropy},
                {"class", label::to_string(r.label.cls)},
                {"H", H},
                {"edge_attr", r.features.edge_attr},
                {"volume_stderr", r.features.volume_stderr}};
}

PatchRecord record_from_json(const json& j) {
    PatchRecord r;
    const json& src = j.at("source");
    r.graph.source.tumor_id = src.at("tumor_seed").get<std::uint64_t>();
    r.graph.source.cut = cut_spec_from_json(src.at("cut"));
    r.graph.source.patch_index = src.at("patch_index").get<std::uint32_t>();
    r.cut_index = src.at("cut_index").get<std::size_t>();
    const std::string split = j.at("split").get<std::string>();
    if (split == "train") r.split = Split::train;
    else if (split == "val") r.split = Split::val;
    else if (split == "test") r.split = Split::test;
    else throw DataError("unknown split '" + split + "'");
    r.p_mut = j.at("p_mut").get<double>();
    r.graph.center = j.at("center").get<Vec3>();
    r.graph.radius = j.at("radius").get<double>();
    for (const auto& n : j.at("nodes")) {
        cut::CutCell c;
        c.cell_id = n.at("id").get<std::uint32_t>();
        c.position = n.at("pos").get<Vec3>();
        c.mutation_id = n.at("mut_id").get<std::uint32_t>();
        c.birth_flag = n.at("birth").get<std::uint8_t>();
        c.death_flag = n.at("death").get<std::uint8_t>();
        c.density = n.at("density").get<double>();
        r.graph.nodes.push_back(c);
    }
    for (const auto& e : j.at("edges"))
        r.graph.edges.push_back(cut::Edge{e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>(), e.at(2).get<double>()});
    r.label.entropy = j.at("entropy").get<double>();
    r.label.cls = label::class_from_string(j.at("class").get<std::string>());
    const json& H = j.at("H");
    r.features.rows = H.size();
    for (const auto& row : H) {
        if (row.size() != feat::kNumFeatures) throw DataError("feature row has the wrong width");
        for (const auto& v : row) r.features.H.push_back(v.get<double>());
    }
    r.features.edge_attr = j.at("edge_attr").get<std::vector<double>>();
    r.features.volume_stderr = j.at("volume_stderr").get<std::vector<double>>();
    if (r.features.rows != r.graph.nodes.size() || r.features.edge_attr.size() != r.graph.edges.size())
        throw DataError("patch record features do not match its graph");
    return r;
}

bgnn::LabeledGraph to_labeled(const PatchRecord& r) {
    if (r.features.rows != r.graph.nodes.size()) throw DataError("patch record has no features");
    bgnn::LabeledGraph g;
    g.x = nn::Matrix(r.features.rows, feat::kNumFeatures);
    g.x.data = r.features.H;
    for (const auto& e : r.graph.edges) g.edges.emplace_back(e.i, e.j);
    g.edge_attr = r.features.edge_attr;
    g.label = r.label.cls == label::HeterogeneityClass::high ? 1 : 0;
    return g;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 2) return 0.0;
    std::vector<double> rx = average_ranks(x), ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace tumorgnn::pipeline
