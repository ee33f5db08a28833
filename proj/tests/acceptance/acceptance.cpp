#include "tumorgnn/bgnn/model.hpp"
#include "tumorgnn/bgnn/train.hpp"
#include "tumorgnn/cut/cutgen.hpp"
#include "tumorgnn/feat/features.hpp"
#include "tumorgnn/label/labeling.hpp"
#include "tumorgnn/nn/gradcheck.hpp"
#include "tumorgnn/nn/ops.hpp"
#include "tumorgnn/pipeline/commands.hpp"
#include "tumorgnn/sim/benchmark.hpp"
#include "tumorgnn/sim/kernels.hpp"
#include "tumorgnn/sim/simulator.hpp"
#include "tumorgnn/sim/spatial_index.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace tumorgnn;
using pipeline::fs::path;
using nlohmann::json;

namespace {

// Collects failed sub-checks of one criterion.
struct Checks {
    std::vector<std::string> failures;
    std::size_t count = 0;

    void expect(bool ok, const std::string& what) {
        ++count;
        if (!ok) failures.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os << what << ": got " << got << ", want " << want << " +- " << tol;
        expect(std::abs(got - want) <= tol, os.str());
    }
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome from_checks(const Checks& c, const std::string& summary) {
    if (c.failures.empty()) return {true, summary + " (" + std::to_string(c.count) + " checks)"};
    std::string msg = std::to_string(c.failures.size()) + "/" + std::to_string(c.count) + " checks failed; first: " +
                      c.failures.front();
    return {false, msg};
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

nn::Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    nn::Matrix m(r, c);
    std::uniform_real_distribution<double> u(lo, hi);
    for (auto& v : m.data) v = u(rng);
    return m;
}

nn::Var weighted_sum(nn::Var y, const nn::Matrix& w) {
    nn::Tape& t = *y.tape;
    const nn::Matrix& Y = y.value();
    double s = 0.0;
    for (std::size_t i = 0; i < Y.size(); ++i) s += Y.data[i] * w.data[i];
    return t.record(nn::Matrix(1, 1, s), [y, w](nn::Tape& t, nn::Var out) {
        double g = t.grad(out).data[0];
        nn::Matrix& gy = t.grad(y);
        for (std::size_t i = 0; i < gy.size(); ++i) gy.data[i] += g * w.data[i];
    });
}

// Accepted patch built from a random point cloud on a 1/64 grid, so that
// integer translations are exact in floating point.
cut::PatchGraph synthetic_patch(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> coord(-640, 640);
    std::uniform_int_distribution<int> flag(0, 5);
    std::uniform_real_distribution<double> rho(0.0, 4.0);
    std::uniform_int_distribution<std::uint32_t> clone(0, 4);
    std::vector<cut::CutCell> cells;
    while (cells.size() < n) {
        cut::CutCell c;
        c.position = {coord(rng) / 64.0, coord(rng) / 64.0, coord(rng) / 64.0};
        if (squared_distance(c.position, Vec3{0, 0, 0}) > 100.0) continue;
        int f = flag(rng);
        c.birth_flag = f == 0;
        c.death_flag = f == 1;
        c.density = rho(rng);
        c.mutation_id = clone(rng);
        c.cell_id = static_cast<std::uint32_t>(cells.size());
        cells.push_back(c);
    }
    cut::PatchGraph g = cut::build_knn_graph(std::move(cells), 10);
    g.center = {0, 0, 0};
    g.radius = 10.0;
    g.source.tumor_id = 42;
    return g;
}

bgnn::LabeledGraph to_labeled(const cut::PatchGraph& g, const feat::FeatureMatrix& fm, int label) {
    bgnn::LabeledGraph lg;
    lg.label = label;
    lg.x = nn::Matrix(fm.rows, feat::kNumFeatures);
    lg.x.data = fm.H;
    for (const cut::Edge& e : g.edges) lg.edges.push_back({e.i, e.j});
    lg.edge_attr = fm.edge_attr;
    return lg;
}

std::string slurp(const path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------

Outcome math_suite() {
    Checks c;
    sim::GlobalParams gp;
    sim::KernelParams unit{1.0, 1.0, 2.0, 1.517};
    c.near(sim::kernel_rho(0.0, unit), 1.0, 1e-9, "kernel_rho(0)");
    c.near(sim::kernel_rho(1.0, unit), 0.60653, 1e-5, "kernel_rho(1)");
    c.near(sim::kernel_rho(1.0, unit), std::exp(-0.5), 1e-9, "kernel_rho(1) exact");
    c.expect(sim::kernel_rho(2.0, unit) == 0.0, "kernel_rho beyond cutoff");

    sim::IntrinsicParams p;
    sim::KernelParams one{1.0, 1.0, 2.0, 0.0};
    c.near(sim::success_probability(p, 0.0, one), 0.9, 1e-9, "success at rho 0");
    c.expect(sim::success_probability(p, 1e6, one) == 0.0, "success at large rho");
    c.near(sim::birth_rate(p, 0.0, one), 0.2, 1e-9, "birth rate at rho 0");
    c.near(sim::death_rate(p, 0.0, one), 10.0, 1e-9, "death rate at rho 0");
    sim::IntrinsicParams half = p;
    half.lifespan_eff = 0.5;
    sim::KernelParams two{2.0, 1.0, 2.0, 0.0};
    c.near(sim::death_rate(half, 0.0, two), 1.0, 1e-9, "death rate s_l=2");
    double prev_b = sim::birth_rate(p, 0.0, one), prev_d = sim::death_rate(p, 0.0, one);
    for (int i = 1; i <= 10; ++i) {
        double b = sim::birth_rate(p, 0.5 * i, one), d = sim::death_rate(p, 0.5 * i, one);
        c.expect(b <= prev_b, "birth rate nonincreasing");
        c.expect(d > prev_d, "death rate increasing");
        prev_b = b;
        prev_d = d;
    }

    c.expect(nn::gelu_value(0.0) == 0.0, "gelu(0)");
    c.near(nn::gelu_value(3.0), 2.99595, 1e-3, "gelu(3)");
    c.near(nn::gelu_value(-3.0), -0.00405, 1e-3, "gelu(-3)");
    c.near(nn::gelu_exact(3.0), 3.0 * 0.5 * std::erfc(-3.0 / std::sqrt(2.0)), 1e-12, "exact gelu(3)");

    {
        nn::Tape t;
        std::mt19937_64 rng(1);
        nn::Matrix X = random_matrix(9, 4, rng);
        std::vector<std::size_t> off{0, 4, 9};
        nn::Var y = nn::graphnorm(t.constant(X), t.constant(nn::Matrix(1, 4, 1.0)), t.constant(nn::Matrix(1, 4)),
                                  t.constant(nn::Matrix(1, 4, 1.0)), off);
        for (std::size_t g = 0; g < 2; ++g)
            for (std::size_t j = 0; j < 4; ++j) {
                double m = 0.0, v = 0.0, xm = 0.0;
                const double n = double(off[g + 1] - off[g]);
                for (std::size_t i = off[g]; i < off[g + 1]; ++i) {
                    m += y.value()(i, j);
                    xm += X(i, j);
                }
                xm /= n;
                for (std::size_t i = off[g]; i < off[g + 1]; ++i) v += (X(i, j) - xm) * (X(i, j) - xm);
                v /= n;
                c.near(m / n, 0.0, 1e-9, "graphnorm column mean");
                c.near(y.value()(off[g], j), (X(off[g], j) - xm) / std::sqrt(v + 1e-5), 1e-9, "graphnorm value");
            }
    }
    {
        nn::Tape t;
        nn::Matrix L(1, 2);
        L.data = {20.0, -20.0};
        c.near(nn::cross_entropy(t.constant(L), {0}).value().data[0], 0.0, 1e-9, "cross entropy confident");
        c.near(nn::cross_entropy(t.constant(nn::Matrix(2, 2, 0.3)), {0, 1}).value().data[0], std::log(2.0), 1e-9,
               "cross entropy uniform");
        L.data = {1.0, 2.0};
        c.near(nn::cross_entropy(t.constant(L), {1}).value().data[0], std::log(1.0 + std::exp(-1.0)), 1e-9,
               "cross entropy -log p");
    }

    using label::clone_proportions;
    using label::normalized_entropy;
    c.expect(normalized_entropy(clone_proportions(std::vector<std::uint32_t>{3, 3, 3})) == 0.0, "U single clone");
    c.near(normalized_entropy(clone_proportions(std::vector<std::uint32_t>{1, 2, 3, 4, 5})), 1.0, 1e-9,
           "U uniform singletons");
    c.near(normalized_entropy(clone_proportions(std::vector<std::uint32_t>{0, 0, 1, 2})), 0.94639, 1e-5,
           "U(0.5,0.25,0.25)");
    return from_checks(c, "kernels, rates, GELU, GraphNorm, cross-entropy and entropy examples");
}

Outcome gradient_suite() {
    Checks c;
    std::mt19937_64 rng(2);
    double worst = 0.0;
    auto record = [&](const std::vector<nn::TensorGradCheck>& rep, const std::string& what) {
        for (const auto& t : rep) {
            worst = std::max(worst, t.relative_error);
            c.expect(t.relative_error < 1e-4, what + " " + t.name + " rel err " + fmt(t.relative_error));
        }
    };

    // Layers on small random shapes, every entry checked.
    nn::GraphBatch b;
    b.add_graph(random_matrix(5, 3, rng), {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}}, {0.5, 1.1, 0.7, 1.6, 0.9, 1.3},
                0);
    b.add_graph(random_matrix(3, 3, rng), {{0, 1}, {1, 2}}, {0.8, 1.2}, 1);
    b.finalize();
    const std::vector<std::size_t>& off = b.offsets;
    {
        nn::ParameterStore ps;
        ps.add("x", 8, 3).value = b.x;
        ps.add("W", 4, 3).value = random_matrix(4, 3, rng);
        ps.add("b", 1, 4).value = random_matrix(1, 4, rng);
        nn::Matrix w = random_matrix(8, 4, rng);
        record(nn::gradient_check(ps, [&](nn::Tape& t) {
                   return weighted_sum(nn::dense(t.parameter(ps.get("x")), t.parameter(ps.get("W")),
                                                 t.parameter(ps.get("b"))),
                                       w);
               }),
               "dense");
    }
    {
        nn::ParameterStore ps;
        ps.add("x", 8, 3).value = b.x;
        ps.add("gamma", 1, 3).value = random_matrix(1, 3, rng, 0.5, 1.5);
        ps.add("beta", 1, 3).value = random_matrix(1, 3, rng);
        ps.add("alpha", 1, 3).value = random_matrix(1, 3, rng, 0.2, 1.0);
        nn::Matrix w = random_matrix(8, 3, rng);
        record(nn::gradient_check(ps, [&](nn::Tape& t) {
                   return weighted_sum(nn::graphnorm(t.parameter(ps.get("x")), t.parameter(ps.get("gamma")),
                                                     t.parameter(ps.get("beta")), t.parameter(ps.get("alpha")), off),
                                       w);
               }),
               "graphnorm");
    }
    for (std::size_t heads : {1u, 4u}) {
        nn::ParameterStore ps;
        ps.add("x", 8, 3).value = b.x;
        ps.add("W", 8, 3).value = random_matrix(8, 3, rng);
        ps.add("We", 8, 1).value = random_matrix(8, 1, rng);
        ps.add("a", heads, 3 * 8 / heads).value = random_matrix(heads, 3 * 8 / heads, rng);
        nn::Matrix w = random_matrix(8, 8, rng);
        record(nn::gradient_check(ps, [&](nn::Tape& t) {
                   return weighted_sum(nn::gat(t.parameter(ps.get("x")), t.parameter(ps.get("W")),
                                               t.parameter(ps.get("We")), t.parameter(ps.get("a")), b, heads),
                                       w);
               }),
               "gat/" + std::to_string(heads));
    }
    {
        nn::ParameterStore ps;
        ps.add("x", 8, 3).value = b.x;
        ps.add("g", 2, 2).value = random_matrix(2, 2, rng);
        nn::Matrix wp = random_matrix(2, 2, rng);
        std::vector<std::size_t> cols{2, 0};
        for (bool exact : {false, true})
            record(nn::gradient_check(ps, [&](nn::Tape& t) {
                       nn::Var x = nn::gelu(t.parameter(ps.get("x")), exact);
                       nn::Var cat = nn::concat_cols(x, nn::broadcast_to_nodes(t.parameter(ps.get("g")), b.graph_id));
                       nn::Var pooled = nn::mean_pool(cat, off);
                       return weighted_sum(nn::select_cols(pooled, cols), wp);
                   }),
                   exact ? "gelu(exact)/concat/pool" : "gelu/concat/pool");
    }
    {
        nn::ParameterStore ps;
        ps.add("z", 4, 2).value = random_matrix(4, 2, rng, -3.0, 3.0);
        record(nn::gradient_check(ps, [&](nn::Tape& t) { return nn::cross_entropy(t.parameter(ps.get("z")), {0, 1, 1, 0}); }),
               "cross_entropy");
    }

    // Full models on an accepted patch of at least 120 nodes.
    std::vector<bgnn::LabeledGraph> batch;
    for (std::size_t n : {130u, 121u}) {
        cut::PatchGraph g = synthetic_patch(rng, n);
        feat::FeatureConfig fc;
        fc.volume_samples = 5000;
        batch.push_back(to_labeled(g, feat::assemble_features(g, fc), int(batch.size())));
    }
    for (bgnn::Variant v :
         {bgnn::Variant::vanilla, bgnn::Variant::all_norm, bgnn::Variant::global, bgnn::Variant::global_norm})
        for (std::size_t heads : {1u, 4u}) {
            bgnn::ModelConfig mc;
            mc.variant = v;
            mc.heads = heads;
            mc.init_seed = 17;
            bgnn::Model m(mc);
            record(bgnn::gradient_check(m, batch, 1e-5, 48, 5), std::string(bgnn::to_string(v)) + "/" +
                                                                     std::to_string(heads) + "-head");
        }
    return from_checks(c, "every layer and 8 model variants, worst per-tensor relative error " + fmt(worst, 3));
}

Outcome invariance_suite() {
    Checks c;
    std::mt19937_64 rng(3);
    feat::FeatureConfig fc;
    fc.volume_samples = 20000;
    for (int trial = 0; trial < 3; ++trial) {
        cut::PatchGraph g = synthetic_patch(rng, 150);
        g.source.patch_index = static_cast<std::uint32_t>(trial);
        cut::PatchGraph moved = g;
        const Vec3 shift{17.0, -4.0, 9.0};
        for (auto& cell : moved.nodes) cell.position = cell.position + shift;
        moved.center = moved.center + shift;
        c.expect(feat::assemble_features(g, fc) == feat::assemble_features(moved, fc),
                 "features differ after translation");
    }

    double worst_perm = 0.0, worst_rows = 0.0;
    for (bgnn::Variant v :
         {bgnn::Variant::vanilla, bgnn::Variant::all_norm, bgnn::Variant::global, bgnn::Variant::global_norm})
        for (std::size_t heads : {1u, 4u}) {
            bgnn::ModelConfig mc;
            mc.variant = v;
            mc.heads = heads;
            mc.init_seed = 23;
            bgnn::Model m(mc);
            cut::PatchGraph g = synthetic_patch(rng, 140);
            bgnn::LabeledGraph a = to_labeled(g, feat::assemble_features(g, fc), 0);
            std::vector<std::uint32_t> perm(a.x.rows);
            std::iota(perm.begin(), perm.end(), 0u);
            std::shuffle(perm.begin(), perm.end(), rng);
            bgnn::LabeledGraph p = a;
            for (std::size_t i = 0; i < a.x.rows; ++i)
                for (std::size_t j = 0; j < a.x.cols; ++j) p.x(perm[i], j) = a.x(i, j);
            for (auto& e : p.edges) e = {perm[e.second], perm[e.first]};
            nn::Matrix la = m.logits(bgnn::make_batch(std::vector<bgnn::LabeledGraph>{a}));
            nn::Matrix lp = m.logits(bgnn::make_batch(std::vector<bgnn::LabeledGraph>{p}));
            for (std::size_t i = 0; i < la.size(); ++i) worst_perm = std::max(worst_perm, std::abs(la.data[i] - lp.data[i]));

            nn::GraphBatch batch = bgnn::make_batch(std::vector<bgnn::LabeledGraph>{a, p});
            nn::Tape t;
            std::mt19937_64 unused(0);
            std::vector<nn::Matrix> att;
            m.forward(t, batch, false, unused, &att);
            c.expect(att.size() == 3, "one attention matrix per GAT layer");
            for (const auto& A : att)
                for (std::size_t i = 0; i < batch.num_nodes(); ++i)
                    for (std::size_t h = 0; h < heads; ++h) {
                        double s = 0.0;
                        for (std::size_t q = batch.in_ptr[i]; q < batch.in_ptr[i + 1]; ++q) s += A(q, h);
                        worst_rows = std::max(worst_rows, std::abs(s - 1.0));
                    }
        }
    c.expect(worst_perm <= 1e-9, "permutation changes logits by " + fmt(worst_perm));
    c.expect(worst_rows <= 1e-12, "attention rows deviate from 1 by " + fmt(worst_rows));
    return from_checks(c, "translation bit-exact; permutation max diff " + fmt(worst_perm, 3) +
                              "; attention row-sum max dev " + fmt(worst_rows, 3));
}

Outcome oracle_suite() {
    Checks c;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    std::vector<Vec3> pts(5000);
    for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
    sim::SpatialIndex index(1.517);
    for (std::size_t i = 0; i < pts.size(); ++i) index.insert(static_cast<std::uint32_t>(i), pts[i]);
    std::uniform_real_distribution<double> rad(0.3, 3.0);
    for (int q = 0; q < 100; ++q) {
        Vec3 center{u(rng), u(rng), u(rng)};
        double r = rad(rng);
        std::vector<std::uint32_t> brute;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (squared_distance(pts[i], center) <= r * r) brute.push_back(static_cast<std::uint32_t>(i));
        c.expect(index.query(center, r) == brute, "spatial index query " + std::to_string(q));
    }

    feat::FeatureConfig fc;
    fc.volume_samples = 20000;
    double worst = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
        cut::PatchGraph g = synthetic_patch(rng, 120 + 30 * trial);
        feat::FeatureMatrix fm = feat::assemble_features(g, fc);
        for (std::size_t v = 0; v < g.nodes.size(); ++v) {
            double s = 0.0;
            int k = 0;
            for (const cut::Edge& e : g.edges)
                if (e.i == v || e.j == v) {
                    std::size_t o = e.i == v ? e.j : e.i;
                    s += std::exp(-squared_distance(g.nodes[v].position, g.nodes[o].position) / 2.0);
                    ++k;
                }
            double lam = k ? s / k : 0.0;
            double sb = 0.0, sd = 0.0;
            int nb = 0, nd = 0;
            for (const auto& w : g.nodes) {
                double kern = std::exp(-squared_distance(g.nodes[v].position, w.position) / 2.0);
                if (w.birth_flag) sb += kern, ++nb;
                if (w.death_flag) sd += kern, ++nd;
            }
            worst = std::max({worst, std::abs(fm.at(v, feat::kIntensity) - lam),
                              std::abs(fm.at(v, feat::kLocalBirth) - (nb ? sb / nb : 0.0)),
                              std::abs(fm.at(v, feat::kLocalDeath) - (nd ? sd / nd : 0.0))});
        }
        feat::VolumeEstimate ve = feat::cell_volume(g, fc);
        std::uint64_t total = std::accumulate(ve.counts.begin(), ve.counts.end(), std::uint64_t{0});
        c.expect(total == fc.volume_samples, "every Monte Carlo sample assigned to one cell");
        double vol = std::accumulate(ve.volume.begin(), ve.volume.end(), 0.0);
        c.expect(std::abs(vol - ve.region_volume) <= 1e-9 * ve.region_volume, "volumes sum to region volume");
    }
    c.expect(worst <= 1e-12, "intensity features deviate from O(n^2) oracle by " + fmt(worst));

    cut::PatchGraph pair;
    cut::CutCell a, b;
    a.position = {-2.5, 1.0, 0.0};
    b.position = {2.5, 1.0, 0.0};
    pair.nodes = {a, b};
    pair.radius = 10.0;
    feat::VolumeEstimate ve = feat::cell_volume(pair, feat::FeatureConfig{});
    c.expect(std::abs(ve.volume[0] - ve.volume[1]) <= 0.02 * 0.5 * (ve.volume[0] + ve.volume[1]),
             "symmetric pair volumes " + fmt(ve.volume[0]) + " vs " + fmt(ve.volume[1]));
    return from_checks(c, "100 index queries exact; intensity max diff " + fmt(worst, 3) + "; volume partition exact");
}

// Desk-preset tumors and dataset, shared by the labeling and learning checks.
struct DeskData {
    bool ready = false;
    double seconds = 0.0;
    path data;
};

void prepare_desk(DeskData& d, const pipeline::PipelineConfig& cfg, const path& work) {
    if (d.ready) return;
    auto t0 = std::chrono::steady_clock::now();
    pipeline::cmd_simulate(cfg, work / "desk_traces", true);
    pipeline::cmd_dataset(cfg, work / "desk_traces", work / "desk_data", true);
    d.data = work / "desk_data";
    d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    d.ready = true;
}

Outcome labeling_suite(DeskData& desk, const pipeline::PipelineConfig& cfg, const path& work) {
    Checks c;
    using label::clone_proportions;
    using label::normalized_entropy;
    c.expect(normalized_entropy(clone_proportions(std::vector<std::uint32_t>{9, 9, 9, 9})) == 0.0, "U single clone");
    c.near(normalized_entropy(clone_proportions(std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6, 7})), 1.0, 1e-12,
           "U uniform singletons");
    c.near(normalized_entropy(clone_proportions(std::vector<std::uint32_t>{4, 4, 7, 8})), 0.94639, 1e-5,
           "U(0.5,0.25,0.25)");

    prepare_desk(desk, cfg, work);
    std::size_t total = 0;
    std::string counts;
    for (pipeline::Split s : {pipeline::Split::train, pipeline::Split::val, pipeline::Split::test}) {
        auto recs = pipeline::load_split(desk.data, s);
        std::size_t low = 0, high = 0;
        for (const auto& r : recs) {
            const double U = r.label.entropy;
            c.expect(!(U > cfg.labeling.lower() && U < cfg.labeling.upper()), "patch inside the discard band");
            c.expect(r.label.cls != label::HeterogeneityClass::discarded, "discarded patch emitted");
            c.expect((r.label.cls == label::HeterogeneityClass::low) == (U <= 0.4), "class disagrees with entropy");
            (r.label.cls == label::HeterogeneityClass::low ? low : high)++;
        }
        c.expect(low == high && low > 0, std::string(pipeline::to_string(s)) + " split is not 50:50");
        total += recs.size();
        counts += std::string(counts.empty() ? "" : "/") + std::to_string(recs.size());
    }
    return from_checks(c, "entropy examples; desk dataset " + counts + " patches (" + std::to_string(total) +
                              "), band empty, splits 50:50");
}

Outcome trend_check(const pipeline::PipelineConfig& cfg, const path& work) {
    json rep = pipeline::cmd_sweep_report(cfg, work / "sweep", true);
    const double rho = rep["spearman"].get<double>();
    std::string rows;
    for (const auto& l : rep["levels"])
        rows += (rows.empty() ? "" : ", ") + fmt(l["p_mut"].get<double>(), 3) + ":" +
                fmt(l["high_fraction"].get<double>(), 3);
    bool ok = rep["levels"].size() >= 5 && rho >= 0.8;
    return {ok, "Spearman " + fmt(rho) + " over " + std::to_string(rep["levels"].size()) +
                    " levels (threshold 0.8); high fraction " + rows};
}

Outcome learning_check(DeskData& desk, const pipeline::PipelineConfig& cfg, const path& work) {
    prepare_desk(desk, cfg, work);
    pipeline::PipelineConfig all = cfg;
    all.model.variant = bgnn::Variant::vanilla;
    all.model.heads = 4;
    all.model.feature_mask = {0, 1, 2, 3, 4, 5, 6};
    pipeline::PipelineConfig only0 = all;
    only0.model.feature_mask = {0};
    json ra = pipeline::cmd_train(all, desk.data, work / "train_all", true);
    json r0 = pipeline::cmd_train(only0, desk.data, work / "train_f0", true);
    const double acc = ra["best"]["test_acc"].get<double>();
    const double acc0 = r0["best"]["test_acc"].get<double>();
    bool ok = acc >= 75.0 && acc0 < acc;
    return {ok, ra["model"].get<std::string>() + " test " + fmt(acc) + "% (threshold 75, final epoch " +
                    fmt(ra["final"]["test_acc"].get<double>()) + "%); feature-{0} test " + fmt(acc0) +
                    "% must be lower; dataset prep " + fmt(desk.seconds, 3) + "s"};
}

Outcome performance_check() {
    sim::GlobalParams gp;
    gp.max_birth_events = 1000000;
    sim::SimulationBenchmark s = sim::benchmark_simulation(gp);
    sim::DensityBenchmark d = sim::benchmark_density(100000, 2000, 1);
    bool ok = s.birth_events == 1000000 && s.seconds < 300.0 && d.speedup() >= 10.0 && d.max_abs_difference <= 1e-12;
    return {ok, "10^6 births in " + fmt(s.seconds, 3) + "s (limit 300, " + std::to_string(s.final_alive) +
                    " alive at t=" + fmt(s.end_time) + "); index speedup " + fmt(d.speedup(), 3) +
                    "x at 10^5 cells (min 10)"};
}

Outcome determinism_check(const path& work) {
    pipeline::PipelineConfig c = pipeline::desk_preset();
    c.master_seed = 11;
    c.sim.global.max_birth_events = 70000;
    c.tumors = {4, 2, 2};
    c.patches.per_cut = 6;
    c.features.volume_samples = 5000;
    c.model.d = 16;
    c.model.d_prime = 16;
    c.train.epochs = 3;
    c.sweep.mutation_probabilities = {0.03, 0.1, 0.2};
    c.sweep.tumors_per_level = 1;

    Checks chk;
    std::size_t files = 0;
    std::vector<path> roots{work / "det_a", work / "det_b"};
    for (const path& r : roots) {
        pipeline::cmd_simulate(c, r / "traces", true);
        pipeline::cmd_dataset(c, r / "traces", r / "data", true);
        pipeline::cmd_train(c, r / "data", r / "train", true);
        json ev = pipeline::cmd_eval(r / "train" / "checkpoint.bin", r / "data");
        std::ofstream(r / "eval.json") << ev.dump(2);
        pipeline::cmd_ablate(c, r / "data", r / "ablate", true);
        pipeline::cmd_sweep_report(c, r / "sweep", true);
    }
    for (const auto& e : pipeline::fs::recursive_directory_iterator(roots[0])) {
        if (!e.is_regular_file()) continue;
        path rel = pipeline::fs::relative(e.path(), roots[0]);
        ++files;
        chk.expect(slurp(e.path()) == slurp(roots[1] / rel), rel.string() + " differs between runs");
    }
    chk.expect(files >= 15, "too few outputs compared");
    return from_checks(chk, std::to_string(files) + " output files of simulate/dataset/train/eval/ablate/sweep-report "
                                                    "byte-identical across two runs");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::string work_dir = (pipeline::fs::temp_directory_path() / "tumorgnn_acceptance").string();
    std::vector<int> only;
    app.add_option("--work", work_dir, "Scratch directory for pipeline outputs");
    app.add_option("--only", only, "Run only these criteria (1-9)");
    CLI11_PARSE(app, argc, argv);

    const path work(work_dir);
    pipeline::fs::create_directories(work);
    const pipeline::PipelineConfig desk = pipeline::desk_preset();
    DeskData desk_data;

    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria{
        {1, "math unit suite", 10, math_suite},
        {2, "gradient suite", 300, gradient_suite},
        {3, "invariance suite", 60, invariance_suite},
        {4, "oracle suite", 120, oracle_suite},
        {5, "entropy/labeling suite", 30, [&] { return labeling_suite(desk_data, desk, work); }},
        {6, "trend check", 1800, [&] { return trend_check(desk, work); }},
        {7, "learning check", 3600, [&] { return learning_check(desk_data, desk, work); }},
        {8, "performance check", 300, performance_check},
        {9, "determinism", 3600, [&] { return determinism_check(work); }},
    };

    int failed = 0;
    for (const Criterion& cr : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), cr.id) == only.end()) continue;
        const double shared_before = desk_data.ready ? 0.0 : -1.0;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        // The shared desk dataset is charged to the learning check, whose
        // budget covers the whole desk pipeline.
        double charged = secs;
        if (shared_before < 0.0 && desk_data.ready && cr.id != 7) charged -= desk_data.seconds;
        if (cr.id == 7 && shared_before >= 0.0) charged += desk_data.seconds;
        bool in_time = charged < cr.limit_seconds;
        bool pass = o.pass && in_time;
        if (!in_time) o.detail += "; runtime over limit";
        std::printf("[%s] %d %s: %s [%.1fs / %.0fs]\n", pass ? "PASS" : "FAIL", cr.id, cr.name, o.detail.c_str(),
                    charged, cr.limit_seconds);
        std::fflush(stdout);
        failed += !pass;
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
