#include "tumorgnn/bgnn/model.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tumorgnn::bgnn {

using nn::Matrix;
using nn::Tape;
using nn::Var;

namespace {

constexpr std::size_t kNumFeatures = 7;
constexpr int kGatLayers = 3;

void fan_in_uniform(Matrix& m, std::size_t fan_in, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& v : m.data) v = u(rng);
}

std::string gat_name(int layer, const char* what) { return "gat" + std::to_string(layer) + "." + what; }

}  // namespace

const char* to_string(Variant v) {
    switch (v) {
        case Variant::vanilla: return "vanilla";
        case Variant::all_norm: return "all_norm";
        case Variant::global: return "global";
        case Variant::global_norm: return "global_norm";
    }
    return "?";
}

Variant variant_from_string(const std::string& s) {
    if (s == "vanilla") return Variant::vanilla;
    if (s == "all_norm") return Variant::all_norm;
    if (s == "global") return Variant::global;
    if (s == "global_norm") return Variant::global_norm;
    throw std::invalid_argument("unknown model variant '" + s + "'");
}

void ModelConfig::validate() const {
    if (d == 0 || d_prime == 0) throw std::invalid_argument("ModelConfig: widths must be positive");
    if (heads == 0 || d_prime % heads != 0) throw std::invalid_argument("ModelConfig: d_prime must be divisible by heads");
    if (has_global() && global_dim == 0) throw std::invalid_argument("ModelConfig: global_dim must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("ModelConfig: dropout must lie in [0,1)");
    if (feature_mask.empty()) throw std::invalid_argument("ModelConfig: feature_mask is empty");
    std::set<std::size_t> seen;
    for (std::size_t f : feature_mask) {
        if (f >= kNumFeatures) throw std::invalid_argument("ModelConfig: feature id out of range");
        if (!seen.insert(f).second) throw std::invalid_argument("ModelConfig: duplicate feature id");
    }
}

std::string ModelConfig::label() const { return std::string(to_string(variant)) + "/" + std::to_string(heads) + "-head"; }

nn::GraphBatch make_batch(const std::vector<const LabeledGraph*>& graphs) {
    if (graphs.empty()) throw std::invalid_argument("make_batch: no graphs");
    nn::GraphBatch b;
    for (const LabeledGraph* g : graphs) b.add_graph(g->x, g->edges, g->edge_attr, g->label);
    b.finalize();
    return b;
}

nn::GraphBatch make_batch(const std::vector<LabeledGraph>& graphs) {
    std::vector<const LabeledGraph*> ptrs;
    for (const auto& g : graphs) ptrs.push_back(&g);
    return make_batch(ptrs);
}

Model::Model(ModelConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    std::mt19937_64 rng(cfg_.init_seed);
    const std::size_t d = cfg_.d, dp = cfg_.d_prime, dh = dp / cfg_.heads;
    const std::size_t extra = cfg_.has_global() ? cfg_.global_dim : 0;

    auto weight = [&](const std::string& name, std::size_t out, std::size_t in) {
        fan_in_uniform(params_.add(name, out, in).value, in, rng);
    };
    auto norm = [&](const std::string& prefix, std::size_t width) {
        params_.add(prefix + ".gamma", 1, width).value.data.assign(width, 1.0);
        params_.add(prefix + ".beta", 1, width);
        params_.add(prefix + ".alpha", 1, width).value.data.assign(width, cfg_.norm_alpha_init);
    };

    weight("embed.W", d, cfg_.feature_mask.size());
    params_.add("embed.b", 1, d);
    norm("embed.norm", d);

    if (cfg_.has_global()) {
        weight("global.l1.W", d, d);
        params_.add("global.l1.b", 1, d);
        weight("global.l2.W", d, d);
        params_.add("global.l2.b", 1, d);
        weight("global.l3.W", cfg_.global_dim, d);
        params_.add("global.l3.b", 1, cfg_.global_dim);
    }

    for (int k = 1; k <= kGatLayers; ++k) {
        const std::size_t in = (k == 1 ? d : dp) + extra;
        weight(gat_name(k, "W"), dp, in);
        weight(gat_name(k, "W_edge"), dp, 1);
        weight(gat_name(k, "attn"), cfg_.heads, 3 * dh);
        if (cfg_.has_extra_norms()) norm(gat_name(k, "norm"), dp);
    }

    weight("head.l1.W", 2 * dp, dp);
    params_.add("head.l1.b", 1, 2 * dp);
    weight("head.l2.W", 2, 2 * dp);
    params_.add("head.l2.b", 1, 2);
}

nn::Parameter& Model::p(const std::string& name) const {
    // The tape only reads parameter values; gradients are accumulated by
    // Tape::backward through the pointer it keeps.
    return const_cast<nn::ParameterStore&>(params_).get(name);
}

Var Model::forward(Tape& t, const nn::GraphBatch& batch, bool training, std::mt19937_64& rng,
                   std::vector<Matrix>* attention) const {
    if (batch.num_graphs() == 0) throw std::invalid_argument("forward: empty batch");
    if (batch.x.cols != kNumFeatures)
        throw std::invalid_argument("forward: batch must carry all " + std::to_string(kNumFeatures) + " feature columns");
    for (std::size_t g = 0; g < batch.num_graphs(); ++g)
        if (batch.offsets[g + 1] == batch.offsets[g]) throw std::invalid_argument("forward: zero-node graph in batch");

    auto gelu = [&](Var v) { return nn::gelu(v, cfg_.exact_gelu); };
    auto par = [&](const std::string& name) { return t.parameter(p(name)); };
    auto norm = [&](Var v, const std::string& prefix) {
        return nn::graphnorm(v, par(prefix + ".gamma"), par(prefix + ".beta"), par(prefix + ".alpha"), batch.offsets);
    };

    Var x = nn::select_cols(t.constant(batch.x), cfg_.feature_mask);
    Var h = nn::dense(x, par("embed.W"), par("embed.b"));
    h = norm(h, "embed.norm");
    h = nn::dropout(h, cfg_.dropout, training, rng);

    Var global_nodes{};
    if (cfg_.has_global()) {
        Var g = gelu(nn::dense(h, par("global.l1.W"), par("global.l1.b")));
        g = gelu(nn::dense(g, par("global.l2.W"), par("global.l2.b")));
        g = nn::dense(g, par("global.l3.W"), par("global.l3.b"));
        global_nodes = nn::broadcast_to_nodes(nn::mean_pool(g, batch.offsets), batch.graph_id);
    }

    for (int k = 1; k <= kGatLayers; ++k) {
        Var in = cfg_.has_global() ? nn::concat_cols(h, global_nodes) : h;
        Matrix att;
        h = nn::gat(in, par(gat_name(k, "W")), par(gat_name(k, "W_edge")), par(gat_name(k, "attn")), batch, cfg_.heads,
                    0.2, attention ? &att : nullptr);
        if (attention) attention->push_back(std::move(att));
        h = gelu(h);
        if (cfg_.has_extra_norms() && !cfg_.bypass_extra_norms) h = norm(h, gat_name(k, "norm"));
        h = nn::dropout(h, cfg_.dropout, training, rng);
    }

    Var pooled = nn::mean_pool(h, batch.offsets);
    Var z = gelu(nn::dense(pooled, par("head.l1.W"), par("head.l1.b")));
    return nn::dense(z, par("head.l2.W"), par("head.l2.b"));
}

Matrix Model::logits(const nn::GraphBatch& batch) const {
    Tape t;
    std::mt19937_64 unused(0);
    return forward(t, batch, false, unused).value();
}

std::string Model::summary() const {
    std::ostringstream os;
    os << cfg_.label() << " d=" << cfg_.d << " d'=" << cfg_.d_prime << " features=" << cfg_.feature_mask.size()
       << " parameters=" << params_.scalar_count() << "\n";
    for (std::size_t i = 0; i < params_.size(); ++i)
        os << "  " << params_[i].name << " " << params_[i].value.rows << "x" << params_[i].value.cols << "\n";
    return os.str();
}

}  // namespace tumorgnn::bgnn
