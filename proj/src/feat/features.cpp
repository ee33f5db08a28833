#include "tumorgnn/feat/features.hpp"

#include "tumorgnn/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tumorgnn::feat {

const char* feature_name(std::size_t id) {
    static constexpr const char* names[kNumFeatures] = {
        "local_intensity", "density", "local_birth", "local_death", "cell_volume", "birth_flag", "death_flag"};
    return id < kNumFeatures ? names[id] : "unknown";
}

void FeatureConfig::validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("FeatureConfig: sigma must be > 0");
    if (volume_samples < 1000) throw std::invalid_argument("FeatureConfig: volume_samples must be >= 1000");
}

std::vector<std::vector<std::uint32_t>> adjacency(const cut::PatchGraph& g) {
    std::vector<std::vector<std::uint32_t>> adj(g.nodes.size());
    for (const cut::Edge& e : g.edges) {
        adj[e.i].push_back(e.j);
        adj[e.j].push_back(e.i);
    }
    return adj;
}

double gaussian_weight(double dist, double sigma) {
    double u = dist / sigma;
    return std::exp(-0.5 * u * u);
}

double local_intensity(std::size_t v, const cut::PatchGraph& g,
                       const std::vector<std::vector<std::uint32_t>>& adj, const FeatureConfig& cfg) {
    const auto& nb = adj.at(v);
    if (nb.empty()) return 0.0;
    double s = 0.0;
    for (std::uint32_t j : nb) s += gaussian_weight(distance(g.nodes[v].position, g.nodes[j].position), cfg.sigma);
    return s / static_cast<double>(nb.size());
}

double density_feature(const cut::CutCell& v) {
    if (!std::isfinite(v.density) || v.density < 0.0) throw std::invalid_argument("unfeaturized node");
    return v.density;
}

std::array<double, 2> binary_encodings(const cut::CutCell& v) {
    return {static_cast<double>(v.birth_flag), static_cast<double>(v.death_flag)};
}

double local_event_intensity(std::size_t v, const cut::PatchGraph& g, std::uint8_t cut::CutCell::*flag,
                             const FeatureConfig& cfg) {
    double s = 0.0;
    std::size_t count = 0;
    const Vec3& pv = g.nodes.at(v).position;
    for (const cut::CutCell& u : g.nodes) {
        if (!(u.*flag)) continue;
        s += gaussian_weight(distance(pv, u.position), cfg.sigma);
        ++count;
    }
    return count ? s / static_cast<double>(count) : 0.0;
}

namespace {

// Small static kd-tree for nearest-node lookups; ties resolve to the lower index.
class KdTree {
public:
    explicit KdTree(const std::vector<Vec3>& pts) : pts_(pts), order_(pts.size()) {
        std::iota(order_.begin(), order_.end(), 0u);
        nodes_.reserve(2 * pts.size() / kLeaf + 2);
        build(0, static_cast<std::uint32_t>(pts.size()));
    }

    std::uint32_t nearest(const Vec3& q) const {
        best_d2_ = std::numeric_limits<double>::infinity();
        best_ = 0;
        search(0, q);
        return best_;
    }

private:
    static constexpr std::uint32_t kLeaf = 8;
    struct Node {
        std::uint32_t begin, end;
        std::int32_t left = -1, right = -1;
        int axis = 0;
        double split = 0.0;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end) {
        auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(Node{begin, end});
        if (end - begin <= kLeaf) return id;
        Vec3 lo, hi;
        lo.fill(std::numeric_limits<double>::infinity());
        hi.fill(-std::numeric_limits<double>::infinity());
        for (std::uint32_t i = begin; i < end; ++i)
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], pts_[order_[i]][a]);
                hi[a] = std::max(hi[a], pts_[order_[i]][a]);
            }
        int axis = 0;
        for (int a = 1; a < 3; ++a)
            if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
        std::uint32_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::uint32_t x, std::uint32_t y) {
                             if (pts_[x][axis] != pts_[y][axis]) return pts_[x][axis] < pts_[y][axis];
                             return x < y;
                         });
        nodes_[id].axis = axis;
        nodes_[id].split = pts_[order_[mid]][axis];
        std::int32_t l = build(begin, mid);
        std::int32_t r = build(mid, end);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    void search(std::int32_t id, const Vec3& q) const {
        const Node& n = nodes_[id];
        if (n.left < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                std::uint32_t p = order_[i];
                double d2 = squared_distance(pts_[p], q);
                if (d2 < best_d2_ || (d2 == best_d2_ && p < best_)) {
                    best_d2_ = d2;
                    best_ = p;
                }
            }
            return;
        }
        double diff = q[n.axis] - n.split;
        std::int32_t near = diff < 0.0 ? n.left : n.right;
        std::int32_t far = diff < 0.0 ? n.right : n.left;
        search(near, q);
        if (diff * diff <= best_d2_) search(far, q);
    }

    const std::vector<Vec3>& pts_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
    mutable double best_d2_ = 0.0;
    mutable std::uint32_t best_ = 0;
};

std::uint64_t patch_seed(const cut::PatchGraph& g, std::uint64_t base) {
    const auto& s = g.source;
    return derive_seed({base, s.tumor_id, s.patch_index, bits_of(s.cut.z_ref), bits_of(s.cut.thickness),
                        bits_of(s.cut.t_ref), bits_of(s.cut.window), static_cast<std::uint64_t>(s.cut.axis)});
}

}  // namespace

VolumeEstimate cell_volume(const cut::PatchGraph& g, const FeatureConfig& cfg) {
    cfg.validate();
    const std::size_t n = g.nodes.size();
    if (n == 0) throw std::invalid_argument("cell_volume: empty patch");
    const double r = g.radius;
    std::vector<Vec3> rel(n);
    for (std::size_t i = 0; i < n; ++i) rel[i] = g.nodes[i].position - g.center;

    VolumeEstimate out;
    out.region_volume = 8.0 * r * r * r;
    out.counts.assign(n, 0);
    KdTree tree(rel);
    std::mt19937_64 rng(patch_seed(g, cfg.volume_seed));
    std::uniform_real_distribution<double> u(-r, r);
    for (std::size_t s = 0; s < cfg.volume_samples; ++s) {
        Vec3 q{u(rng), u(rng), u(rng)};
        ++out.counts[tree.nearest(q)];
    }
    const double S = static_cast<double>(cfg.volume_samples);
    out.volume.resize(n);
    out.standard_error.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double p = static_cast<double>(out.counts[i]) / S;
        out.volume[i] = out.region_volume * p;
        out.standard_error[i] = out.region_volume * std::sqrt(p * (1.0 - p) / S);
    }
    return out;
}

FeatureMatrix assemble_features(const cut::PatchGraph& g, const FeatureConfig& cfg) {
    cfg.validate();
    const std::size_t n = g.nodes.size();
    FeatureMatrix fm;
    fm.rows = n;
    fm.H.assign(n * kNumFeatures, 0.0);

    auto adj = adjacency(g);
    auto vol = cell_volume(g, cfg);
    for (std::size_t v = 0; v < n; ++v) {
        const cut::CutCell& c = g.nodes[v];
        auto flags = binary_encodings(c);
        fm.at(v, kIntensity) = local_intensity(v, g, adj, cfg);
        fm.at(v, kDensity) = density_feature(c);
        fm.at(v, kLocalBirth) = local_birth_intensity(v, g, cfg);
        fm.at(v, kLocalDeath) = local_death_intensity(v, g, cfg);
        fm.at(v, kVolume) = vol.volume[v];
        fm.at(v, kBirthFlag) = flags[0];
        fm.at(v, kDeathFlag) = flags[1];
    }
    fm.edge_attr.reserve(g.edges.size());
    for (const cut::Edge& e : g.edges) fm.edge_attr.push_back(distance(g.nodes[e.i].position, g.nodes[e.j].position));
    fm.volume_stderr = std::move(vol.standard_error);
    return fm;
}

}  // namespace tumorgnn::feat
