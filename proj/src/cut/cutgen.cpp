#include "tumorgnn/cut/cutgen.hpp"

#include "tumorgnn/sim/simulator.hpp"
#include "tumorgnn/sim/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace tumorgnn::cut {

void CutSpec::validate() const {
    if (!(thickness > 0.0)) throw std::invalid_argument("CutSpec: thickness must be > 0");
    if (!(window > 0.0)) throw std::invalid_argument("CutSpec: window must be > 0");
}

std::vector<CutCell> extract_cut(const sim::TumorHistory& h, const CutSpec& spec) {
    spec.validate();
    const auto axis = static_cast<std::size_t>(spec.axis);
    const double t0 = spec.t_ref;
    const double t1 = spec.t_end();
    const double lo = spec.z_ref;
    const double hi = spec.z_ref + spec.thickness;

    // Terminal events inside the window, keyed by the firing cell.
    auto first = std::lower_bound(h.events.begin(), h.events.end(), t0,
                                  [](const sim::EventRecord& e, double t) { return e.time < t; });
    auto last = std::upper_bound(h.events.begin(), h.events.end(), t1,
                                 [](double t, const sim::EventRecord& e) { return t < e.time; });
    std::unordered_map<std::uint32_t, const sim::EventRecord*> in_window;
    for (auto it = first; it != last; ++it) in_window.emplace(it->cell_id, &*it);

    // Population at the window end near the slab, for density snapshots.
    const double reach = h.params.density.cutoff;
    sim::SpatialIndex index(reach);
    for (const sim::Cell& c : h.cells) {
        double x = c.position[axis];
        if (c.alive_at(t1) && x >= lo - reach && x <= hi + reach) index.insert(c.id, c.position);
    }

    std::vector<CutCell> out;
    for (const sim::Cell& c : h.cells) {
        if (c.birth_time > t1 || c.end_time < t0) continue;
        double x = c.position[axis];
        if (x < lo || x > hi) continue;

        CutCell cc;
        cc.cell_id = c.id;
        cc.position = c.position;
        cc.mutation_id = c.mutation_id;
        auto ev = in_window.find(c.id);
        if (ev != in_window.end()) {
            const sim::EventRecord& e = *ev->second;
            cc.birth_flag = e.kind == sim::EventKind::division_success ? 1 : 0;
            cc.death_flag = e.kind == sim::EventKind::division_success ? 0 : 1;
            cc.density = e.density_at_event;
        } else {
            cc.density = sim::local_density(c.position, c.id, index, h.params.density);
        }
        out.push_back(cc);
    }
    return out;
}

std::vector<CutSpec> standard_battery_specs() {
    std::vector<CutSpec> specs;
    for (double t : {40.0, 60.0})
        for (double z : {0.0, -6.0, 6.0}) specs.push_back(CutSpec{z, 3.0, t, 1.0, Axis::z});
    return specs;
}

std::vector<std::vector<CutCell>> standard_cut_battery(const sim::TumorHistory& h) {
    auto specs = standard_battery_specs();
    std::ostringstream missing;
    int n_missing = 0;
    for (const CutSpec& s : specs) {
        if (s.t_end() > h.end_time) {
            missing << (n_missing++ ? ", " : "") << "[" << s.t_ref << ", " << s.t_end() << "]";
        }
    }
    if (n_missing > 0) {
        std::ostringstream msg;
        msg << "history ends at t=" << h.end_time << "; missing windows: " << missing.str();
        throw std::runtime_error(msg.str());
    }
    std::vector<std::vector<CutCell>> cuts;
    cuts.reserve(specs.size());
    for (const CutSpec& s : specs) cuts.push_back(extract_cut(h, s));
    return cuts;
}

std::vector<Vec3> sample_patch_centers(const std::vector<CutCell>& cut, std::size_t n, std::mt19937_64& rng) {
    if (cut.empty()) throw std::invalid_argument("sample_patch_centers: empty cut");
    std::uniform_int_distribution<std::size_t> pick(0, cut.size() - 1);
    std::vector<Vec3> centers;
    centers.reserve(n);
    for (std::size_t i = 0; i < n; ++i) centers.push_back(cut[pick(rng)].position);
    return centers;
}

std::vector<CutCell> extract_patch(const std::vector<CutCell>& cut, const Vec3& center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("extract_patch: radius must be > 0");
    const double r2 = radius * radius;
    std::vector<CutCell> out;
    for (const CutCell& c : cut)
        if (squared_distance(c.position, center) <= r2) out.push_back(c);
    return out;
}

PatchGraph build_knn_graph(std::vector<CutCell> patch, std::size_t k) {
    const std::size_t n = patch.size();
    if (n < 2) throw std::invalid_argument("degenerate patch");
    const std::size_t kk = std::min(k, n - 1);

    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::vector<std::pair<double, std::uint32_t>> cand(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            cand[m++] = {squared_distance(patch[i].position, patch[j].position), static_cast<std::uint32_t>(j)};
        }
        std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk - 1), cand.end());
        for (std::size_t q = 0; q < kk; ++q) {
            auto a = static_cast<std::uint32_t>(i);
            auto b = cand[q].second;
            pairs.emplace(std::min(a, b), std::max(a, b));
        }
    }

    PatchGraph g;
    g.edges.reserve(pairs.size());
    for (auto [i, j] : pairs) g.edges.push_back(Edge{i, j, distance(patch[i].position, patch[j].position)});
    g.nodes = std::move(patch);
    return g;
}

bool accept_graph(const PatchGraph& g, std::size_t min_nodes, std::size_t min_edges) {
    return g.nodes.size() > min_nodes && g.edges.size() > min_edges;
}

}  // namespace tumorgnn::cut
