#include "tumorgnn/label/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tumorgnn::label {

const char* to_string(HeterogeneityClass c) {
    switch (c) {
        case HeterogeneityClass::low: return "low";
        case HeterogeneityClass::high: return "high";
        case HeterogeneityClass::discarded: return "discarded";
    }
    return "unknown";
}

HeterogeneityClass class_from_string(const std::string& s) {
    if (s == "low") return HeterogeneityClass::low;
    if (s == "high") return HeterogeneityClass::high;
    if (s == "discarded") return HeterogeneityClass::discarded;
    throw std::invalid_argument("unknown heterogeneity class: " + s);
}

CloneDistribution clone_proportions(const std::vector<std::uint32_t>& mutation_ids) {
    if (mutation_ids.empty()) throw std::invalid_argument("clone_proportions: empty patch");
    std::map<std::uint32_t, std::size_t> counts;
    for (auto m : mutation_ids) ++counts[m];
    CloneDistribution d;
    d.cell_count = mutation_ids.size();
    const double n = static_cast<double>(d.cell_count);
    for (auto [m, c] : counts) d.proportions[m] = static_cast<double>(c) / n;
    return d;
}

CloneDistribution clone_proportions(const cut::PatchGraph& g) {
    std::vector<std::uint32_t> ids;
    ids.reserve(g.nodes.size());
    for (const auto& v : g.nodes) ids.push_back(v.mutation_id);
    return clone_proportions(ids);
}

double normalized_entropy(const CloneDistribution& d) {
    const std::size_t nc = d.clone_count();
    if (nc <= 1) return 0.0;
    double h = 0.0;
    for (const auto& [m, p] : d.proportions)
        if (p > 0.0) h -= p * std::log2(p);
    return std::clamp(h / std::log2(static_cast<double>(nc)), 0.0, 1.0);
}

PatchLabel assign_class(double entropy, const LabelRule& rule) {
    PatchLabel out;
    out.entropy = entropy;
    // Band edges are computed in floating point; a relative slack keeps the
    // decimal boundary values themselves outside the open band.
    const double slack = 1e-12 * std::max(1.0, std::abs(rule.threshold));
    if (entropy <= rule.lower() + slack) out.cls = HeterogeneityClass::low;
    else if (entropy >= rule.upper() - slack) out.cls = HeterogeneityClass::high;
    else out.cls = HeterogeneityClass::discarded;
    return out;
}

std::vector<std::size_t> rebalance_indices(const std::vector<HeterogeneityClass>& labels, std::mt19937_64& rng) {
    std::vector<std::size_t> low, high;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == HeterogeneityClass::low) low.push_back(i);
        else if (labels[i] == HeterogeneityClass::high) high.push_back(i);
    }
    if (low.empty() || high.empty()) throw std::runtime_error("cannot balance: a class is absent");
    auto& major = low.size() > high.size() ? low : high;
    const std::size_t keep = std::min(low.size(), high.size());
    std::shuffle(major.begin(), major.end(), rng);
    major.resize(keep);
    std::vector<std::size_t> out;
    out.reserve(2 * keep);
    out.insert(out.end(), low.begin(), low.end());
    out.insert(out.end(), high.begin(), high.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace tumorgnn::label
