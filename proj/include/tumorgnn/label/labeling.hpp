#pragma once

#include "tumorgnn/cut/cutgen.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tumorgnn::label {

struct CloneDistribution {
    std::map<std::uint32_t, double> proportions;  // mutation id -> p_i
    std::size_t cell_count = 0;

    std::size_t clone_count() const { return proportions.size(); }
};

enum class HeterogeneityClass : std::uint8_t { low = 0, high = 1, discarded = 2 };

const char* to_string(HeterogeneityClass c);
HeterogeneityClass class_from_string(const std::string& s);

struct PatchLabel {
    double entropy = 0.0;
    HeterogeneityClass cls = HeterogeneityClass::discarded;
};

/// Discard band is the open interval (threshold - margin/2, threshold + margin/2).
struct LabelRule {
    double threshold = 0.4;
    double margin = 0.05;

    double lower() const { return threshold - margin / 2.0; }
    double upper() const { return threshold + margin / 2.0; }
};

/// Clone proportions over the patch's own nodes.
CloneDistribution clone_proportions(const cut::PatchGraph& g);
CloneDistribution clone_proportions(const std::vector<std::uint32_t>& mutation_ids);

/// Shannon entropy (base 2) normalised by log2 of the clone count; 0 for a
/// single clone.
double normalized_entropy(const CloneDistribution& d);

PatchLabel assign_class(double entropy, const LabelRule& rule = {});

/// Randomly down-samples the majority class to the minority count. `labels`
/// gives the class (low/high) of each item; returns the kept indices in
/// ascending order. Throws when a class is absent.
std::vector<std::size_t> rebalance_indices(const std::vector<HeterogeneityClass>& labels, std::mt19937_64& rng);

/// Convenience wrapper over rebalance_indices for any item type exposing its
/// class through `cls_of`.
template <class T, class ClassOf>
std::vector<T> rebalance(const std::vector<T>& items, ClassOf cls_of, std::mt19937_64& rng) {
    std::vector<HeterogeneityClass> labels;
    labels.reserve(items.size());
    for (const T& it : items) labels.push_back(cls_of(it));
    std::vector<T> out;
    for (std::size_t i : rebalance_indices(labels, rng)) out.push_back(items[i]);
    return out;
}

}  // namespace tumorgnn::label
