#pragma once

#include "tumorgnn/bgnn/model.hpp"
#include "tumorgnn/cut/cutgen.hpp"
#include "tumorgnn/feat/features.hpp"
#include "tumorgnn/label/labeling.hpp"
#include "tumorgnn/pipeline/config.hpp"
#include "tumorgnn/sim/history.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace tumorgnn::pipeline {

/// Seed of one simulation attempt. `stream` separates the dataset tumors
/// (stream 0) from the sweep levels (stream 1 + level).
std::uint64_t tumor_seed(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index, int attempt);

struct TumorEntry {
    std::size_t index = 0;
    Split split = Split::train;
    double p_mut = 0.0;
    std::uint64_t seed = 0;
    int attempts = 0;
    double end_time = 0.0;
    std::uint64_t birth_count = 0;
    std::string file;
};

struct SimulatedTumor {
    TumorEntry entry;
    sim::TumorHistory history;
};

/// Runs one tumor, re-seeding while it goes extinct or ends before the last
/// cut window. Throws DataError when every attempt fails.
SimulatedTumor simulate_tumor(const PipelineConfig& cfg, std::uint64_t stream, std::size_t index, double p_mut);

/// Split and mutation probability of every dataset tumor, in index order.
std::vector<std::pair<Split, double>> tumor_allocation(const PipelineConfig& cfg);

struct PatchRecord {
    cut::PatchGraph graph;
    std::size_t cut_index = 0;
    label::PatchLabel label;
    feat::FeatureMatrix features;
    Split split = Split::train;
    double p_mut = 0.0;
};

struct FilterCounts {
    std::size_t sampled = 0;
    std::size_t degenerate = 0;   // fewer than two nodes
    std::size_t too_small = 0;    // failed the node/edge thresholds
    std::size_t discarded = 0;    // entropy inside the discard band
    std::size_t kept = 0;

    FilterCounts& operator+=(const FilterCounts& o);
    nlohmann::json to_json() const;
};

/// Cuts, patches, filters and labels one tumor. Features are computed only
/// for patches that survive labeling and only when `with_features` is set.
std::vector<PatchRecord> tumor_patches(const sim::TumorHistory& h, std::uint64_t tumor_id, const PipelineConfig& cfg,
                                       bool with_features, FilterCounts& counts);

struct Dataset {
    std::array<std::vector<PatchRecord>, 3> splits;
    std::array<FilterCounts, 3> filters;
    nlohmann::json stats;
};

/// Full chain over simulated tumors: patches, labels, features, then a
/// seeded per-split rebalance to equal class counts.
Dataset build_dataset(const PipelineConfig& cfg, const std::vector<SimulatedTumor>& tumors);

/// Per-split summary: patch and class counts and mean/std of cells,
/// births, deaths and entropy per patch.
nlohmann::json split_stats(const std::vector<PatchRecord>& patches);

nlohmann::json record_to_json(const PatchRecord& r);
PatchRecord record_from_json(const nlohmann::json& j);

bgnn::LabeledGraph to_labeled(const PatchRecord& r);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either sequence is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tumorgnn::pipeline
