#pragma once

#include "tumorgnn/cut/cutgen.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace tumorgnn::feat {

inline constexpr std::size_t kNumFeatures = 7;

/// Column ids of the node feature matrix.
enum FeatureId : std::size_t {
    kIntensity = 0,
    kDensity = 1,
    kLocalBirth = 2,
    kLocalDeath = 3,
    kVolume = 4,
    kBirthFlag = 5,
    kDeathFlag = 6,
};

const char* feature_name(std::size_t id);

struct FeatureConfig {
    double sigma = 1.0;
    std::size_t volume_samples = 100000;
    std::uint64_t volume_seed = 0;

    void validate() const;
};

struct FeatureMatrix {
    std::size_t rows = 0;
    std::vector<double> H;          // rows x kNumFeatures, row-major
    std::vector<double> edge_attr;  // one distance per undirected edge
    std::vector<double> volume_stderr;  // Monte Carlo standard error of each a(v)

    double at(std::size_t r, std::size_t c) const { return H[r * kNumFeatures + c]; }
    double& at(std::size_t r, std::size_t c) { return H[r * kNumFeatures + c]; }
    bool operator==(const FeatureMatrix&) const = default;
};

/// Graph neighbours of every node (both directions of each stored edge).
std::vector<std::vector<std::uint32_t>> adjacency(const cut::PatchGraph& g);

double gaussian_weight(double dist, double sigma);

/// Mean Gaussian weight over graph neighbours; 0 for an isolated node.
double local_intensity(std::size_t v, const cut::PatchGraph& g,
                       const std::vector<std::vector<std::uint32_t>>& adj, const FeatureConfig& cfg);

/// Recorded simulation density; throws for non-finite or negative values.
double density_feature(const cut::CutCell& v);

std::array<double, 2> binary_encodings(const cut::CutCell& v);

/// Mean Gaussian weight from v to every node flagged by `flag` (v included
/// when flagged); 0 when no node is flagged.
double local_event_intensity(std::size_t v, const cut::PatchGraph& g, std::uint8_t cut::CutCell::*flag,
                             const FeatureConfig& cfg);
inline double local_birth_intensity(std::size_t v, const cut::PatchGraph& g, const FeatureConfig& cfg) {
    return local_event_intensity(v, g, &cut::CutCell::birth_flag, cfg);
}
inline double local_death_intensity(std::size_t v, const cut::PatchGraph& g, const FeatureConfig& cfg) {
    return local_event_intensity(v, g, &cut::CutCell::death_flag, cfg);
}

struct VolumeEstimate {
    std::vector<double> volume;
    std::vector<std::uint64_t> counts;
    std::vector<double> standard_error;
    double region_volume = 0.0;
};

/// Monte Carlo Voronoi volumes clipped to the box [center - r, center + r]^3.
/// Sampling happens in patch-relative coordinates with a seed derived from
/// cfg.volume_seed and the patch source, so the estimate depends only on
/// relative positions.
VolumeEstimate cell_volume(const cut::PatchGraph& g, const FeatureConfig& cfg);

FeatureMatrix assemble_features(const cut::PatchGraph& g, const FeatureConfig& cfg);

}  // namespace tumorgnn::feat
