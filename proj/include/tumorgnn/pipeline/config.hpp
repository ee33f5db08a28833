#pragma once

#include "tumorgnn/bgnn/model.hpp"
#include "tumorgnn/bgnn/train.hpp"
#include "tumorgnn/cut/cutgen.hpp"
#include "tumorgnn/feat/features.hpp"
#include "tumorgnn/label/labeling.hpp"
#include "tumorgnn/sim/params.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace tumorgnn::pipeline {

/// Invalid or inconsistent configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Missing, unreadable or unusable input data (CLI exit code 3).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Split { train = 0, val = 1, test = 2 };
const char* to_string(Split s);

struct SimSection {
    sim::GlobalParams global;
    sim::IntrinsicParams initial;
    std::size_t initial_cells = 1;
    /// Simulations that go extinct or stop before the last cut window are
    /// re-run with a fresh derived seed, at most this many times in total.
    int max_attempts = 20;
};

struct SplitCounts {
    std::size_t train = 16;
    std::size_t val = 2;
    std::size_t test = 2;
    std::size_t total() const { return train + val + test; }
};

struct PatchSection {
    std::size_t per_cut = 20;
    double radius = 10.0;
    std::size_t k = 10;
    std::size_t min_nodes = 100;
    std::size_t min_edges = 100;
};

struct SweepSection {
    std::vector<double> mutation_probabilities{0.01, 0.03, 0.06, 0.1, 0.15, 0.2};
    std::size_t tumors_per_level = 4;
};

struct PipelineConfig {
    std::uint64_t master_seed = 1;
    SimSection sim;
    SplitCounts tumors;
    /// Mutation probability levels. The tumors of each split are spread
    /// evenly over the levels in the given order, first level to last.
    std::vector<double> dataset_mutation_probabilities{0.05, 0.1, 0.15, 0.2};
    std::vector<cut::CutSpec> cuts = cut::standard_battery_specs();
    PatchSection patches;
    label::LabelRule labeling;
    feat::FeatureConfig features;
    bgnn::ModelConfig model;
    bgnn::TrainConfig train;
    SweepSection sweep;
    std::vector<std::vector<std::size_t>> ablation_masks;

    /// Latest window end over the cut battery.
    double required_end_time() const;
    void validate() const;
};

PipelineConfig paper_preset();
PipelineConfig desk_preset();
PipelineConfig preset(const std::string& name);

nlohmann::json to_json(const PipelineConfig& c);
/// Overlays `j` on `base`; keys absent from `j` keep the base values.
PipelineConfig from_json(const nlohmann::json& j, PipelineConfig base);

nlohmann::json model_config_json(const bgnn::ModelConfig& m);
bgnn::ModelConfig model_config_from_json(const nlohmann::json& j, bgnn::ModelConfig base = {});
nlohmann::json train_config_json(const bgnn::TrainConfig& t);
bgnn::TrainConfig train_config_from_json(const nlohmann::json& j, bgnn::TrainConfig base = {});
nlohmann::json cut_spec_json(const cut::CutSpec& s);
cut::CutSpec cut_spec_from_json(const nlohmann::json& j);

/// Reads a JSON config file and overlays it on the named preset.
PipelineConfig load_config(const std::string& path, const std::string& preset_name);

}  // namespace tumorgnn::pipeline
