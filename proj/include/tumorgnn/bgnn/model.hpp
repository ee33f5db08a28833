#pragma once

#include "tumorgnn/nn/ops.hpp"
#include "tumorgnn/nn/tensor.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace tumorgnn::bgnn {

enum class Variant { vanilla, all_norm, global, global_norm };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ModelConfig {
    std::size_t d = 64;
    std::size_t d_prime = 64;
    std::size_t heads = 1;
    Variant variant = Variant::vanilla;
    std::size_t global_dim = 64;
    double dropout = 0.15;
    std::vector<std::size_t> feature_mask{0, 1, 2, 3, 4, 5, 6};
    bool exact_gelu = false;
    /// Initial value of every GraphNorm mean-subtraction weight.
    double norm_alpha_init = 1.0;
    /// Turns the GraphNorm layers that follow GAT layers into identities.
    /// Only meant for parity tests between variants.
    bool bypass_extra_norms = false;
    std::uint64_t init_seed = 0;

    void validate() const;
    bool has_global() const { return variant == Variant::global || variant == Variant::global_norm; }
    bool has_extra_norms() const { return variant == Variant::all_norm || variant == Variant::global_norm; }
    /// e.g. "vanilla/4-head"
    std::string label() const;
    bool operator==(const ModelConfig&) const = default;
};

/// One node-feature graph ready for batching.
struct LabeledGraph {
    nn::Matrix x;  // nodes x 7
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<double> edge_attr;
    int label = 0;
};

nn::GraphBatch make_batch(const std::vector<const LabeledGraph*>& graphs);
nn::GraphBatch make_batch(const std::vector<LabeledGraph>& graphs);

class Model {
public:
    explicit Model(ModelConfig cfg);

    const ModelConfig& config() const { return cfg_; }
    nn::ParameterStore& params() { return params_; }
    const nn::ParameterStore& params() const { return params_; }

    /// Records the forward pass on `tape` and returns B x 2 logits.
    /// `rng` drives dropout and is only used when `training` is set.
    nn::Var forward(nn::Tape& tape, const nn::GraphBatch& batch, bool training, std::mt19937_64& rng,
                    std::vector<nn::Matrix>* attention = nullptr) const;
    /// Eval-mode logits without keeping the tape.
    nn::Matrix logits(const nn::GraphBatch& batch) const;

    /// Per-layer widths and parameter counts.
    std::string summary() const;

private:
    ModelConfig cfg_;
    nn::ParameterStore params_;

    nn::Parameter& p(const std::string& name) const;
};

}  // namespace tumorgnn::bgnn
