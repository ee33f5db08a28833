#pragma once

#include "tumorgnn/nn/tensor.hpp"

#include <cstdint>
#include <vector>

namespace tumorgnn::nn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First and second moments, one Matrix per parameter in store order.
struct AdamState {
    std::uint64_t step = 0;
    std::vector<Matrix> m;
    std::vector<Matrix> v;

    void init(const ParameterStore& store);
    bool operator==(const AdamState&) const = default;
};

/// One bias-corrected Adam update using the gradients held in `store`.
void adam_step(ParameterStore& store, AdamState& state, double lr, const AdamConfig& cfg = {});

/// base_lr * factor^floor(epoch / period).
double lr_schedule(int epoch, double base_lr, double factor, int period);

}  // namespace tumorgnn::nn
