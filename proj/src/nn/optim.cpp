#include "tumorgnn/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace tumorgnn::nn {

void AdamState::init(const ParameterStore& store) {
    step = 0;
    m.clear();
    v.clear();
    for (std::size_t i = 0; i < store.size(); ++i) {
        m.emplace_back(store[i].value.rows, store[i].value.cols);
        v.emplace_back(store[i].value.rows, store[i].value.cols);
    }
}

void adam_step(ParameterStore& store, AdamState& state, double lr, const AdamConfig& cfg) {
    if (state.m.size() != store.size()) state.init(store);
    ++state.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t p = 0; p < store.size(); ++p) {
        Parameter& par = store[p];
        auto& m = state.m[p].data;
        auto& v = state.v[p].data;
        if (m.size() != par.value.size()) throw std::invalid_argument("adam_step: state shape mismatch");
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double g = par.grad.data[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            const double mh = m[i] / c1;
            const double vh = v[i] / c2;
            par.value.data[i] -= lr * mh / (std::sqrt(vh) + cfg.eps);
        }
    }
}

double lr_schedule(int epoch, double base_lr, double factor, int period) {
    if (period < 1) throw std::invalid_argument("lr_schedule: period must be >= 1");
    if (epoch < 0) throw std::invalid_argument("lr_schedule: negative epoch");
    return base_lr * std::pow(factor, epoch / period);
}

}  // namespace tumorgnn::nn
