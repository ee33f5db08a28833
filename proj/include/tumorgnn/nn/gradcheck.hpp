#pragma once

#include "tumorgnn/nn/tensor.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tumorgnn::nn {

struct TensorGradCheck {
    std::string name;
    std::size_t entries_checked = 0;
    double analytic_norm = 0.0;
    double numeric_norm = 0.0;
    /// ||analytic - numeric|| / max(||analytic|| + ||numeric||, floor) over the checked entries.
    double relative_error = 0.0;
};

struct GradCheckOptions {
    double h = 1e-5;
    /// Entries per tensor to probe; 0 checks every entry.
    std::size_t max_entries = 0;
    std::uint64_t seed = 0;
    /// Central differences of an O(1) loss carry roundoff near 1e-16 / h per
    /// entry, so gradient norms below this floor are compared absolutely.
    double floor = 1e-6;
    /// Evaluate every perturbed loss on the kink sides of the unperturbed
    /// one (see BranchFreeze), so a step never straddles a LeakyReLU kink.
    bool freeze_branches = true;
};

/// Compares reverse-mode gradients of `loss_fn` with central differences
/// for every parameter in `store`. `loss_fn` must be deterministic and
/// return a 1x1 value recorded on the given tape.
std::vector<TensorGradCheck> gradient_check(ParameterStore& store, const std::function<Var(Tape&)>& loss_fn,
                                            const GradCheckOptions& opt = {});

double max_relative_error(const std::vector<TensorGradCheck>& report);

}  // namespace tumorgnn::nn
