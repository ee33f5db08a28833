#pragma once

#include <cstdint>
#include <optional>

namespace tumorgnn::sim {

/// Per-cell efficiency/resistance pairs. Every field lives in [0,1].
struct IntrinsicParams {
    double birth_eff = 0.2;
    double birth_res = 0.5;
    double success_eff = 0.9;
    double success_res = 0.5;
    double lifespan_eff = 0.1;
    double lifespan_res = 0.5;

    /// Throws std::invalid_argument when a field leaves [0,1].
    void validate() const;

    bool operator==(const IntrinsicParams&) const = default;
};

/// Generalised truncated-exponential kernel s*exp(-(1/shape)(w/width)^shape).
/// `cutoff` only applies to the density kernel.
struct KernelParams {
    double scale = 1.0;
    double width = 1.0;
    double shape = 2.0;
    double cutoff = 1.517;

    void validate() const;

    bool operator==(const KernelParams&) const = default;
};

/// Simulation-wide parameters. Scaling parameters for the rate kernels are
/// calibrated so that a tumor with the default intrinsics grows instead of
/// going extinct; see README for the calibration.
struct GlobalParams {
    double mutation_probability = 0.01;
    double mutation_increase = 0.1;

    KernelParams density{1.0, 1.0, 2.0, 1.517};
    KernelParams birth{3.0, 3.0, 2.0, 0.0};
    KernelParams success{1.0, 10.0, 2.0, 0.0};
    KernelParams lifespan{300.0, 10.0, 2.0, 0.0};

    std::optional<std::uint64_t> max_birth_events = 100000;
    std::optional<double> max_sim_time;
    std::uint64_t rng_seed = 1;

    /// Upper bound applied to event rates so clocks stay representable when a
    /// mutated cell ends up with a near-zero resistance.
    double max_rate = 1e9;

    void validate() const;

    bool operator==(const GlobalParams&) const = default;
};

}  // namespace tumorgnn::sim
