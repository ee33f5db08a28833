#pragma once

#include "tumorgnn/sim/params.hpp"

#include <cstddef>
#include <cstdint>

namespace tumorgnn::sim {

struct DensityBenchmark {
    std::size_t cells = 0;
    std::size_t queries = 0;
    double build_seconds = 0.0;  // one-off index construction
    double index_seconds = 0.0;  // all queries through the index
    double brute_seconds = 0.0;  // the same queries by linear scan
    double max_abs_difference = 0.0;

    /// Per-query speedup; the simulator keeps its index up to date
    /// incrementally, so construction is not part of a density evaluation.
    double speedup() const { return index_seconds > 0.0 ? brute_seconds / index_seconds : 0.0; }
};

/// Places `cells` points uniformly in a ball at unit number density and
/// computes the local density of `queries` of them through the spatial
/// index and through the linear scan.
DensityBenchmark benchmark_density(std::size_t cells, std::size_t queries, std::uint64_t seed,
                                   const KernelParams& density = GlobalParams{}.density);

struct SimulationBenchmark {
    std::uint64_t birth_events = 0;
    std::size_t final_alive = 0;
    double end_time = 0.0;
    double seconds = 0.0;
};

/// Times one simulation with the given parameters and default intrinsics.
SimulationBenchmark benchmark_simulation(const GlobalParams& gp);

}  // namespace tumorgnn::sim
