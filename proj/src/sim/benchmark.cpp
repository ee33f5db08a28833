#include "tumorgnn/sim/benchmark.hpp"

#include "tumorgnn/sim/simulator.hpp"
#include "tumorgnn/sim/spatial_index.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

namespace tumorgnn::sim {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

DensityBenchmark benchmark_density(std::size_t cells, std::size_t queries, std::uint64_t seed,
                                   const KernelParams& density) {
    std::mt19937_64 rng(seed);
    const double radius = std::cbrt(3.0 * static_cast<double>(cells) / (4.0 * std::numbers::pi));
    std::uniform_real_distribution<double> u(-radius, radius);
    std::vector<Vec3> pos;
    pos.reserve(cells);
    while (pos.size() < cells) {
        Vec3 p{u(rng), u(rng), u(rng)};
        if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= radius * radius) pos.push_back(p);
    }
    std::vector<std::size_t> picks(queries);
    std::uniform_int_distribution<std::size_t> pick(0, cells - 1);
    for (auto& q : picks) q = pick(rng);

    DensityBenchmark out;
    out.cells = cells;
    out.queries = queries;
    std::vector<double> fast(queries), slow(queries);

    auto t0 = std::chrono::steady_clock::now();
    SpatialIndex index(density.cutoff);
    for (std::size_t i = 0; i < cells; ++i) index.insert(static_cast<std::uint32_t>(i), pos[i]);
    out.build_seconds = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    for (std::size_t q = 0; q < queries; ++q)
        fast[q] = local_density(pos[picks[q]], static_cast<std::uint32_t>(picks[q]), index, density);
    out.index_seconds = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    for (std::size_t q = 0; q < queries; ++q) slow[q] = local_density_brute_force(pos[picks[q]], picks[q], pos, density);
    out.brute_seconds = seconds_since(t0);

    for (std::size_t q = 0; q < queries; ++q)
        out.max_abs_difference = std::max(out.max_abs_difference, std::abs(fast[q] - slow[q]));
    return out;
}

SimulationBenchmark benchmark_simulation(const GlobalParams& gp) {
    auto t0 = std::chrono::steady_clock::now();
    TumorHistory h = simulate(gp, IntrinsicParams{});
    SimulationBenchmark out;
    out.seconds = seconds_since(t0);
    out.birth_events = h.birth_count;
    out.end_time = h.end_time;
    for (const Cell& c : h.cells) out.final_alive += c.alive_at(h.end_time);
    return out;
}

}  // namespace tumorgnn::sim
