#include "tumorgnn/sim/benchmark.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

using namespace tumorgnn;

int main(int argc, char** argv) {
    CLI::App app{"Spatial index and simulation timings"};
    std::size_t cells = 100000;
    std::size_t queries = 2000;
    std::uint64_t seed = 1;
    std::uint64_t births = 0;
    app.add_option("--cells", cells, "Points in the density benchmark");
    app.add_option("--queries", queries, "Density evaluations per path");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--births", births, "Also time one simulation with this many birth events");
    CLI11_PARSE(app, argc, argv);

    try {
        sim::DensityBenchmark d = sim::benchmark_density(cells, queries, seed);
        std::printf("density: cells=%zu queries=%zu build=%.4fs index=%.4fs brute=%.4fs speedup=%.1fx max_diff=%.3g\n",
                    d.cells, d.queries, d.build_seconds, d.index_seconds, d.brute_seconds, d.speedup(), d.max_abs_difference);
        if (births > 0) {
            sim::GlobalParams gp;
            gp.max_birth_events = births;
            gp.rng_seed = seed;
            sim::SimulationBenchmark s = sim::benchmark_simulation(gp);
            std::printf("simulation: births=%llu alive=%zu t_end=%.3f seconds=%.2f\n",
                        static_cast<unsigned long long>(s.birth_events), s.final_alive, s.end_time, s.seconds);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
