#pragma once

#include "tumorgnn/geometry.hpp"
#include "tumorgnn/sim/history.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace tumorgnn::cut {

enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };

/// Slab [ref, ref + thickness] along `axis`, observed over [t_ref, t_ref + window].
struct CutSpec {
    double z_ref = 0.0;
    double thickness = 3.0;
    double t_ref = 40.0;
    double window = 1.0;
    Axis axis = Axis::z;

    double t_end() const { return t_ref + window; }
    void validate() const;
    bool operator==(const CutSpec&) const = default;
};

struct CutCell {
    std::uint32_t cell_id = sim::kNoCell;
    Vec3 position{};
    std::uint32_t mutation_id = 0;
    std::uint8_t birth_flag = 0;  // divided successfully inside the window
    std::uint8_t death_flag = 0;  // died (naturally or by failed division) inside the window
    double density = 0.0;

    bool operator==(const CutCell&) const = default;
};

struct PatchSource {
    std::uint64_t tumor_id = 0;
    CutSpec cut;
    std::uint32_t patch_index = 0;

    bool operator==(const PatchSource&) const = default;
};

/// Undirected edge stored once with i < j.
struct Edge {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double distance = 0.0;

    bool operator==(const Edge&) const = default;
};

struct PatchGraph {
    std::vector<CutCell> nodes;
    Vec3 center{};
    double radius = 10.0;
    std::vector<Edge> edges;
    PatchSource source;

    bool operator==(const PatchGraph&) const = default;
};

/// Every cell alive at some instant of the window whose axis coordinate lies
/// in the slab. Cells still alive at the window end carry their density in
/// the population at that instant; cells removed inside the window carry the
/// density recorded with their terminal event. Ordered by cell id.
std::vector<CutCell> extract_cut(const sim::TumorHistory& h, const CutSpec& spec);

/// The six cuts {0, -6, 6} x {40, 60} with thickness 3 and window 1.
std::vector<CutSpec> standard_battery_specs();

/// Applies standard_battery_specs(); throws std::runtime_error naming every
/// window the history does not cover.
std::vector<std::vector<CutCell>> standard_cut_battery(const sim::TumorHistory& h);

/// `n` centers drawn uniformly (with replacement) from the cut's cell positions.
std::vector<Vec3> sample_patch_centers(const std::vector<CutCell>& cut, std::size_t n, std::mt19937_64& rng);

/// Cut cells within `radius` (inclusive) of `center`, cut order preserved.
std::vector<CutCell> extract_patch(const std::vector<CutCell>& cut, const Vec3& center, double radius = 10.0);

/// Symmetrised k-nearest-neighbour graph. k is clipped to n - 1; ties are
/// broken by (distance, node index). Throws std::invalid_argument for fewer
/// than two nodes.
PatchGraph build_knn_graph(std::vector<CutCell> patch, std::size_t k = 10);

/// Strictly more than `min_nodes` nodes and more than `min_edges` edges.
bool accept_graph(const PatchGraph& g, std::size_t min_nodes = 100, std::size_t min_edges = 100);

}  // namespace tumorgnn::cut
