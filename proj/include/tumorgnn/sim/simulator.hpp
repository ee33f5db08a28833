#pragma once

#include "tumorgnn/sim/history.hpp"
#include "tumorgnn/sim/params.hpp"
#include "tumorgnn/sim/spatial_index.hpp"

#include <random>
#include <utility>

namespace tumorgnn::sim {

/// Sum of kernel_rho over indexed cells within the density cutoff of `pos`,
/// skipping `self` (pass kNoCell to include everything).
double local_density(const Vec3& pos, std::uint32_t self, const SpatialIndex& index,
                     const KernelParams& density);

/// Same quantity by a linear scan over explicit positions; reference path.
double local_density_brute_force(const Vec3& pos, std::size_t self, const std::vector<Vec3>& positions,
                                 const KernelParams& density);

struct Daughter {
    Vec3 position;
    bool mutated = false;
    IntrinsicParams params;
};

/// Places the two daughters of a dividing cell and decides, independently for
/// each, whether it mutates. The first daughter sits exactly at the parent.
std::pair<Daughter, Daughter> spawn_daughters(const Vec3& parent_pos, const IntrinsicParams& parent,
                                              double p_mut, double mutation_increase,
                                              std::mt19937_64& rng);

/// Runs the event-driven birth-death process from `n0` cells (the first at
/// the origin, the rest offset by standard-normal draws) until the birth
/// limit, the time limit or extinction.
TumorHistory simulate(const GlobalParams& gp, const IntrinsicParams& initial, std::size_t n0 = 1);

}  // namespace tumorgnn::sim
