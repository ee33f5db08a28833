#pragma once

#include "tumorgnn/geometry.hpp"
#include "tumorgnn/sim/params.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace tumorgnn::sim {

inline constexpr std::uint32_t kNoCell = std::numeric_limits<std::uint32_t>::max();
inline constexpr std::uint32_t kRootClone = 0;

enum class EventKind : std::uint8_t {
    division_success = 0,
    division_failure = 1,
    natural_death = 2,
};

const char* to_string(EventKind k);

struct EventRecord {
    double time = 0.0;
    EventKind kind = EventKind::natural_death;
    std::uint32_t cell_id = kNoCell;
    /// Both kNoCell unless kind == division_success.
    std::array<std::uint32_t, 2> daughter_ids{kNoCell, kNoCell};
    /// Local density of the firing cell just before the event.
    double density_at_event = 0.0;
    Vec3 position{};
    std::uint32_t mutation_id = kRootClone;

    bool has_daughters() const { return kind == EventKind::division_success; }
    bool operator==(const EventRecord&) const = default;
};

/// Every cell that ever existed. Intrinsic parameters are a property of the
/// clone (see CloneRecord): daughters either inherit both or get a fresh pair.
struct Cell {
    std::uint32_t id = kNoCell;
    std::uint32_t parent_id = kNoCell;
    Vec3 position{};
    std::uint32_t mutation_id = kRootClone;
    double birth_time = 0.0;
    /// Time of the cell's terminal event; +inf when it outlived the run.
    double end_time = std::numeric_limits<double>::infinity();

    bool alive_at(double t) const { return birth_time <= t && t < end_time; }
    bool operator==(const Cell&) const = default;
};

struct CloneRecord {
    std::uint32_t parent_clone = kNoCell;  // kNoCell for the root clone
    IntrinsicParams params;
    double origin_time = 0.0;

    bool operator==(const CloneRecord&) const = default;
};

enum class StopReason : std::uint8_t {
    birth_limit = 0,
    time_limit = 1,
    extinction = 2,
};

/// Full record of one run: sufficient to replay the population at any time.
struct TumorHistory {
    GlobalParams params;
    IntrinsicParams initial;
    std::vector<EventRecord> events;  // strictly increasing time
    std::vector<Cell> cells;          // cells[i].id == i
    std::vector<CloneRecord> clones;  // clones[m] describes mutation id m
    double end_time = 0.0;
    std::uint64_t birth_count = 0;
    StopReason stop = StopReason::birth_limit;

    bool extinct() const { return stop == StopReason::extinction; }
    const IntrinsicParams& params_of(const Cell& c) const { return clones.at(c.mutation_id).params; }
    /// Ids of cells alive at time t, ascending.
    std::vector<std::uint32_t> alive_at(double t) const;

    bool operator==(const TumorHistory&) const = default;
};

}  // namespace tumorgnn::sim
