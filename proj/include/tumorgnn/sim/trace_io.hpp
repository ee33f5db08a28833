#pragma once

#include "tumorgnn/sim/history.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace tumorgnn::sim {

inline constexpr std::uint32_t kTraceSchemaVersion = 1;

/// Binary event trace, little-endian:
///   "TUMTRACE" | u32 schema | u32 header bytes | JSON header
///   u64 n_events, then per event
///     f64 time | u8 kind | u32 cell | f64 x y z | u32 mutation | f64 density | u32 d0 d1
///   u64 n_cells, then per cell
///     u32 parent | f64 x y z | u32 mutation | f64 birth | f64 end
///   u64 n_clones, then per clone
///     u32 parent | f64 origin | f64 x6 intrinsics
/// The JSON header carries GlobalParams, the initial intrinsics and run summary.
void write_trace(std::ostream& os, const TumorHistory& h);
TumorHistory read_trace(std::istream& is);

void write_trace_file(const std::string& path, const TumorHistory& h);
TumorHistory read_trace_file(const std::string& path);

}  // namespace tumorgnn::sim
