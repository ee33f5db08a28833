#include "tumorgnn/sim/spatial_index.hpp"

#include <algorithm>
#include <stdexcept>

namespace tumorgnn::sim {

SpatialIndex::SpatialIndex(double cell_size) : cell_size_(cell_size) {
    if (!(cell_size > 0.0)) throw std::invalid_argument("SpatialIndex: cell_size must be > 0");
}

std::array<std::int64_t, 3> SpatialIndex::coords(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor(p[0] / cell_size_)),
            static_cast<std::int64_t>(std::floor(p[1] / cell_size_)),
            static_cast<std::int64_t>(std::floor(p[2] / cell_size_))};
}

std::uint64_t SpatialIndex::pack(std::int64_t x, std::int64_t y, std::int64_t z) {
    // 21 bits per axis, offset so negative coordinates stay distinct.
    constexpr std::int64_t off = 1 << 20;
    constexpr std::uint64_t mask = (1u << 21) - 1;
    auto ux = static_cast<std::uint64_t>(x + off) & mask;
    auto uy = static_cast<std::uint64_t>(y + off) & mask;
    auto uz = static_cast<std::uint64_t>(z + off) & mask;
    return (ux << 42) | (uy << 21) | uz;
}

void SpatialIndex::insert(std::uint32_t id, const Vec3& pos) {
    auto c = coords(pos);
    buckets_[pack(c[0], c[1], c[2])].push_back(Entry{id, pos});
    ++size_;
}

bool SpatialIndex::remove(std::uint32_t id, const Vec3& pos) {
    auto c = coords(pos);
    auto it = buckets_.find(pack(c[0], c[1], c[2]));
    if (it == buckets_.end()) return false;
    auto& v = it->second;
    auto e = std::find_if(v.begin(), v.end(), [id](const Entry& x) { return x.id == id; });
    if (e == v.end()) return false;
    *e = v.back();
    v.pop_back();
    --size_;
    return true;
}

std::vector<std::uint32_t> SpatialIndex::query(const Vec3& center, double radius) const {
    if (!(radius > 0.0)) throw std::invalid_argument("SpatialIndex::query: radius must be > 0");
    std::vector<std::uint32_t> out;
    for_each_within(center, radius, [&](std::uint32_t id, double) { out.push_back(id); });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace tumorgnn::sim
