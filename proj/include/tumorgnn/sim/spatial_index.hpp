#pragma once

#include "tumorgnn/geometry.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace tumorgnn::sim {

/// Uniform hash grid over 3-D points. Buckets are `cell_size` wide, so a
/// query of radius r touches ceil(r / cell_size) buckets in each direction.
class SpatialIndex {
public:
    struct Entry {
        std::uint32_t id;
        Vec3 pos;
    };

    explicit SpatialIndex(double cell_size);

    void insert(std::uint32_t id, const Vec3& pos);
    /// Removes `id`, which must have been inserted at `pos`. Returns false if absent.
    bool remove(std::uint32_t id, const Vec3& pos);

    std::size_t size() const { return size_; }
    double cell_size() const { return cell_size_; }

    /// Calls f(id, squared_distance) for every point with distance <= radius.
    template <class F>
    void for_each_within(const Vec3& center, double radius, F&& f) const {
        const double r2 = radius * radius;
        const int reach = static_cast<int>(std::ceil(radius / cell_size_));
        const auto c = coords(center);
        for (int dx = -reach; dx <= reach; ++dx)
            for (int dy = -reach; dy <= reach; ++dy)
                for (int dz = -reach; dz <= reach; ++dz) {
                    auto it = buckets_.find(pack(c[0] + dx, c[1] + dy, c[2] + dz));
                    if (it == buckets_.end()) continue;
                    for (const Entry& e : it->second) {
                        double d2 = squared_distance(e.pos, center);
                        if (d2 <= r2) f(e.id, d2);
                    }
                }
    }

    /// Ids within `radius` of `center`, sorted ascending.
    std::vector<std::uint32_t> query(const Vec3& center, double radius) const;

private:
    std::array<std::int64_t, 3> coords(const Vec3& p) const;
    static std::uint64_t pack(std::int64_t x, std::int64_t y, std::int64_t z);

    double cell_size_;
    std::size_t size_ = 0;
    std::unordered_map<std::uint64_t, std::vector<Entry>> buckets_;
};

}  // namespace tumorgnn::sim
