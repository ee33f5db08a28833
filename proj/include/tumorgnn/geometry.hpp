#pragma once

#include <array>
#include <cmath>

namespace tumorgnn {

using Vec3 = std::array<double, 3>;

inline double squared_distance(const Vec3& a, const Vec3& b) {
    double dx = a[0] - b[0];
    double dy = a[1] - b[1];
    double dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

inline double distance(const Vec3& a, const Vec3& b) { return std::sqrt(squared_distance(a, b)); }

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

}  // namespace tumorgnn
