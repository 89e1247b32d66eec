#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace nsff {

/// Spatial point or direction; components beyond the active dimension are zero.
using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec3& a, int d) { return dot(a, a, d); }

inline double norm(const Vec3& a, int d) { return std::sqrt(norm2(a, d)); }

inline Vec3 scaled(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

constexpr double pi = 3.14159265358979323846;

}  // namespace nsff
