#pragma once

#include <cmath>
#include <stdexcept>

#include "omniproj/vec.hpp"

// Spherical coordinate conventions used throughout:
//   +X axis pierces the sphere at (lat 0, lon 0),
//   +Y at (lat 0, lon +pi/2),
//   +Z at the north pole.
// Latitude is in [-pi/2, +pi/2], longitude in [-pi, +pi). All angles radians.

namespace omniproj {

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

/// Direction on the unit sphere for a latitude/longitude pair.
/// Rejects coordinates outside the valid ranges (lon == +pi wraps to -pi).
inline Vec3 latlon_to_dir(LatLon p) {
    constexpr double eps = 1e-9;
    if (!(std::abs(p.lat) <= kHalfPi + eps))
        throw std::invalid_argument("latlon_to_dir: latitude out of [-pi/2, pi/2]");
    if (!(std::abs(p.lon) <= kPi + eps))
        throw std::invalid_argument("latlon_to_dir: longitude out of [-pi, pi)");
    const double cl = std::cos(p.lat);
    return {cl * std::cos(p.lon), cl * std::sin(p.lon), std::sin(p.lat)};
}

/// Inverse of latlon_to_dir. The input is renormalized, so near-unit vectors
/// are accepted; a zero vector is rejected. At the exact poles lon is 0.
inline LatLon dir_to_latlon(Vec3 d) {
    const double n = norm(d);
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("dir_to_latlon: zero or non-finite vector");
    const double x = d.x / n, y = d.y / n, z = d.z / n;
    LatLon p;
    p.lat = std::asin(std::clamp(z, -1.0, 1.0));
    p.lon = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
    if (p.lon >= kPi) p.lon = -kPi;  // atan2 returns +pi for (-r, -0)
    return p;
}

/// Great-circle angle between two directions, in [0, pi].
inline double angular_error(Vec3 a, Vec3 b) {
    const double c = dot(normalized(a), normalized(b));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace omniproj
