#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "omniproj/image.hpp"
#include "omniproj/projection.hpp"

// Synthetic test scenes defined analytically on the sphere, so the same
// content renders into any projection. Values stay inside [0.1, 0.9] to
// keep metric fixtures away from saturation.

namespace omniproj {

enum class PatternKind { latlon_grid, smooth_harmonic, checker_sphere };

inline std::string to_string(PatternKind k) {
    switch (k) {
        case PatternKind::latlon_grid: return "latlon-grid";
        case PatternKind::smooth_harmonic: return "smooth-harmonic";
        case PatternKind::checker_sphere: return "checker-sphere";
    }
    return "?";
}

inline PatternKind parse_pattern(const std::string& s) {
    if (s == "latlon-grid") return PatternKind::latlon_grid;
    if (s == "smooth-harmonic") return PatternKind::smooth_harmonic;
    if (s == "checker-sphere") return PatternKind::checker_sphere;
    throw std::invalid_argument("unknown pattern kind: " + s);
}

namespace detail {

// Deterministic uniform in [-1, 1] (the distribution classes in <random>
// are implementation-defined, so draws are derived from raw engine output).
inline double uniform_pm1(std::mt19937_64& rng) {
    return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

/// Real spherical-harmonic style polynomial basis up to degree 3.
inline std::array<double, 16> sh_basis(const Vec3& d) {
    const double x = d.x, y = d.y, z = d.z;
    return {1.0,
            y, z, x,
            x * y, y * z, 3.0 * z * z - 1.0, x * z, x * x - y * y,
            y * (3.0 * x * x - y * y), x * y * z, y * (5.0 * z * z - 1.0),
            z * (5.0 * z * z - 3.0), x * (5.0 * z * z - 1.0), z * (x * x - y * y),
            x * (x * x - 3.0 * y * y)};
}

inline double wrap_lon(double lon) {
    while (lon < -kPi) lon += kTwoPi;
    while (lon >= kPi) lon -= kTwoPi;
    return lon;
}

}  // namespace detail

/// Seeded analytic scene; eval() is the oracle the raster renders against.
/// Seed 0 of smooth-harmonic degenerates to a constant 0.5.
class SpherePattern {
public:
    SpherePattern(PatternKind kind, uint32_t seed, int channels = 1)
        : kind_(kind), seed_(seed), channels_(channels) {
        if (channels != 1 && channels != 3)
            throw std::invalid_argument("pattern channels must be 1 or 3");
        if (kind_ == PatternKind::smooth_harmonic) init_harmonic();
    }

    int channels() const { return channels_; }

    double eval(const Vec3& d, int channel = 0) const {
        switch (kind_) {
            case PatternKind::smooth_harmonic: {
                if (scale_[channel] == 0.0) return 0.5;
                const auto basis = detail::sh_basis(d);
                double s = 0.0;
                for (int i = 0; i < 16; ++i) s += coeff_[channel][i] * basis[i];
                return 0.5 + s * scale_[channel];
            }
            case PatternKind::checker_sphere: {
                // Cells live in a seed-rotated frame so their edges do not
                // align with any one layout's raster axes; the seed also
                // picks the cell size.
                const double a = 0.5 + 0.7390851332151607 * seed_;
                const double b = 0.3 + 0.4512 * seed_ + 0.41 * channel;
                const Vec3 r1{d.x * std::cos(a) + d.z * std::sin(a), d.y,
                              -d.x * std::sin(a) + d.z * std::cos(a)};
                const Vec3 r{r1.x * std::cos(b) - r1.y * std::sin(b),
                             r1.x * std::sin(b) + r1.y * std::cos(b), r1.z};
                const LatLon p = dir_to_latlon(r);
                static constexpr double kSteps[3] = {kPi / 8.0, kPi / 16.0, kPi / 24.0};
                const double step = kSteps[seed_ % 3];
                const long i = static_cast<long>(std::floor((p.lon + kPi) / step));
                const long j = static_cast<long>(std::floor((p.lat + kHalfPi) / step));
                return ((i + j) & 1) ? 0.8 : 0.2;
            }
            case PatternKind::latlon_grid: {
                const LatLon p = dir_to_latlon(d);
                const double step = kPi / 12.0;
                const double phase = 0.05 * seed_ + 0.02 * channel;
                const double dlat = std::abs(std::remainder(p.lat + phase, step));
                const double dlon = std::abs(std::remainder(p.lon + phase, step));
                const double half_width = 0.012;
                const bool line = dlat < half_width || dlon * std::cos(p.lat) < half_width;
                return line ? 0.85 : 0.25;
            }
        }
        return 0.5;
    }

private:
    void init_harmonic() {
        static constexpr int kDegree[16] = {0, 1, 1, 1, 2, 2, 2, 2, 2,
                                            3, 3, 3, 3, 3, 3, 3};
        for (int c = 0; c < channels_; ++c) {
            scale_[c] = 0.0;
            if (seed_ == 0) continue;
            std::mt19937_64 rng(seed_ * 0x9E3779B97F4A7C15ull + 0x1234567ull * c);
            for (int i = 0; i < 16; ++i)
                coeff_[c][i] = detail::uniform_pm1(rng) / (1.0 + kDegree[i]);
            coeff_[c][0] = 0.0;  // keep the mean at 0.5
            // Deterministic normalization over a fixed direction lattice.
            double peak = 0.0;
            for (int yy = 0; yy < 48; ++yy)
                for (int xx = 0; xx < 96; ++xx) {
                    const double lat = kPi * (0.5 - (yy + 0.5) / 48.0);
                    const double lon = kTwoPi * ((xx + 0.5) / 96.0 - 0.5);
                    const double cl = std::cos(lat);
                    const Vec3 d{cl * std::cos(lon), cl * std::sin(lon), std::sin(lat)};
                    const auto basis = detail::sh_basis(d);
                    double s = 0.0;
                    for (int i = 0; i < 16; ++i) s += coeff_[c][i] * basis[i];
                    peak = std::max(peak, std::abs(s));
                }
            scale_[c] = peak > 0.0 ? 0.4 / peak : 0.0;
        }
    }

    PatternKind kind_;
    uint32_t seed_;
    int channels_;
    std::array<std::array<double, 16>, 3> coeff_{};
    std::array<double, 3> scale_{};
};

/// Renders a pattern into a grid via per-pixel unprojection; inactive
/// pixels take the gray fill. Deterministic given (kind, seed).
inline PlanarImage gen_pattern(PatternKind kind, const ProjectionGrid& grid, uint32_t seed = 1,
                               int channels = 1) {
    const SpherePattern pattern(kind, seed, channels);
    const auto m = make_mapping(grid);
    PlanarImage img =
        PlanarImage::make(grid.width, grid.height, channels, kInactiveFill,
                          channels == 1 ? ColorModel::gray : ColorModel::rgb);
    img.mask = active_mask(*m);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            const int r = m->region_at(x + 0.5, y + 0.5);
            if (r < 0) continue;
            const Vec3 d = m->unproject_region(r, x + 0.5, y + 0.5);
            for (int c = 0; c < channels; ++c)
                img.at(x, y, c) = static_cast<float>(clamp01(pattern.eval(d, c)));
        }
    return img;
}

}  // namespace omniproj
