#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "omniproj/detail/parallel.hpp"
#include "omniproj/image.hpp"
#include "omniproj/projection.hpp"

// Spherically correct resampling between projection grids. Destination
// pixels are inverse-mapped through the sphere; kernel taps that fall on a
// different face (or off the active area) are fetched by unprojecting the
// tap position through the source pixel's own face plane and re-sampling
// bilinearly at the true raster location ("spherical padding").

namespace omniproj {

enum class InterpKernel { nearest, bilinear, bicubic, lanczos3 };

inline std::string to_string(InterpKernel k) {
    switch (k) {
        case InterpKernel::nearest: return "nearest";
        case InterpKernel::bilinear: return "bilinear";
        case InterpKernel::bicubic: return "bicubic";
        case InterpKernel::lanczos3: return "lanczos3";
    }
    return "?";
}

inline InterpKernel parse_kernel(const std::string& s) {
    if (s == "nearest") return InterpKernel::nearest;
    if (s == "bilinear") return InterpKernel::bilinear;
    if (s == "bicubic") return InterpKernel::bicubic;
    if (s == "lanczos3") return InterpKernel::lanczos3;
    throw std::invalid_argument("unknown kernel: " + s);
}

namespace detail {

inline int kernel_taps(InterpKernel k) {
    switch (k) {
        case InterpKernel::nearest: return 1;
        case InterpKernel::bilinear: return 2;
        case InterpKernel::bicubic: return 4;
        case InterpKernel::lanczos3: return 6;
    }
    return 1;
}

inline double kernel_support(InterpKernel k) {
    switch (k) {
        case InterpKernel::nearest: return 0.5;
        case InterpKernel::bilinear: return 1.0;
        case InterpKernel::bicubic: return 2.0;
        case InterpKernel::lanczos3: return 3.0;
    }
    return 1.0;
}

/// Catmull-Rom cubic (a = -0.5).
inline double cubic_weight(double t) {
    t = std::abs(t);
    if (t < 1.0) return 1.0 + t * t * (1.5 * t - 2.5);
    if (t < 2.0) return 2.0 + t * (-4.0 + t * (2.5 - 0.5 * t));
    return 0.0;
}

inline double sinc(double t) {
    if (t == 0.0) return 1.0;
    const double pt = kPi * t;
    return std::sin(pt) / pt;
}

inline double lanczos3_weight(double t) {
    if (std::abs(t) >= 3.0) return 0.0;
    return sinc(t) * sinc(t / 3.0);
}

inline double kernel_weight(InterpKernel k, double t) {
    switch (k) {
        case InterpKernel::nearest: return std::abs(t) <= 0.5 ? 1.0 : 0.0;
        case InterpKernel::bilinear: return std::abs(t) < 1.0 ? 1.0 - std::abs(t) : 0.0;
        case InterpKernel::bicubic: return cubic_weight(t);
        case InterpKernel::lanczos3: return lanczos3_weight(t);
    }
    return 0.0;
}

/// Tap start index and weights for sampling a row of pixel centers at
/// continuous coordinate x. Returns the number of taps.
inline int axis_weights(InterpKernel k, double x, int* first, double w[6]) {
    const double t = x - 0.5;  // in pixel-index space
    switch (k) {
        case InterpKernel::nearest:
            *first = static_cast<int>(std::floor(x));
            w[0] = 1.0;
            return 1;
        case InterpKernel::bilinear: {
            const double b = std::floor(t);
            *first = static_cast<int>(b);
            const double f = t - b;
            w[0] = 1.0 - f;
            w[1] = f;
            return 2;
        }
        case InterpKernel::bicubic: {
            const double b = std::floor(t);
            *first = static_cast<int>(b) - 1;
            const double f = t - b;
            w[0] = cubic_weight(f + 1.0);
            w[1] = cubic_weight(f);
            w[2] = cubic_weight(f - 1.0);
            w[3] = cubic_weight(f - 2.0);
            return 4;
        }
        case InterpKernel::lanczos3: {
            const double b = std::floor(t);
            *first = static_cast<int>(b) - 2;
            const double f = t - b;
            for (int i = 0; i < 6; ++i) w[i] = lanczos3_weight(f + 2.0 - i);
            return 6;
        }
    }
    return 0;
}

/// Nearest active pixel value at a raster location; gray fill if even that
/// is unavailable (does not occur for intact grids).
inline void nearest_fetch(const PlanarImage& img, const GridPoint& g, float* out) {
    const int px = std::clamp(static_cast<int>(std::floor(g.x)), 0, img.width - 1);
    const int py = std::clamp(static_cast<int>(std::floor(g.y)), 0, img.height - 1);
    const bool ok = img.active(px, py);
    for (int c = 0; c < img.channels; ++c) out[c] = ok ? img.at(px, py, c) : kInactiveFill;
}

/// Bilinear read at a raster location. Taps outside the location's region
/// resolve once more through the sphere with a nearest-pixel read, so wrap
/// columns and face rims stay continuous.
inline void bilinear_fetch(const PlanarImage& img, const Mapping& m, const GridPoint& g,
                           float* out) {
    int fx, fy;
    double wx[6], wy[6];
    axis_weights(InterpKernel::bilinear, g.x, &fx, wx);
    axis_weights(InterpKernel::bilinear, g.y, &fy, wy);
    const int W = img.width, H = img.height;
    double acc[3] = {0.0, 0.0, 0.0};
    for (int j = 0; j < 2; ++j) {
        const int py = fy + j;
        for (int i = 0; i < 2; ++i) {
            const int px = fx + i;
            const double w = wx[i] * wy[j];
            if (w == 0.0) continue;
            float v[3];
            if (px >= 0 && px < W && py >= 0 && py < H &&
                m.region_at(px + 0.5, py + 0.5) == g.region) {
                for (int c = 0; c < img.channels; ++c) v[c] = img.at(px, py, c);
            } else {
                const Vec3 d = m.unproject_region(g.region, px + 0.5, py + 0.5);
                nearest_fetch(img, m.project(d), v);
            }
            for (int c = 0; c < img.channels; ++c) acc[c] += w * v[c];
        }
    }
    for (int c = 0; c < img.channels; ++c) out[c] = static_cast<float>(acc[c]);
}

}  // namespace detail

/// Kernel sample of src at sphere direction d. Seam-crossing taps use
/// spherical padding. Accumulation is anchored on the center tap so
/// constant images reproduce exactly for every kernel.
inline void sample_dir(const PlanarImage& src, const Mapping& m, Vec3 d, InterpKernel k,
                       float* out) {
    const GridPoint g = m.project(d);
    int fx, fy;
    double wx[6], wy[6];
    const int nx = detail::axis_weights(k, g.x, &fx, wx);
    const int ny = detail::axis_weights(k, g.y, &fy, wy);
    const int W = src.width, H = src.height;

    float taps[6][6][3];
    for (int j = 0; j < ny; ++j) {
        const int py = fy + j;
        for (int i = 0; i < nx; ++i) {
            const int px = fx + i;
            const bool direct = px >= 0 && px < W && py >= 0 && py < H &&
                                m.region_at(px + 0.5, py + 0.5) == g.region;
            if (direct) {
                for (int c = 0; c < src.channels; ++c) taps[j][i][c] = src.at(px, py, c);
            } else {
                const Vec3 dt = m.unproject_region(g.region, px + 0.5, py + 0.5);
                detail::bilinear_fetch(src, m, m.project(dt), taps[j][i]);
            }
        }
    }

    const int ci = std::clamp(nx / 2, 0, nx - 1);
    const int cj = std::clamp(ny / 2, 0, ny - 1);
    const bool clamp_range = k == InterpKernel::bicubic || k == InterpKernel::lanczos3;
    for (int c = 0; c < src.channels; ++c) {
        const double ref = taps[cj][ci][c];
        double acc = 0.0, wsum = 0.0;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double w = wx[i] * wy[j];
                wsum += w;
                acc += w * (taps[j][i][c] - ref);
            }
        double v = ref + acc / wsum;
        if (clamp_range) v = clamp01(v);
        out[c] = static_cast<float>(v);
    }
}

/// Public one-off sampling entry point.
inline std::vector<float> sample(const PlanarImage& src, const ProjectionGrid& src_grid,
                                 Vec3 d, InterpKernel k) {
    if (src.width != src_grid.width || src.height != src_grid.height)
        throw std::invalid_argument("sample: image does not match grid");
    const auto m = make_mapping(src_grid);
    std::vector<float> out(src.channels);
    sample_dir(src, *m, normalized(d), k, out.data());
    return out;
}

/// Convert an image between projection grids. Matching grids short-circuit
/// to a copy so no-op conversions are exact.
inline PlanarImage convert(const PlanarImage& src, const ProjectionGrid& src_grid,
                           const ProjectionGrid& dst_grid,
                           InterpKernel k = InterpKernel::bicubic, int jobs = 0) {
    if (src.width != src_grid.width || src.height != src_grid.height)
        throw std::invalid_argument("convert: image does not match source grid");
    validate_grid(dst_grid);

    PlanarImage dst = PlanarImage::make(dst_grid.width, dst_grid.height, src.channels,
                                        kInactiveFill, src.color);
    const auto dm = make_mapping(dst_grid);
    dst.mask = active_mask(*dm);

    if (src_grid == dst_grid) {
        for (int c = 0; c < src.channels; ++c)
            for (int y = 0; y < dst.height; ++y)
                for (int x = 0; x < dst.width; ++x)
                    if (dst.active(x, y)) dst.at(x, y, c) = src.at(x, y, c);
        return dst;
    }

    const auto sm = make_mapping(src_grid);
    detail::parallel_for(dst.height, jobs, [&](long y) {
        float vals[3];
        for (int x = 0; x < dst.width; ++x) {
            const int r = dm->region_at(x + 0.5, y + 0.5);
            if (r < 0) continue;
            const Vec3 d = dm->unproject_region(r, x + 0.5, y + 0.5);
            sample_dir(src, *sm, d, k, vals);
            for (int c = 0; c < src.channels; ++c) dst.at(x, static_cast<int>(y), c) = vals[c];
        }
    });
    return dst;
}

}  // namespace omniproj
