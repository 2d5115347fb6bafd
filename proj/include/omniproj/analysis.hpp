#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "omniproj/image.hpp"
#include "omniproj/metrics.hpp"
#include "omniproj/projection.hpp"

// Sampling-uniformity analytics: per-pixel solid-angle maps and summary
// statistics quantifying how evenly a layout spends its pixels.

namespace omniproj {

struct DistortionStats {
    double min_omega = 0.0;   // steradians
    double max_omega = 0.0;
    double mean_omega = 0.0;
    double ratio = 1.0;       // max/min over active pixels
    double active_fraction = 1.0;
};

/// Per-pixel solid-angle map (same weights WS-PSNR uses on non-ERP grids).
inline WeightMap density_map(const ProjectionGrid& grid, int jobs = 0) {
    return solid_angle_weights(grid, jobs);
}

inline DistortionStats distortion_stats_of(const WeightMap& wm, const ActiveMask& mask) {
    DistortionStats s;
    s.min_omega = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    long n = 0;
    for (int y = 0; y < wm.height; ++y)
        for (int x = 0; x < wm.width; ++x) {
            if (!mask.at(x, y)) continue;
            const double w = wm.at(x, y);
            s.min_omega = std::min(s.min_omega, w);
            s.max_omega = std::max(s.max_omega, w);
            sum += w;
            ++n;
        }
    if (n == 0) throw std::invalid_argument("distortion stats: no active pixels");
    s.mean_omega = sum / n;
    s.ratio = s.max_omega / s.min_omega;
    s.active_fraction =
        static_cast<double>(n) / (static_cast<double>(wm.width) * wm.height);
    return s;
}

inline DistortionStats distortion_stats(const ProjectionGrid& grid, int jobs = 0) {
    return distortion_stats_of(density_map(grid, jobs), active_mask(grid));
}

/// Grayscale heatmap of relative sampling density (reciprocal pixel solid
/// angle), normalized to the per-image min/max over active pixels; denser
/// sampling renders brighter, inactive pixels render black.
inline PlanarImage heatmap_image(const WeightMap& wm, const ActiveMask& mask) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int y = 0; y < wm.height; ++y)
        for (int x = 0; x < wm.width; ++x)
            if (mask.at(x, y) && wm.at(x, y) > 0.0) {
                const double d = 1.0 / wm.at(x, y);
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
    const double span = hi > lo ? hi - lo : 1.0;
    PlanarImage img = PlanarImage::make(wm.width, wm.height, 1, 0.0f, ColorModel::gray);
    for (int y = 0; y < wm.height; ++y)
        for (int x = 0; x < wm.width; ++x) {
            const bool on = mask.at(x, y) && wm.at(x, y) > 0.0;
            img.at(x, y) =
                on ? static_cast<float>((1.0 / wm.at(x, y) - lo) / span) : 0.0f;
        }
    return img;
}

/// Stats block in the report conventions (csv or markdown, 6 significant
/// digits, deterministic).
inline std::string render_stats(const ProjectionGrid& grid, const DistortionStats& s,
                                const std::string& style = "csv") {
    char buf[256];
    if (style == "csv") {
        std::string out =
            "format,width,height,min_sr,max_sr,mean_sr,uniformity_ratio,active_fraction\n";
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                      to_string(grid.format).c_str(), grid.width, grid.height, s.min_omega,
                      s.max_omega, s.mean_omega, s.ratio, s.active_fraction);
        return out + buf;
    }
    if (style == "markdown") {
        std::string out =
            "| format | width | height | min sr | max sr | mean sr | ratio | active |\n"
            "|---|---|---|---|---|---|---|---|\n";
        std::snprintf(buf, sizeof buf, "| %s | %d | %d | %.6g | %.6g | %.6g | %.6g | %.6g |\n",
                      to_string(grid.format).c_str(), grid.width, grid.height, s.min_omega,
                      s.max_omega, s.mean_omega, s.ratio, s.active_fraction);
        return out + buf;
    }
    throw std::invalid_argument("render_stats: style must be csv or markdown");
}

}  // namespace omniproj
