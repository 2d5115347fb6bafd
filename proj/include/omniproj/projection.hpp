#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "omniproj/geometry.hpp"
#include "omniproj/image.hpp"
#include "omniproj/vec.hpp"

// Sphere <-> raster mappings for the seven supported layouts. Raster
// coordinates are continuous with pixel (i,j) centered at (i+0.5, j+0.5).
// Layout conventions (documented in detail in docs/formats.md):
//
//   ERP   2:1 raster, lon = 2*pi*(x/W - 0.5), lat = pi*(0.5 - y/H).
//   CMP   3x2 face layout, top row Left(-Y) Front(+X) Right(+Y),
//         bottom row Down(-Z) Back(-X) Up(+Z), faces unrotated.
//   EAC   CMP layout with the equi-angular remap applied per face axis.
//   TSP   front face fills the left square; the right square packs the
//         back face (scaled by the back-face ratio) centered, with four
//         trapezoids carrying the side faces. Full sphere coverage.
//   SSP   equatorial band (|lat| <= cap) across the left 3/4 of the
//         raster, two azimuthal-equidistant pole disks inscribed in
//         squares stacked on the right; square corners are inactive.
//   ISP   icosahedral net: 5 north cap triangles, 10 interleaved middle
//         triangles, 5 south cap triangles; gaps are inactive.
//   OHP   octahedral net: 4 north triangles over 4 south triangles,
//         aligned on the shared equator edge; gaps are inactive.
//
// Every region mapping is continuous on its closure and extends slightly
// past it, which the resampler and the solid-angle integrator rely on.

namespace omniproj {

enum class ProjectionFormat { erp, cmp, eac, isp, ohp, tsp, ssp };

inline constexpr std::array<ProjectionFormat, 7> kAllFormats = {
    ProjectionFormat::erp, ProjectionFormat::cmp, ProjectionFormat::eac,
    ProjectionFormat::isp, ProjectionFormat::ohp, ProjectionFormat::tsp,
    ProjectionFormat::ssp};

inline std::string to_string(ProjectionFormat f) {
    switch (f) {
        case ProjectionFormat::erp: return "erp";
        case ProjectionFormat::cmp: return "cmp";
        case ProjectionFormat::eac: return "eac";
        case ProjectionFormat::isp: return "isp";
        case ProjectionFormat::ohp: return "ohp";
        case ProjectionFormat::tsp: return "tsp";
        case ProjectionFormat::ssp: return "ssp";
    }
    return "?";
}

inline ProjectionFormat parse_format(const std::string& s) {
    for (ProjectionFormat f : kAllFormats)
        if (to_string(f) == s) return f;
    throw std::invalid_argument("unknown projection format: " + s);
}

struct ProjectionGrid {
    ProjectionFormat format = ProjectionFormat::erp;
    int width = 0;
    int height = 0;
    double tsp_back_ratio = 1.0 / 3.0;
    double ssp_cap_lat = kPi / 4.0;
    // Triangle raster base/height for isp/ohp.
    double tri_base = 0.0;
    double tri_height = 0.0;
    bool operator==(const ProjectionGrid&) const = default;
};

/// Continuous raster location plus the face/region it belongs to.
struct GridPoint {
    double x = 0.0;
    double y = 0.0;
    int region = 0;
};

// --- equi-angular remap -----------------------------------------------------

/// Face coordinate remap used by EAC: u' = (4/pi) * atan(u). Odd, monotone,
/// fixes -1, 0, 1.
inline double eac_remap(double u) {
    if (!(std::abs(u) <= 1.0 + 1e-12))
        throw std::invalid_argument("eac_remap: |u| > 1");
    return std::atan(u) * 4.0 / kPi;
}

/// Inverse remap: u = tan(pi * u' / 4).
inline double eac_unmap(double t) {
    if (!(std::abs(t) <= 1.0 + 1e-12))
        throw std::invalid_argument("eac_unmap: |u| > 1");
    if (t == 1.0) return 1.0;
    if (t == -1.0) return -1.0;
    return std::tan(t * kPi / 4.0);
}

// --- grid construction ------------------------------------------------------

namespace detail {

inline int even_round(double v) {
    const int n = 2 * static_cast<int>(std::lround(v / 2.0));
    return std::max(2, n);
}

inline int even_ceil(double v) {
    int n = static_cast<int>(std::ceil(v - 1e-9));
    if (n % 2) ++n;
    return std::max(2, n);
}

inline constexpr double kTriAspect = 0.86602540378443864676;  // sqrt(3)/2

}  // namespace detail

inline ProjectionGrid erp_grid(int height) {
    return {ProjectionFormat::erp, 2 * height, height};
}

inline ProjectionGrid cube_grid(ProjectionFormat f, int face) {
    ProjectionGrid g;
    g.format = f;
    g.width = 3 * face;
    g.height = 2 * face;
    return g;
}

inline ProjectionGrid tsp_grid(int height, double back_ratio = 1.0 / 3.0) {
    ProjectionGrid g;
    g.format = ProjectionFormat::tsp;
    g.width = 2 * height;
    g.height = height;
    g.tsp_back_ratio = back_ratio;
    return g;
}

inline ProjectionGrid ssp_grid(int height, double cap_lat = kPi / 4.0) {
    ProjectionGrid g;
    g.format = ProjectionFormat::ssp;
    g.width = 2 * height;
    g.height = height;
    g.ssp_cap_lat = cap_lat;
    return g;
}

inline ProjectionGrid tri_grid(ProjectionFormat f, int base) {
    ProjectionGrid g;
    g.format = f;
    g.tri_base = base;
    g.tri_height = detail::kTriAspect * base;
    if (f == ProjectionFormat::isp) {
        g.width = detail::even_ceil(5.5 * g.tri_base);
        g.height = detail::even_ceil(3.0 * g.tri_height);
    } else {
        g.width = detail::even_ceil(4.0 * g.tri_base);
        g.height = detail::even_ceil(2.0 * g.tri_height);
    }
    return g;
}

inline void validate_grid(const ProjectionGrid& g) {
    if (g.width < 2 || g.height < 2)
        throw std::invalid_argument("grid: dimensions must be >= 2");
    switch (g.format) {
        case ProjectionFormat::erp:
        case ProjectionFormat::tsp:
            if (g.width != 2 * g.height)
                throw std::invalid_argument("grid: width must equal 2*height");
            if (g.format == ProjectionFormat::tsp &&
                !(g.tsp_back_ratio > 0.0 && g.tsp_back_ratio < 1.0))
                throw std::invalid_argument("grid: tsp back ratio must be in (0,1)");
            break;
        case ProjectionFormat::cmp:
        case ProjectionFormat::eac:
            if (g.width % 3 || g.height % 2 || g.width / 3 != g.height / 2)
                throw std::invalid_argument("grid: cubemap layout must be 3x2 square faces");
            break;
        case ProjectionFormat::ssp:
            if (g.width != 2 * g.height || g.height % 2)
                throw std::invalid_argument("grid: ssp needs width == 2*height, even height");
            if (!(g.ssp_cap_lat > 0.0 && g.ssp_cap_lat < kHalfPi))
                throw std::invalid_argument("grid: ssp cap latitude out of range");
            break;
        case ProjectionFormat::isp:
        case ProjectionFormat::ohp: {
            if (!(g.tri_base > 0.0) || !(g.tri_height > 0.0))
                throw std::invalid_argument("grid: triangle layout parameters missing");
            const double need_w = (g.format == ProjectionFormat::isp ? 5.5 : 4.0) * g.tri_base;
            const double need_h = (g.format == ProjectionFormat::isp ? 3.0 : 2.0) * g.tri_height;
            if (g.width + 1e-9 < need_w || g.height + 1e-9 < need_h)
                throw std::invalid_argument("grid: raster too small for triangle layout");
            break;
        }
    }
}

// --- mapping interface ------------------------------------------------------

class Mapping {
public:
    explicit Mapping(const ProjectionGrid& g) : grid_(g) {}
    virtual ~Mapping() = default;

    const ProjectionGrid& grid() const { return grid_; }

    bool in_raster(double x, double y) const {
        return x >= 0.0 && x <= grid_.width && y >= 0.0 && y <= grid_.height;
    }

    virtual int region_count() const = 0;

    /// Region owning a raster point; -1 outside the raster or on inactive
    /// pixels. Ties on shared boundaries go to the lowest region index.
    virtual int region_at(double x, double y) const = 0;

    /// Continuous sphere direction for a raster point interpreted through
    /// one region's mapping. Defined on the region closure and slightly
    /// beyond it.
    virtual Vec3 unproject_region(int region, double x, double y) const = 0;

    /// Active raster location for a unit direction. Every format covers the
    /// sphere, so this always succeeds; seam ties resolve to the lowest
    /// region index.
    virtual GridPoint project(Vec3 d) const = 0;

protected:
    ProjectionGrid grid_;
};

// --- ERP ---------------------------------------------------------------

class ErpMapping final : public Mapping {
public:
    using Mapping::Mapping;

    int region_count() const override { return 1; }

    int region_at(double x, double y) const override { return in_raster(x, y) ? 0 : -1; }

    Vec3 unproject_region(int, double x, double y) const override {
        const double lon = kTwoPi * (x / grid_.width - 0.5);
        const double lat = kPi * (0.5 - y / grid_.height);
        const double cl = std::cos(lat);
        // The raw formula extends continuously across the poles and the
        // longitude wrap, which is exactly what spherical padding needs.
        return {cl * std::cos(lon), cl * std::sin(lon), std::sin(lat)};
    }

    GridPoint project(Vec3 d) const override {
        const LatLon p = dir_to_latlon(d);
        double x = grid_.width * (p.lon / kTwoPi + 0.5);
        const double y = grid_.height * (0.5 - p.lat / kPi);
        if (x >= grid_.width) x -= grid_.width;
        return {x, y, 0};
    }
};

// --- cube face table (shared by CMP, EAC, TSP) -------------------------

struct CubeFace {
    Vec3 axis, u_axis, v_axis;
    int col, row;  // cell in the 3x2 layout
};

inline constexpr std::array<CubeFace, 6> kCubeFaces = {{
    {{0, -1, 0}, {1, 0, 0}, {0, 0, -1}, 0, 0},   // left  (-Y)
    {{1, 0, 0}, {0, 1, 0}, {0, 0, -1}, 1, 0},    // front (+X)
    {{0, 1, 0}, {-1, 0, 0}, {0, 0, -1}, 2, 0},   // right (+Y)
    {{0, 0, -1}, {0, 1, 0}, {1, 0, 0}, 0, 1},    // down  (-Z)
    {{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}, 1, 1},  // back  (-X)
    {{0, 0, 1}, {0, 1, 0}, {-1, 0, 0}, 2, 1},    // up    (+Z)
}};

class CubeMapping final : public Mapping {
public:
    CubeMapping(const ProjectionGrid& g, bool equi_angular)
        : Mapping(g), eac_(equi_angular), face_(g.width / 3.0) {}

    int region_count() const override { return 6; }

    int region_at(double x, double y) const override {
        if (!in_raster(x, y)) return -1;
        const int col = std::min(static_cast<int>(x / face_), 2);
        const int row = std::min(static_cast<int>(y / face_), 1);
        return row * 3 + col;
    }

    Vec3 unproject_region(int region, double x, double y) const override {
        const CubeFace& f = kCubeFaces[region];
        double u = 2.0 * (x - f.col * face_) / face_ - 1.0;
        double v = 2.0 * (y - f.row * face_) / face_ - 1.0;
        if (eac_) {
            u = std::tan(u * kPi / 4.0);
            v = std::tan(v * kPi / 4.0);
        }
        return normalized(f.axis + u * f.u_axis + v * f.v_axis);
    }

    GridPoint project(Vec3 d) const override {
        for (int i = 0; i < 6; ++i) {
            const CubeFace& f = kCubeFaces[i];
            const double t = dot(d, f.axis);
            if (t <= 0.0) continue;
            double u = dot(d, f.u_axis) / t;
            double v = dot(d, f.v_axis) / t;
            if (std::abs(u) > 1.0 + 1e-12 || std::abs(v) > 1.0 + 1e-12) continue;
            if (eac_) {
                u = std::atan(u) * 4.0 / kPi;
                v = std::atan(v) * 4.0 / kPi;
            }
            u = std::clamp(u, -1.0, 1.0);
            v = std::clamp(v, -1.0, 1.0);
            return {(f.col + (u + 1.0) / 2.0) * face_, (f.row + (v + 1.0) / 2.0) * face_, i};
        }
        throw std::runtime_error("cube project: no face accepted direction");
    }

private:
    bool eac_;
    double face_;
};

// --- TSP ---------------------------------------------------------------

// Regions: 0 front square, 1 back square, then the trapezoids in raster
// order left(2, cube +Y), top(3, cube +Z), right(4, cube -Y),
// bottom(5, cube -Z). Trapezoid parameter s runs 0 at the outer edge
// (adjacent to the front face on the sphere) to 1 at the back square.
class TspMapping final : public Mapping {
public:
    explicit TspMapping(const ProjectionGrid& g)
        : Mapping(g), side_(g.height), r_(g.tsp_back_ratio), c0_((1.0 - g.tsp_back_ratio) / 2.0),
          c1_((1.0 + g.tsp_back_ratio) / 2.0) {}

    int region_count() const override { return 6; }

    int region_at(double x, double y) const override {
        if (!in_raster(x, y)) return -1;
        if (x <= side_) return 0;
        const double nx = (x - side_) / side_;
        const double ny = y / side_;
        if (nx >= c0_ && nx <= c1_ && ny >= c0_ && ny <= c1_) return 1;
        if (nx <= c0_ && ny >= nx && ny <= 1.0 - nx) return 2;
        if (ny <= c0_ && nx >= ny && nx <= 1.0 - ny) return 3;
        if (nx >= c1_ && ny >= 1.0 - nx && ny <= nx) return 4;
        return 5;
    }

    Vec3 unproject_region(int region, double x, double y) const override {
        double u = 0.0, v = 0.0;
        int face = 1;
        if (region == 0) {
            u = 2.0 * x / side_ - 1.0;
            v = 2.0 * y / side_ - 1.0;
            face = 1;  // front
        } else {
            const double nx = (x - side_) / side_;
            const double ny = y / side_;
            switch (region) {
                case 1:
                    u = 2.0 * (nx - c0_) / r_ - 1.0;
                    v = 2.0 * (ny - c0_) / r_ - 1.0;
                    face = 4;  // back
                    break;
                case 2: {
                    const double s = nx / c0_;
                    const double t = (ny - nx) / (1.0 - 2.0 * nx);
                    u = 2.0 * s - 1.0;
                    v = 2.0 * t - 1.0;
                    face = 2;  // cube right (+Y)
                    break;
                }
                case 3: {
                    const double s = ny / c0_;
                    const double t = (nx - ny) / (1.0 - 2.0 * ny);
                    v = 2.0 * s - 1.0;
                    u = 1.0 - 2.0 * t;
                    face = 5;  // cube up (+Z)
                    break;
                }
                case 4: {
                    const double s = (1.0 - nx) / c0_;
                    const double t = (ny - (1.0 - nx)) / (2.0 * nx - 1.0);
                    u = 1.0 - 2.0 * s;
                    v = 2.0 * t - 1.0;
                    face = 0;  // cube left (-Y)
                    break;
                }
                default: {
                    const double s = (1.0 - ny) / c0_;
                    const double t = (nx - (1.0 - ny)) / (2.0 * ny - 1.0);
                    v = 1.0 - 2.0 * s;
                    u = 1.0 - 2.0 * t;
                    face = 3;  // cube down (-Z)
                    break;
                }
            }
        }
        const CubeFace& f = kCubeFaces[face];
        return normalized(f.axis + u * f.u_axis + v * f.v_axis);
    }

    GridPoint project(Vec3 d) const override {
        static constexpr int kFaceOf[6] = {1, 4, 2, 5, 0, 3};
        for (int region = 0; region < 6; ++region) {
            const CubeFace& f = kCubeFaces[kFaceOf[region]];
            const double t = dot(d, f.axis);
            if (t <= 0.0) continue;
            double u = dot(d, f.u_axis) / t;
            double v = dot(d, f.v_axis) / t;
            if (std::abs(u) > 1.0 + 1e-12 || std::abs(v) > 1.0 + 1e-12) continue;
            u = std::clamp(u, -1.0, 1.0);
            v = std::clamp(v, -1.0, 1.0);
            if (region == 0)
                return {(u + 1.0) / 2.0 * side_, (v + 1.0) / 2.0 * side_, 0};
            double nx = 0.0, ny = 0.0;
            switch (region) {
                case 1:
                    nx = c0_ + r_ * (u + 1.0) / 2.0;
                    ny = c0_ + r_ * (v + 1.0) / 2.0;
                    break;
                case 2: {
                    const double s = (u + 1.0) / 2.0, tt = (v + 1.0) / 2.0;
                    nx = s * c0_;
                    ny = nx + tt * (1.0 - 2.0 * nx);
                    break;
                }
                case 3: {
                    const double s = (v + 1.0) / 2.0, tt = (1.0 - u) / 2.0;
                    ny = s * c0_;
                    nx = ny + tt * (1.0 - 2.0 * ny);
                    break;
                }
                case 4: {
                    const double s = (1.0 - u) / 2.0, tt = (v + 1.0) / 2.0;
                    nx = 1.0 - s * c0_;
                    ny = (1.0 - nx) + tt * (2.0 * nx - 1.0);
                    break;
                }
                default: {
                    const double s = (1.0 - v) / 2.0, tt = (1.0 - u) / 2.0;
                    ny = 1.0 - s * c0_;
                    nx = (1.0 - ny) + tt * (2.0 * ny - 1.0);
                    break;
                }
            }
            return {side_ + nx * side_, ny * side_, region};
        }
        throw std::runtime_error("tsp project: no face accepted direction");
    }

private:
    double side_, r_, c0_, c1_;
};

// --- SSP ---------------------------------------------------------------

// Regions: 0 equatorial band, 1 north disk, 2 south disk. Disk azimuth is
// measured so lon 0 points toward the band (up for north, down for south).
class SspMapping final : public Mapping {
public:
    explicit SspMapping(const ProjectionGrid& g)
        : Mapping(g), cap_(g.ssp_cap_lat), square_(g.height / 2.0),
          band_w_(g.width - g.height / 2.0), radius_(g.height / 4.0) {
        cx_ = band_w_ + radius_;
        cy_north_ = radius_;
        cy_south_ = square_ + radius_;
    }

    int region_count() const override { return 3; }

    int region_at(double x, double y) const override {
        if (!in_raster(x, y)) return -1;
        if (x <= band_w_) return 0;
        const double dx = x - cx_;
        if (y <= square_) {
            const double dy = y - cy_north_;
            return dx * dx + dy * dy <= radius_ * radius_ * (1.0 + 1e-9) ? 1 : -1;
        }
        const double dy = y - cy_south_;
        return dx * dx + dy * dy <= radius_ * radius_ * (1.0 + 1e-9) ? 2 : -1;
    }

    Vec3 unproject_region(int region, double x, double y) const override {
        double lat = 0.0, lon = 0.0;
        if (region == 0) {
            lon = kTwoPi * (x / band_w_ - 0.5);
            lat = cap_ * (1.0 - 2.0 * y / grid_.height);
        } else {
            const double dx = x - cx_;
            const double dy = y - (region == 1 ? cy_north_ : cy_south_);
            const double rho = std::sqrt(dx * dx + dy * dy) / radius_;
            if (region == 1) {
                lat = kHalfPi - (kHalfPi - cap_) * rho;
                lon = (rho == 0.0) ? 0.0 : std::atan2(dx, -dy);
            } else {
                lat = -kHalfPi + (kHalfPi - cap_) * rho;
                lon = (rho == 0.0) ? 0.0 : std::atan2(dx, dy);
            }
        }
        const double cl = std::cos(lat);
        return {cl * std::cos(lon), cl * std::sin(lon), std::sin(lat)};
    }

    GridPoint project(Vec3 d) const override {
        const LatLon p = dir_to_latlon(d);
        if (std::abs(p.lat) <= cap_) {
            double x = band_w_ * (p.lon / kTwoPi + 0.5);
            if (x >= band_w_) x -= band_w_;
            const double y = 0.5 * grid_.height * (1.0 - p.lat / cap_);
            return {x, y, 0};
        }
        if (p.lat > cap_) {
            const double rho = (kHalfPi - p.lat) / (kHalfPi - cap_);
            return {cx_ + radius_ * rho * std::sin(p.lon),
                    cy_north_ - radius_ * rho * std::cos(p.lon), 1};
        }
        const double rho = (p.lat + kHalfPi) / (kHalfPi - cap_);
        return {cx_ + radius_ * rho * std::sin(p.lon),
                cy_south_ + radius_ * rho * std::cos(p.lon), 2};
    }

private:
    double cap_, square_, band_w_, radius_, cx_, cy_north_, cy_south_;
};

// --- ISP / OHP ---------------------------------------------------------

class TriMapping final : public Mapping {
public:
    explicit TriMapping(const ProjectionGrid& g) : Mapping(g) {
        if (g.format == ProjectionFormat::ohp)
            build_ohp();
        else
            build_isp();
    }

    int region_count() const override { return static_cast<int>(faces_.size()); }

    int region_at(double x, double y) const override {
        if (!in_raster(x, y)) return -1;
        for (size_t i = 0; i < faces_.size(); ++i) {
            const Face& f = faces_[i];
            if (x < f.bbx0 - 1e-9 || x > f.bbx1 + 1e-9 || y < f.bby0 - 1e-9 ||
                y > f.bby1 + 1e-9)
                continue;
            const double wx = x - f.p0.x, wy = y - f.p0.y;
            const double beta = f.ia * wx + f.ib * wy;
            const double gamma = f.ic * wx + f.id * wy;
            if (beta >= -1e-12 && gamma >= -1e-12 && 1.0 - beta - gamma >= -1e-12)
                return static_cast<int>(i);
        }
        return -1;
    }

    Vec3 unproject_region(int region, double x, double y) const override {
        const Face& f = faces_[region];
        const double wx = x - f.p0.x, wy = y - f.p0.y;
        const double beta = f.ia * wx + f.ib * wy;
        const double gamma = f.ic * wx + f.id * wy;
        const double alpha = 1.0 - beta - gamma;
        return normalized(alpha * f.v0 + beta * f.v1 + gamma * f.v2);
    }

    GridPoint project(Vec3 d) const override {
        for (size_t i = 0; i < faces_.size(); ++i) {
            const Face& f = faces_[i];
            const double nd = dot(f.plane_n, d);
            if (nd == 0.0) continue;
            const double t = f.plane_d / nd;
            if (t <= 0.0) continue;
            const Vec3 q = t * d;
            const Vec3 w = q - f.v0;
            const double beta = dot(cross(w, f.edge2), f.plane_n) / f.nn;
            const double gamma = dot(cross(f.edge1, w), f.plane_n) / f.nn;
            const double alpha = 1.0 - beta - gamma;
            if (beta < -1e-12 || gamma < -1e-12 || alpha < -1e-12) continue;
            return {alpha * f.p0.x + beta * f.p1.x + gamma * f.p2.x,
                    alpha * f.p0.y + beta * f.p1.y + gamma * f.p2.y,
                    static_cast<int>(i)};
        }
        throw std::runtime_error("triangle project: no face accepted direction");
    }

private:
    struct Face {
        Vec3 v0, v1, v2;
        Vec2 p0, p1, p2;
        Vec3 edge1, edge2, plane_n;
        double plane_d = 0.0, nn = 0.0;
        double ia = 0.0, ib = 0.0, ic = 0.0, id = 0.0;
        double bbx0 = 0.0, bbx1 = 0.0, bby0 = 0.0, bby1 = 0.0;
    };

    void add_face(Vec3 v0, Vec3 v1, Vec3 v2, Vec2 p0, Vec2 p1, Vec2 p2) {
        Face f;
        f.v0 = v0;
        f.v1 = v1;
        f.v2 = v2;
        f.p0 = p0;
        f.p1 = p1;
        f.p2 = p2;
        f.edge1 = v1 - v0;
        f.edge2 = v2 - v0;
        f.plane_n = cross(f.edge1, f.edge2);
        f.plane_d = dot(f.plane_n, f.v0);
        f.nn = dot(f.plane_n, f.plane_n);
        const double ax = p1.x - p0.x, ay = p1.y - p0.y;
        const double bx = p2.x - p0.x, by = p2.y - p0.y;
        const double det = ax * by - ay * bx;
        f.ia = by / det;
        f.ib = -bx / det;
        f.ic = -ay / det;
        f.id = ax / det;
        f.bbx0 = std::min({p0.x, p1.x, p2.x});
        f.bbx1 = std::max({p0.x, p1.x, p2.x});
        f.bby0 = std::min({p0.y, p1.y, p2.y});
        f.bby1 = std::max({p0.y, p1.y, p2.y});
        faces_.push_back(f);
    }

    void build_ohp() {
        const double b = grid_.tri_base, h = grid_.tri_height;
        const Vec3 north{0, 0, 1}, south{0, 0, -1};
        std::array<Vec3, 4> eq;
        for (int k = 0; k < 4; ++k) {
            const double lon = -kPi + k * kHalfPi;
            eq[k] = {std::cos(lon), std::sin(lon), 0.0};
        }
        for (int k = 0; k < 4; ++k)
            add_face(north, eq[k], eq[(k + 1) % 4], {k * b + b / 2, 0}, {k * b, h},
                     {(k + 1) * b, h});
        for (int k = 0; k < 4; ++k)
            add_face(south, eq[k], eq[(k + 1) % 4], {k * b + b / 2, 2 * h}, {k * b, h},
                     {(k + 1) * b, h});
    }

    void build_isp() {
        const double b = grid_.tri_base, h = grid_.tri_height;
        const double ring_lat = std::atan(0.5);
        const Vec3 north{0, 0, 1}, south{0, 0, -1};
        std::array<Vec3, 5> up, lo;
        for (int k = 0; k < 5; ++k) {
            const double lon_u = -kPi + k * (kTwoPi / 5.0);
            const double lon_l = lon_u + kPi / 5.0;
            up[k] = {std::cos(ring_lat) * std::cos(lon_u),
                     std::cos(ring_lat) * std::sin(lon_u), std::sin(ring_lat)};
            lo[k] = {std::cos(ring_lat) * std::cos(lon_l),
                     std::cos(ring_lat) * std::sin(lon_l), -std::sin(ring_lat)};
        }
        for (int k = 0; k < 5; ++k)  // north caps
            add_face(north, up[k], up[(k + 1) % 5], {(k + 0.5) * b, 0}, {k * b, h},
                     {(k + 1) * b, h});
        for (int k = 0; k < 5; ++k)  // middle, apex down
            add_face(up[k], up[(k + 1) % 5], lo[k], {k * b, h}, {(k + 1) * b, h},
                     {(k + 0.5) * b, 2 * h});
        for (int k = 0; k < 5; ++k)  // middle, apex up
            add_face(lo[k], lo[(k + 1) % 5], up[(k + 1) % 5], {(k + 0.5) * b, 2 * h},
                     {(k + 1.5) * b, 2 * h}, {(k + 1) * b, h});
        for (int k = 0; k < 5; ++k)  // south caps
            add_face(south, lo[k], lo[(k + 1) % 5], {(k + 1) * b, 3 * h},
                     {(k + 0.5) * b, 2 * h}, {(k + 1.5) * b, 2 * h});
    }

    std::vector<Face> faces_;
};

// --- factory and free-function surface --------------------------------------

inline std::unique_ptr<const Mapping> make_mapping(const ProjectionGrid& g) {
    validate_grid(g);
    switch (g.format) {
        case ProjectionFormat::erp: return std::make_unique<ErpMapping>(g);
        case ProjectionFormat::cmp: return std::make_unique<CubeMapping>(g, false);
        case ProjectionFormat::eac: return std::make_unique<CubeMapping>(g, true);
        case ProjectionFormat::tsp: return std::make_unique<TspMapping>(g);
        case ProjectionFormat::ssp: return std::make_unique<SspMapping>(g);
        case ProjectionFormat::isp:
        case ProjectionFormat::ohp: return std::make_unique<TriMapping>(g);
    }
    throw std::invalid_argument("make_mapping: bad format");
}

/// Sphere direction under a raster point, or nullopt on inactive pixels.
/// Points outside the raster are rejected.
inline std::optional<Vec3> unproject(const Mapping& m, Vec2 p) {
    if (!m.in_raster(p.x, p.y))
        throw std::out_of_range("unproject: point outside raster");
    const int r = m.region_at(p.x, p.y);
    if (r < 0) return std::nullopt;
    return m.unproject_region(r, p.x, p.y);
}

inline std::optional<Vec3> unproject(const ProjectionGrid& g, Vec2 p) {
    return unproject(*make_mapping(g), p);
}

inline GridPoint project(const ProjectionGrid& g, Vec3 d) {
    return make_mapping(g)->project(normalized(d));
}

inline ActiveMask active_mask(const Mapping& m) {
    const int w = m.grid().width, h = m.grid().height;
    ActiveMask mask = ActiveMask::zeros(w, h);
    bool all = true;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const bool on = m.region_at(x + 0.5, y + 0.5) >= 0;
            mask.set(x, y, on);
            all = all && on;
        }
    if (all) return ActiveMask::full(w, h);
    return mask;
}

inline ActiveMask active_mask(const ProjectionGrid& g) { return active_mask(*make_mapping(g)); }

inline long count_active(const ProjectionGrid& g) { return active_mask(g).count(); }

/// Smallest-error grid for a format whose active pixel count approximates
/// the budget. Deterministic; all raster dimensions are even.
inline ProjectionGrid default_grid(ProjectionFormat f, long budget) {
    if (budget < 128) throw std::invalid_argument("default_grid: budget must be >= 128");
    auto pick = [budget](const std::vector<ProjectionGrid>& cands) {
        ProjectionGrid best = cands.front();
        long best_err = -1;
        for (const ProjectionGrid& g : cands) {
            const long err = std::abs(count_active(g) - budget);
            if (best_err < 0 || err < best_err) {
                best = g;
                best_err = err;
            }
        }
        return best;
    };
    switch (f) {
        case ProjectionFormat::erp: {
            return erp_grid(detail::even_round(std::sqrt(budget / 2.0)));
        }
        case ProjectionFormat::cmp:
        case ProjectionFormat::eac: {
            const int f0 = detail::even_round(std::sqrt(budget / 6.0));
            std::vector<ProjectionGrid> c;
            for (int d = -2; d <= 2; d += 2)
                if (f0 + d >= 2) c.push_back(cube_grid(f, f0 + d));
            return pick(c);
        }
        case ProjectionFormat::tsp: {
            return tsp_grid(detail::even_round(std::sqrt(budget / 2.0)));
        }
        case ProjectionFormat::ssp: {
            const int h0 = detail::even_round(std::sqrt(budget / (1.5 + kPi / 8.0)));
            std::vector<ProjectionGrid> c;
            for (int d = -4; d <= 4; d += 2)
                if (h0 + d >= 4) c.push_back(ssp_grid(h0 + d));
            return pick(c);
        }
        case ProjectionFormat::ohp:
        case ProjectionFormat::isp: {
            const double per = f == ProjectionFormat::ohp ? 4.0 * detail::kTriAspect
                                                          : 10.0 * detail::kTriAspect;
            const int b0 = std::max(2, static_cast<int>(std::lround(std::sqrt(budget / per))));
            std::vector<ProjectionGrid> c;
            for (int d = -2; d <= 2; ++d)
                if (b0 + d >= 2) c.push_back(tri_grid(f, b0 + d));
            return pick(c);
        }
    }
    throw std::invalid_argument("default_grid: bad format");
}

/// Same layout scaled by an integer factor; triangle geometry and region
/// boundaries scale exactly with the raster.
inline ProjectionGrid scale_grid(const ProjectionGrid& g, int f) {
    if (f < 1) throw std::invalid_argument("scale_grid: factor must be >= 1");
    ProjectionGrid s = g;
    s.width *= f;
    s.height *= f;
    s.tri_base *= f;
    s.tri_height *= f;
    validate_grid(s);
    return s;
}

/// Reconstruct a grid from raster dimensions. For isp/ohp only rasters laid
/// out by tri_grid (or scaled versions with intact padding) are accepted.
inline ProjectionGrid grid_from_dims(ProjectionFormat f, int w, int h) {
    switch (f) {
        case ProjectionFormat::erp:
        case ProjectionFormat::tsp:
        case ProjectionFormat::ssp: {
            ProjectionGrid g;
            g.format = f;
            g.width = w;
            g.height = h;
            validate_grid(g);
            return g;
        }
        case ProjectionFormat::cmp:
        case ProjectionFormat::eac: {
            ProjectionGrid g;
            g.format = f;
            g.width = w;
            g.height = h;
            validate_grid(g);
            return g;
        }
        case ProjectionFormat::isp:
        case ProjectionFormat::ohp: {
            const double per = f == ProjectionFormat::isp ? 5.5 : 4.0;
            const int b0 = static_cast<int>(std::lround(w / per));
            for (int d = -2; d <= 2; ++d) {
                const int b = b0 + d;
                if (b < 2) continue;
                const ProjectionGrid g = tri_grid(f, b);
                if (g.width == w && g.height == h) return g;
            }
            throw std::invalid_argument(
                "grid_from_dims: raster does not match any budget-derived " +
                to_string(f) + " layout");
        }
    }
    throw std::invalid_argument("grid_from_dims: bad format");
}

}  // namespace omniproj
