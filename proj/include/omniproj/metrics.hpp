#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "omniproj/detail/parallel.hpp"
#include "omniproj/image.hpp"
#include "omniproj/projection.hpp"

namespace omniproj {

/// Per-pixel nonnegative weights over a grid; zero marks inactive pixels.
struct WeightMap {
    int width = 0;
    int height = 0;
    std::vector<double> w;

    static WeightMap zeros(int width, int height) {
        return {width, height, std::vector<double>(static_cast<size_t>(width) * height, 0.0)};
    }

    double at(int x, int y) const { return w[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return w[static_cast<size_t>(y) * width + x]; }

    double sum() const {
        double s = 0.0;
        for (double v : w) s += v;
        return s;
    }
};

struct MetricResult {
    std::string metric;
    double value = 0.0;
    std::string channel = "y";
};

inline bool is_inf(double v) { return std::isinf(v); }

// --- PSNR --------------------------------------------------------------

/// 10*log10(peak^2 / MSE) over the active-set intersection. Identical
/// images return +inf.
inline MetricResult psnr(const PlanarImage& a, const PlanarImage& b, double peak = 1.0) {
    if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
    double acc = 0.0;
    long n = 0;
    for (int c = 0; c < a.channels; ++c)
        for (int y = 0; y < a.height; ++y)
            for (int x = 0; x < a.width; ++x) {
                if (!a.active(x, y) || !b.active(x, y)) continue;
                const double d = static_cast<double>(a.at(x, y, c)) - b.at(x, y, c);
                acc += d * d;
                ++n;
            }
    if (n == 0) throw std::invalid_argument("psnr: empty active intersection");
    const double mse = acc / n;
    MetricResult r{"psnr", 0.0, a.channels == 1 ? "y" : "mean"};
    r.value = mse == 0.0 ? std::numeric_limits<double>::infinity()
                         : 10.0 * std::log10(peak * peak / mse);
    return r;
}

// --- WS-PSNR weights ---------------------------------------------------

/// Analytic ERP row weights: w(i,j) = cos((j + 0.5 - H/2) * pi / H).
inline WeightMap erp_weights(const ProjectionGrid& grid) {
    if (grid.format != ProjectionFormat::erp)
        throw std::invalid_argument("erp_weights: grid is not ERP");
    validate_grid(grid);
    WeightMap m = WeightMap::zeros(grid.width, grid.height);
    for (int y = 0; y < grid.height; ++y) {
        const double w = std::cos((y + 0.5 - grid.height / 2.0) * kPi / grid.height);
        for (int x = 0; x < grid.width; ++x) m.at(x, y) = w;
    }
    return m;
}

namespace detail {

/// Solid angle of the spherical triangle (a,b,c) via van Oosterom-Strackee.
inline double tri_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double num = std::abs(dot(a, cross(b, c)));
    const double den = 1.0 + dot(a, b) + dot(b, c) + dot(a, c);
    return 2.0 * std::atan2(num, den);
}

inline double quad_solid_angle(const Vec3& c00, const Vec3& c10, const Vec3& c11,
                               const Vec3& c01) {
    return tri_solid_angle(c00, c10, c11) + tri_solid_angle(c00, c11, c01);
}

/// Solid angle covered by the raster cell [x0,x1]x[y0,y1]. Cells whose five
/// probes agree on a region integrate in one shot; cells straddling a seam
/// or the active boundary subdivide 2x2 down to the depth limit, where the
/// center region decides.
inline double cell_solid_angle(const Mapping& m, double x0, double y0, double x1, double y1,
                               int depth) {
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const int rc = m.region_at(cx, cy);
    const int r00 = m.region_at(x0, y0), r10 = m.region_at(x1, y0);
    const int r11 = m.region_at(x1, y1), r01 = m.region_at(x0, y1);
    const bool uniform = rc == r00 && rc == r10 && rc == r11 && rc == r01;
    if (uniform && rc < 0) return 0.0;
    if ((uniform || depth == 0) && rc >= 0)
        return quad_solid_angle(m.unproject_region(rc, x0, y0), m.unproject_region(rc, x1, y0),
                                m.unproject_region(rc, x1, y1), m.unproject_region(rc, x0, y1));
    if (depth == 0) return 0.0;
    return cell_solid_angle(m, x0, y0, cx, cy, depth - 1) +
           cell_solid_angle(m, cx, y0, x1, cy, depth - 1) +
           cell_solid_angle(m, x0, cy, cx, y1, depth - 1) +
           cell_solid_angle(m, cx, cy, x1, y1, depth - 1);
}

}  // namespace detail

/// Per-pixel solid angles (steradians). Boundary slivers that land on
/// inactive pixels are credited to the nearest active neighbor so the map
/// conserves total sphere area while staying zero on inactive pixels.
inline WeightMap solid_angle_weights(const Mapping& m, int jobs = 0) {
    const int W = m.grid().width, H = m.grid().height;
    constexpr int kDepth = 8;
    WeightMap wm = WeightMap::zeros(W, H);
    std::vector<uint8_t> active(static_cast<size_t>(W) * H, 0);
    detail::parallel_for(H, jobs, [&](long y) {
        for (int x = 0; x < W; ++x) {
            wm.at(x, static_cast<int>(y)) =
                detail::cell_solid_angle(m, x, y, x + 1.0, y + 1.0, kDepth);
            active[y * W + x] = m.region_at(x + 0.5, y + 0.5) >= 0 ? 1 : 0;
        }
    });
    // Donate inactive-pixel slivers to the nearest active pixel (fixed scan
    // order keeps the result deterministic).
    static constexpr std::array<std::array<int, 2>, 24> kRing = {{
        {0, -1}, {-1, 0}, {1, 0},  {0, 1},  {-1, -1}, {1, -1}, {-1, 1}, {1, 1},
        {0, -2}, {-2, 0}, {2, 0},  {0, 2},  {-1, -2}, {1, -2}, {-2, -1}, {2, -1},
        {-2, 1}, {2, 1},  {-1, 2}, {1, 2},  {-2, -2}, {2, -2}, {-2, 2}, {2, 2},
    }};
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (active[static_cast<size_t>(y) * W + x]) continue;
            const double omega = wm.at(x, y);
            wm.at(x, y) = 0.0;
            if (omega <= 0.0) continue;
            for (const auto& d : kRing) {
                const int nx = x + d[0], ny = y + d[1];
                if (nx < 0 || nx >= W || ny < 0 || ny >= H) continue;
                if (!active[static_cast<size_t>(ny) * W + nx]) continue;
                wm.at(nx, ny) += omega;
                break;
            }
        }
    return wm;
}

inline WeightMap solid_angle_weights(const ProjectionGrid& grid, int jobs = 0) {
    return solid_angle_weights(*make_mapping(grid), jobs);
}

// --- WS-PSNR -----------------------------------------------------------

/// Weighted PSNR: WS-MSE = sum(w * (a-b)^2) / sum(w) over active pixels.
inline MetricResult ws_psnr(const PlanarImage& a, const PlanarImage& b, const WeightMap& w,
                            double peak = 1.0) {
    if (!a.same_shape(b)) throw std::invalid_argument("ws_psnr: shape mismatch");
    if (a.width != w.width || a.height != w.height)
        throw std::invalid_argument("ws_psnr: weight map does not match images");
    double acc = 0.0, wsum = 0.0;
    for (int c = 0; c < a.channels; ++c)
        for (int y = 0; y < a.height; ++y)
            for (int x = 0; x < a.width; ++x) {
                if (!a.active(x, y) || !b.active(x, y)) continue;
                const double weight = w.at(x, y);
                const double d = static_cast<double>(a.at(x, y, c)) - b.at(x, y, c);
                acc += weight * d * d;
                wsum += weight;
            }
    if (wsum <= 0.0) throw std::invalid_argument("ws_psnr: weights sum to zero");
    const double mse = acc / wsum;
    MetricResult r{"ws-psnr", 0.0, a.channels == 1 ? "y" : "mean"};
    r.value = mse == 0.0 ? std::numeric_limits<double>::infinity()
                         : 10.0 * std::log10(peak * peak / mse);
    return r;
}

// --- SSIM --------------------------------------------------------------

/// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03.
/// Only windows fully inside the raster and fully active count.
inline MetricResult ssim(const PlanarImage& a, const PlanarImage& b, double peak = 1.0) {
    if (!a.same_shape(b)) throw std::invalid_argument("ssim: shape mismatch");
    if (a.channels != 1) throw std::invalid_argument("ssim: single-channel input required");
    constexpr int kWin = 11, kR = kWin / 2;
    if (a.width < kWin || a.height < kWin)
        throw std::invalid_argument("ssim: image smaller than window");

    std::array<double, kWin> g{};
    double gs = 0.0;
    for (int i = 0; i < kWin; ++i) {
        const double t = i - kR;
        g[i] = std::exp(-t * t / (2.0 * 1.5 * 1.5));
        gs += g[i];
    }
    for (double& v : g) v /= gs;

    const int W = a.width, H = a.height;
    const auto idx = [W](int x, int y) { return static_cast<size_t>(y) * W + x; };

    // Horizontal pass over the five moment planes plus the validity plane.
    std::vector<double> ha(idx(0, H)), hb(ha), haa(ha), hbb(ha), hab(ha);
    std::vector<uint8_t> hvalid(ha.size(), 0);
    for (int y = 0; y < H; ++y)
        for (int x = kR; x < W - kR; ++x) {
            double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
            bool ok = true;
            for (int i = -kR; i <= kR; ++i) {
                const double va = a.at(x + i, y), vb = b.at(x + i, y);
                const double w = g[i + kR];
                sa += w * va;
                sb += w * vb;
                saa += w * va * va;
                sbb += w * vb * vb;
                sab += w * va * vb;
                ok = ok && a.active(x + i, y) && b.active(x + i, y);
            }
            ha[idx(x, y)] = sa;
            hb[idx(x, y)] = sb;
            haa[idx(x, y)] = saa;
            hbb[idx(x, y)] = sbb;
            hab[idx(x, y)] = sab;
            hvalid[idx(x, y)] = ok ? 1 : 0;
        }

    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    double total = 0.0;
    long n = 0;
    for (int y = kR; y < H - kR; ++y)
        for (int x = kR; x < W - kR; ++x) {
            double mu_a = 0, mu_b = 0, raw_aa = 0, raw_bb = 0, raw_ab = 0;
            bool ok = true;
            for (int j = -kR; j <= kR; ++j) {
                const double w = g[j + kR];
                mu_a += w * ha[idx(x, y + j)];
                mu_b += w * hb[idx(x, y + j)];
                raw_aa += w * haa[idx(x, y + j)];
                raw_bb += w * hbb[idx(x, y + j)];
                raw_ab += w * hab[idx(x, y + j)];
                ok = ok && hvalid[idx(x, y + j)];
            }
            if (!ok) continue;
            const double var_a = raw_aa - mu_a * mu_a;
            const double var_b = raw_bb - mu_b * mu_b;
            const double cov = raw_ab - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
            ++n;
        }
    if (n == 0) throw std::invalid_argument("ssim: no fully active windows");
    return {"ssim", total / n, "y"};
}

// --- channel handling --------------------------------------------------

/// Luma plane: YUV images pass their first plane through unchanged, RGB
/// uses BT.709 full-range luma. Single-channel images pass through.
inline PlanarImage y_channel(const PlanarImage& img) {
    if (img.channels == 1) return img;
    if (img.color == ColorModel::yuv) return img.plane(0);
    if (img.color != ColorModel::rgb)
        throw std::invalid_argument("y_channel: unknown color model for 3-channel image");
    PlanarImage y = PlanarImage::make(img.width, img.height, 1, 0.0f, ColorModel::gray);
    y.mask = img.mask;
    for (int yy = 0; yy < img.height; ++yy)
        for (int x = 0; x < img.width; ++x)
            y.at(x, yy) = static_cast<float>(0.2126 * img.at(x, yy, 0) +
                                             0.7152 * img.at(x, yy, 1) +
                                             0.0722 * img.at(x, yy, 2));
    return y;
}

}  // namespace omniproj
