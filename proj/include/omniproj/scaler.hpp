#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "omniproj/detail/process.hpp"
#include "omniproj/image.hpp"
#include "omniproj/io.hpp"
#include "omniproj/resample.hpp"

// Raster-space scaling. Alignment convention: output pixel center (i+0.5)
// maps to input coordinate (i+0.5)/f when upscaling and (i+0.5)*f when
// downscaling; downscale footprints are stretched by f (anti-aliased).
// Edges reflect. Factor 1 is an exact pass-through (identity test mode).

namespace omniproj {

inline int validate_scale(int f) {
    if (f != 1 && f != 2 && f != 3 && f != 4)
        throw std::invalid_argument("scale factor must be one of 1 (test mode), 2, 3, 4");
    return f;
}

enum class WireFormat { png, y4m };

inline std::string to_string(WireFormat w) { return w == WireFormat::png ? "png" : "y4m"; }

inline WireFormat parse_wire(const std::string& s) {
    if (s == "png") return WireFormat::png;
    if (s == "y4m") return WireFormat::y4m;
    throw std::invalid_argument("unknown wire format: " + s);
}

/// The upscaling stage: a builtin interpolation kernel or an external
/// command. External templates must contain {in}, {out} and {scale}.
struct Upscaler {
    enum class Kind { builtin, external };
    Kind kind = Kind::builtin;
    InterpKernel kernel = InterpKernel::bicubic;
    std::string command;
    WireFormat wire = WireFormat::png;
    double timeout_sec = 300.0;
};

inline std::string to_string(const Upscaler& u) {
    if (u.kind == Upscaler::Kind::builtin) return "builtin:" + to_string(u.kernel);
    return "external:" + u.command;
}

/// Parses "builtin:<kernel>" or "external:<command template>".
inline Upscaler parse_upscaler(const std::string& s) {
    Upscaler u;
    if (s.rfind("builtin:", 0) == 0) {
        u.kind = Upscaler::Kind::builtin;
        u.kernel = parse_kernel(s.substr(8));
        return u;
    }
    if (s.rfind("external:", 0) == 0) {
        u.kind = Upscaler::Kind::external;
        u.command = s.substr(9);
        for (const char* ph : {"{in}", "{out}", "{scale}"})
            if (u.command.find(ph) == std::string::npos)
                throw std::invalid_argument(std::string("external upscaler command lacks ") + ph);
        return u;
    }
    throw std::invalid_argument("upscaler must be builtin:<kernel> or external:<command>");
}

namespace detail {

inline int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -1 - i;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

/// Separable 1-D resample of one image axis. dst_len/src_len defines the
/// scale; footprint stretches when minifying.
inline PlanarImage resample_axis_1d(const PlanarImage& src, int dst_len, bool horizontal,
                                    InterpKernel k) {
    const int src_len = horizontal ? src.width : src.height;
    const double step = static_cast<double>(src_len) / dst_len;
    const bool minify = step > 1.0;
    const double scale = minify ? step : 1.0;
    const double support = kernel_support(k) * scale;

    const int out_w = horizontal ? dst_len : src.width;
    const int out_h = horizontal ? src.height : dst_len;
    PlanarImage dst = PlanarImage::make(out_w, out_h, src.channels, 0.0f, src.color);

    std::vector<int> tap_idx;
    std::vector<double> tap_w;
    for (int o = 0; o < dst_len; ++o) {
        const double center = (o + 0.5) * step - 0.5;  // in source index space
        const int lo = static_cast<int>(std::ceil(center - support - 1e-9));
        const int hi = static_cast<int>(std::floor(center + support + 1e-9));
        tap_idx.clear();
        tap_w.clear();
        double wsum = 0.0;
        for (int i = lo; i <= hi; ++i) {
            const double w = kernel_weight(k, (i - center) / scale);
            if (w == 0.0) continue;
            tap_idx.push_back(reflect_index(i, src_len));
            tap_w.push_back(w);
            wsum += w;
        }
        if (tap_idx.empty()) {
            tap_idx.push_back(reflect_index(static_cast<int>(std::lround(center)), src_len));
            tap_w.push_back(1.0);
            wsum = 1.0;
        }
        const int lanes = horizontal ? src.height : src.width;
        for (int lane = 0; lane < lanes; ++lane)
            for (int c = 0; c < src.channels; ++c) {
                const float ref = horizontal ? src.at(tap_idx[0], lane, c)
                                             : src.at(lane, tap_idx[0], c);
                double acc = 0.0;
                for (size_t t = 0; t < tap_idx.size(); ++t) {
                    const float v = horizontal ? src.at(tap_idx[t], lane, c)
                                               : src.at(lane, tap_idx[t], c);
                    acc += tap_w[t] * (v - ref);
                }
                double out = ref + acc / wsum;
                if (k == InterpKernel::bicubic || k == InterpKernel::lanczos3)
                    out = clamp01(out);
                if (horizontal)
                    dst.at(o, lane, c) = static_cast<float>(out);
                else
                    dst.at(lane, o, c) = static_cast<float>(out);
            }
    }
    return dst;
}

}  // namespace detail

/// Anti-aliased downscale by an integer factor. Non-divisible extents are
/// handled by the reflecting edge policy (output spans ceil(len/f)).
inline PlanarImage downscale(const PlanarImage& img, int f,
                             InterpKernel k = InterpKernel::bicubic) {
    validate_scale(f);
    if (f == 1) return img;
    const int ow = (img.width + f - 1) / f;
    const int oh = (img.height + f - 1) / f;
    PlanarImage tmp = detail::resample_axis_1d(img, ow, true, k);
    PlanarImage out = detail::resample_axis_1d(tmp, oh, false, k);
    out.mask = {};
    return out;
}

/// Builtin upscale by an integer factor (dims multiply exactly).
inline PlanarImage upscale_builtin(const PlanarImage& img, int f,
                                   InterpKernel k = InterpKernel::bicubic) {
    validate_scale(f);
    if (f == 1) return img;
    PlanarImage tmp = detail::resample_axis_1d(img, img.width * f, true, k);
    PlanarImage out = detail::resample_axis_1d(tmp, img.height * f, false, k);
    out.mask = {};
    return out;
}

namespace detail {

inline std::string substitute(std::string tpl, const std::string& key, const std::string& val) {
    size_t pos;
    while ((pos = tpl.find(key)) != std::string::npos) tpl.replace(pos, key.size(), val);
    return tpl;
}

inline std::filesystem::path fresh_work_dir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    const auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto dir = base / ("omniproj-" + std::to_string(::getpid()) + "-" +
                           std::to_string(counter.fetch_add(1)) + "-" + std::to_string(rd() & 0xffff));
        std::error_code ec;
        if (std::filesystem::create_directories(dir, ec)) return dir;
    }
    throw IoError("cannot create work directory under " + base.string());
}

}  // namespace detail

/// Runs an external upscaler over the wire format, validates the result
/// dimensions and returns the upscaled image. Process output is appended
/// to *log when given.
inline PlanarImage upscale_external(const PlanarImage& img, int f, const Upscaler& up,
                                    std::string* log = nullptr) {
    validate_scale(f);
    const auto dir = detail::fresh_work_dir();
    const std::string ext = up.wire == WireFormat::png ? ".png" : ".y4m";
    const std::string in_path = (dir / ("in" + ext)).string();
    const std::string out_path = (dir / ("out" + ext)).string();
    write_image(img, in_path);

    std::string cmd = detail::substitute(up.command, "{in}", in_path);
    cmd = detail::substitute(cmd, "{out}", out_path);
    cmd = detail::substitute(cmd, "{scale}", std::to_string(f));

    const detail::ProcessResult pr = detail::run_process(cmd, up.timeout_sec);
    if (log && !pr.output.empty()) *log += pr.output;
    auto cleanup = [&] {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    };
    if (pr.timed_out) {
        cleanup();
        throw std::runtime_error("external upscaler timed out after " +
                                 std::to_string(up.timeout_sec) + " s");
    }
    if (pr.exit_code != 0) {
        cleanup();
        throw std::runtime_error("external upscaler exited with code " +
                                 std::to_string(pr.exit_code));
    }
    if (!std::filesystem::exists(out_path)) {
        cleanup();
        throw std::runtime_error("external upscaler wrote no output file");
    }
    PlanarImage out = read_image(out_path).first;
    cleanup();
    if (out.width != img.width * f || out.height != img.height * f)
        throw std::runtime_error("external upscaler returned " + std::to_string(out.width) + "x" +
                                 std::to_string(out.height) + ", expected " +
                                 std::to_string(img.width * f) + "x" +
                                 std::to_string(img.height * f));
    if (out.channels != img.channels)
        throw std::runtime_error("external upscaler changed channel count");
    return out;
}

/// Upscale dispatch over the configured variant.
inline PlanarImage upscale(const PlanarImage& img, int f, const Upscaler& up,
                           std::string* log = nullptr) {
    if (up.kind == Upscaler::Kind::builtin) return upscale_builtin(img, f, up.kernel);
    return upscale_external(img, f, up, log);
}

}  // namespace omniproj
