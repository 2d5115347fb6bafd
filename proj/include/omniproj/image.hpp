#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace omniproj {

enum class ColorModel { gray, rgb, yuv };

inline std::string to_string(ColorModel c) {
    switch (c) {
        case ColorModel::gray: return "gray";
        case ColorModel::rgb: return "rgb";
        case ColorModel::yuv: return "yuv";
    }
    return "?";
}

/// Per-pixel validity raster. An empty mask means "all pixels active".
struct ActiveMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> on;

    bool empty() const { return on.empty(); }

    bool at(int x, int y) const {
        if (on.empty()) return true;
        return on[static_cast<size_t>(y) * width + x] != 0;
    }

    void set(int x, int y, bool v) { on[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }

    long count() const {
        if (on.empty()) return static_cast<long>(width) * height;
        long n = 0;
        for (uint8_t v : on) n += v ? 1 : 0;
        return n;
    }

    static ActiveMask full(int w, int h) { return {w, h, {}}; }

    static ActiveMask zeros(int w, int h) {
        ActiveMask m{w, h, {}};
        m.on.assign(static_cast<size_t>(w) * h, 0);
        return m;
    }
};

// Value written into pixels outside the active area (the "gray" default).
inline constexpr float kInactiveFill = 128.0f / 255.0f;

/// Planar raster image, samples normalized to [0,1]. Channel planes are laid
/// out back to back; an empty mask means every pixel carries content.
struct PlanarImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    ColorModel color = ColorModel::gray;
    std::vector<float> samples;
    ActiveMask mask;

    static PlanarImage make(int w, int h, int c, float fill = 0.0f,
                            ColorModel cm = ColorModel::gray) {
        if (w < 1 || h < 1 || (c != 1 && c != 3))
            throw std::invalid_argument("PlanarImage::make: bad dimensions");
        PlanarImage img;
        img.width = w;
        img.height = h;
        img.channels = c;
        img.color = cm;
        img.samples.assign(static_cast<size_t>(w) * h * c, fill);
        return img;
    }

    size_t plane_size() const { return static_cast<size_t>(width) * height; }

    float at(int x, int y, int c = 0) const {
        return samples[c * plane_size() + static_cast<size_t>(y) * width + x];
    }

    float& at(int x, int y, int c = 0) {
        return samples[c * plane_size() + static_cast<size_t>(y) * width + x];
    }

    bool active(int x, int y) const { return mask.empty() || mask.at(x, y); }

    long active_count() const {
        return mask.empty() ? static_cast<long>(width) * height : mask.count();
    }

    /// Single-channel view copy of one plane (mask carried over).
    PlanarImage plane(int c) const {
        PlanarImage p = make(width, height, 1, 0.0f, ColorModel::gray);
        std::copy(samples.begin() + c * plane_size(),
                  samples.begin() + (c + 1) * plane_size(), p.samples.begin());
        p.mask = mask;
        return p;
    }

    bool same_shape(const PlanarImage& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

/// 8-bit quantization, round half away from zero (values are nonnegative).
inline uint8_t quantize8(float v) {
    const double s = std::floor(static_cast<double>(v) * 255.0 + 0.5);
    return static_cast<uint8_t>(std::clamp(s, 0.0, 255.0));
}

inline float dequantize8(uint8_t b) { return static_cast<float>(b) / 255.0f; }

/// Snap every sample onto the 8-bit grid (k/255). Inactive pixels get the
/// gray fill. Used at pipeline stage boundaries so dumped intermediates and
/// in-memory values agree byte for byte.
inline PlanarImage snap8(const PlanarImage& img) {
    PlanarImage out = img;
    for (int c = 0; c < out.channels; ++c)
        for (int y = 0; y < out.height; ++y)
            for (int x = 0; x < out.width; ++x)
                out.at(x, y, c) = out.active(x, y) ? dequantize8(quantize8(out.at(x, y, c)))
                                                   : kInactiveFill;
    return out;
}

}  // namespace omniproj
