#pragma once

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

#include "omniproj/config.hpp"
#include "omniproj/image.hpp"

// Image and raw-frame I/O:
//   .png           8-bit gray or RGB (libpng)
//   .y4m           YUV4MPEG2, C420, first frame only
//   .yuv           headerless planar 4:2:0 with a "<path>.spec" sidecar
// 4:2:0 chroma is co-sited with the top-left luma sample; reading upsamples
// to 4:4:4 by co-sited bilinear and writing picks the even-position samples,
// so file -> image -> file round-trips are byte-identical.

namespace omniproj {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PixelFormat { gray8, rgb24, yuv420_8 };

inline std::string to_string(PixelFormat p) {
    switch (p) {
        case PixelFormat::gray8: return "gray8";
        case PixelFormat::rgb24: return "rgb24";
        case PixelFormat::yuv420_8: return "yuv420-8";
    }
    return "?";
}

struct FrameSpec {
    int width = 0;
    int height = 0;
    PixelFormat pix = PixelFormat::gray8;
    ColorModel color = ColorModel::gray;
};

/// Natural frame spec for an image (gray8 / rgb24 / yuv420-8 by channels
/// and color model).
inline FrameSpec default_spec(const PlanarImage& img) {
    FrameSpec s;
    s.width = img.width;
    s.height = img.height;
    if (img.channels == 1) {
        s.pix = PixelFormat::gray8;
        s.color = ColorModel::gray;
    } else if (img.color == ColorModel::yuv) {
        s.pix = PixelFormat::yuv420_8;
        s.color = ColorModel::yuv;
    } else {
        s.pix = PixelFormat::rgb24;
        s.color = ColorModel::rgb;
    }
    return s;
}

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline PlanarImage read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int ch = static_cast<int>(png_get_channels(png, info));
    if (ch != 1 && ch != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": unsupported channel count " + std::to_string(ch));
    }
    std::vector<uint8_t> row(static_cast<size_t>(w) * ch);
    PlanarImage img = PlanarImage::make(w, h, ch, 0.0f,
                                        ch == 1 ? ColorModel::gray : ColorModel::rgb);
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) img.at(x, y, c) = dequantize8(row[x * ch + c]);
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

inline void write_png(const PlanarImage& img, const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<uint8_t> row(static_cast<size_t>(img.width) * img.channels);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const bool on = img.active(x, y);
            for (int c = 0; c < img.channels; ++c)
                row[x * img.channels + c] = on ? quantize8(img.at(x, y, c)) : 128;
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Co-sited bilinear chroma upsample: even luma positions carry the chroma
/// samples exactly, odd positions average the neighbors.
inline void upsample_chroma(const std::vector<uint8_t>& cp, int cw, int chh, PlanarImage& img,
                            int channel) {
    for (int y = 0; y < img.height; ++y) {
        const int cy0 = std::min(y / 2, chh - 1);
        const int cy1 = std::min(cy0 + 1, chh - 1);
        const bool oy = (y & 1) != 0;
        for (int x = 0; x < img.width; ++x) {
            const int cx0 = std::min(x / 2, cw - 1);
            const int cx1 = std::min(cx0 + 1, cw - 1);
            const bool ox = (x & 1) != 0;
            double v;
            if (!ox && !oy) {
                v = cp[static_cast<size_t>(cy0) * cw + cx0];
            } else if (ox && !oy) {
                v = 0.5 * (cp[static_cast<size_t>(cy0) * cw + cx0] +
                           cp[static_cast<size_t>(cy0) * cw + cx1]);
            } else if (!ox && oy) {
                v = 0.5 * (cp[static_cast<size_t>(cy0) * cw + cx0] +
                           cp[static_cast<size_t>(cy1) * cw + cx0]);
            } else {
                v = 0.25 * (cp[static_cast<size_t>(cy0) * cw + cx0] +
                            cp[static_cast<size_t>(cy0) * cw + cx1] +
                            cp[static_cast<size_t>(cy1) * cw + cx0] +
                            cp[static_cast<size_t>(cy1) * cw + cx1]);
            }
            img.at(x, y, channel) = static_cast<float>(v / 255.0);
        }
    }
}

inline PlanarImage planes_to_image(const std::vector<uint8_t>& data, int w, int h) {
    PlanarImage img = PlanarImage::make(w, h, 3, 0.0f, ColorModel::yuv);
    const size_t ys = static_cast<size_t>(w) * h;
    const int cw = w / 2, chh = h / 2;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y, 0) = dequantize8(data[static_cast<size_t>(y) * w + x]);
    std::vector<uint8_t> u(data.begin() + ys, data.begin() + ys + static_cast<size_t>(cw) * chh);
    std::vector<uint8_t> v(data.begin() + ys + static_cast<size_t>(cw) * chh, data.end());
    upsample_chroma(u, cw, chh, img, 1);
    upsample_chroma(v, cw, chh, img, 2);
    return img;
}

inline std::vector<uint8_t> image_to_planes(const PlanarImage& img) {
    const int w = img.width, h = img.height;
    if (w % 2 || h % 2) throw IoError("yuv420 requires even dimensions");
    if (img.channels != 3) throw IoError("yuv420 requires 3 channels");
    const int cw = w / 2, chh = h / 2;
    std::vector<uint8_t> data(static_cast<size_t>(w) * h + 2ul * cw * chh);
    size_t k = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            data[k++] = img.active(x, y) ? quantize8(img.at(x, y, 0)) : 128;
    for (int c = 1; c <= 2; ++c)
        for (int y = 0; y < chh; ++y)
            for (int x = 0; x < cw; ++x)
                data[k++] = img.active(2 * x, 2 * y) ? quantize8(img.at(2 * x, 2 * y, c)) : 128;
    return data;
}

inline PlanarImage read_y4m(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("YUV4MPEG2", 0) != 0)
        throw IoError(path + ": not a YUV4MPEG2 stream");
    int w = 0, h = 0;
    std::string colorspace = "C420";
    std::istringstream hs(header);
    std::string tok;
    hs >> tok;  // magic
    while (hs >> tok) {
        if (tok[0] == 'W') w = std::stoi(tok.substr(1));
        else if (tok[0] == 'H') h = std::stoi(tok.substr(1));
        else if (tok[0] == 'C') colorspace = tok;
    }
    if (w < 2 || h < 2) throw IoError(path + ": missing frame dimensions");
    if (colorspace.rfind("C420", 0) != 0)
        throw IoError(path + ": unsupported colorspace " + colorspace + " (need C420)");
    std::string frame_line;
    if (!std::getline(in, frame_line) || frame_line.rfind("FRAME", 0) != 0)
        throw IoError(path + ": missing FRAME marker");
    const size_t need = static_cast<size_t>(w) * h * 3 / 2;
    std::vector<uint8_t> data(need);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(need));
    if (static_cast<size_t>(in.gcount()) != need) throw IoError(path + ": truncated frame");
    return planes_to_image(data, w, h);
}

inline void write_y4m(const PlanarImage& img, const std::string& path) {
    const std::vector<uint8_t> data = image_to_planes(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "YUV4MPEG2 W" << img.width << " H" << img.height << " F30:1 Ip A1:1 C420\n";
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write to " + path);
}

inline std::string sidecar_path(const std::string& path) { return path + ".spec"; }

inline PlanarImage read_raw_yuv(const std::string& path) {
    std::ifstream sc(sidecar_path(path));
    if (!sc) throw IoError(path + ": missing sidecar " + sidecar_path(path));
    std::stringstream buf;
    buf << sc.rdbuf();
    const ConfigFile spec = parse_config(buf.str());
    const int w = std::stoi(spec.get("width", "0"));
    const int h = std::stoi(spec.get("height", "0"));
    const std::string pf = spec.get("pix_fmt", "yuv420p");
    if (w < 2 || h < 2) throw IoError(sidecar_path(path) + ": missing width/height");
    if (pf != "yuv420p") throw IoError(sidecar_path(path) + ": unsupported pix_fmt " + pf);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    in.seekg(0, std::ios::end);
    const auto size = static_cast<size_t>(in.tellg());
    in.seekg(0);
    const size_t need = static_cast<size_t>(w) * h * 3 / 2;
    if (size != need)
        throw IoError(path + ": size " + std::to_string(size) + " does not match sidecar dims (" +
                      std::to_string(need) + " bytes expected)");
    std::vector<uint8_t> data(need);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(need));
    return planes_to_image(data, w, h);
}

inline void write_raw_yuv(const PlanarImage& img, const std::string& path) {
    const std::vector<uint8_t> data = image_to_planes(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    std::ofstream sc(sidecar_path(path));
    sc << "width = " << img.width << "\nheight = " << img.height
       << "\npix_fmt = yuv420p\ncolor = bt709\nchroma_siting = topleft\n";
}

inline std::string lower_ext(const std::string& path) {
    std::string e = std::filesystem::path(path).extension().string();
    for (char& c : e) c = static_cast<char>(std::tolower(c));
    return e;
}

}  // namespace detail

inline std::pair<PlanarImage, FrameSpec> read_image(const std::string& path) {
    const std::string ext = detail::lower_ext(path);
    PlanarImage img;
    if (ext == ".png")
        img = detail::read_png(path);
    else if (ext == ".y4m")
        img = detail::read_y4m(path);
    else if (ext == ".yuv")
        img = detail::read_raw_yuv(path);
    else
        throw IoError(path + ": unsupported container (png, y4m, yuv)");
    return {img, default_spec(img)};
}

inline void write_image(const PlanarImage& img, const FrameSpec& spec, const std::string& path) {
    if (spec.width != img.width || spec.height != img.height)
        throw IoError("write_image: spec dims do not match image");
    const std::string ext = detail::lower_ext(path);
    if (ext == ".png") {
        if (spec.pix == PixelFormat::yuv420_8)
            throw IoError("write_image: yuv420 cannot be stored as png");
        detail::write_png(img, path);
    } else if (ext == ".y4m") {
        detail::write_y4m(img, path);
    } else if (ext == ".yuv") {
        detail::write_raw_yuv(img, path);
    } else {
        throw IoError(path + ": unsupported container (png, y4m, yuv)");
    }
}

inline void write_image(const PlanarImage& img, const std::string& path) {
    write_image(img, default_spec(img), path);
}

}  // namespace omniproj
