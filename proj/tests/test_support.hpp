#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "omniproj/omniproj.hpp"

namespace test_support {

inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

inline omniproj::Vec3 random_dir(std::mt19937_64& rng) {
    const double z = 2.0 * uniform01(rng) - 1.0;
    const double t = omniproj::kTwoPi * uniform01(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(t), r * std::sin(t), z};
}

inline omniproj::PlanarImage random_image(int w, int h, int channels, uint64_t seed,
                                          bool snap = true) {
    std::mt19937_64 rng(seed);
    omniproj::PlanarImage img = omniproj::PlanarImage::make(
        w, h, channels, 0.0f,
        channels == 1 ? omniproj::ColorModel::gray : omniproj::ColorModel::rgb);
    for (float& v : img.samples) {
        v = static_cast<float>(uniform01(rng));
        if (snap) v = omniproj::dequantize8(omniproj::quantize8(v));
    }
    return img;
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<unsigned> n{0};
        path = std::filesystem::temp_directory_path() /
               ("omniproj-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(n.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string fixture(const std::string& name) {
    return std::string(OMNIPROJ_FIXTURE_DIR) + "/" + name;
}

}  // namespace test_support
