#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace omniproj;
using test_support::random_dir;
using test_support::uniform01;

TEST_CASE("latlon_to_dir convention anchors") {
    const Vec3 a = latlon_to_dir({0.0, 0.0});
    CHECK(a.x == Catch::Approx(1.0).margin(1e-15));
    CHECK(a.y == Catch::Approx(0.0).margin(1e-15));
    CHECK(a.z == Catch::Approx(0.0).margin(1e-15));

    const Vec3 pole = latlon_to_dir({kHalfPi, 0.0});
    CHECK(angular_error(pole, {0, 0, 1}) < 1e-12);

    const Vec3 east = latlon_to_dir({0.0, kHalfPi});
    CHECK(angular_error(east, {0, 1, 0}) < 1e-12);
}

TEST_CASE("latlon_to_dir rejects out-of-range input") {
    CHECK_THROWS_AS(latlon_to_dir({2.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(latlon_to_dir({0.0, 4.0}), std::invalid_argument);
}

TEST_CASE("latlon_to_dir returns unit vectors") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const LatLon p{kPi * (uniform01(rng) - 0.5), kPi * (2.0 * uniform01(rng) - 1.0) * 0.9999};
        CHECK(std::abs(norm(latlon_to_dir(p)) - 1.0) < 1e-12);
    }
}

TEST_CASE("dir_to_latlon anchors and pole convention") {
    const LatLon south = dir_to_latlon({0, 0, -1});
    CHECK(south.lat == Catch::Approx(-kHalfPi));
    CHECK(south.lon == 0.0);

    const LatLon front = dir_to_latlon({1, 0, 0});
    CHECK(front.lat == 0.0);
    CHECK(front.lon == 0.0);

    CHECK_THROWS_AS(dir_to_latlon({0, 0, 0}), std::invalid_argument);
}

TEST_CASE("latlon round trip is the identity") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 d = random_dir(rng);
        const Vec3 back = latlon_to_dir(dir_to_latlon(d));
        CHECK(angular_error(d, back) < 1e-12);
    }
    for (int i = 0; i < 2000; ++i) {
        const double lat = (kHalfPi - 1e-6) * (2.0 * uniform01(rng) - 1.0);
        const double lon = kPi * (2.0 * uniform01(rng) - 1.0) * 0.999999;
        const LatLon back = dir_to_latlon(latlon_to_dir({lat, lon}));
        CHECK(std::abs(back.lat - lat) < 1e-12);
        CHECK(std::abs(back.lon - lon) < 1e-12);
    }
}

TEST_CASE("angular_error anchors") {
    CHECK(angular_error({1, 0, 0}, {1, 0, 0}) == 0.0);
    CHECK(angular_error({1, 0, 0}, {0, 1, 0}) == Catch::Approx(kHalfPi));
    CHECK(angular_error({1, 0, 0}, {-1, 0, 0}) == Catch::Approx(kPi));
}
