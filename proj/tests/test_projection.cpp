#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace omniproj;
using test_support::random_dir;
using test_support::uniform01;

TEST_CASE("erp unproject anchors") {
    const ProjectionGrid g = erp_grid(2);  // 4x2
    const Vec3 center = *unproject(g, {2.0, 1.0});
    CHECK(angular_error(center, {1, 0, 0}) < 1e-12);

    const Vec3 corner = *unproject(g, {0.5, 0.5});
    const LatLon p = dir_to_latlon(corner);
    CHECK(p.lat == Catch::Approx(0.25 * kPi));
    CHECK(p.lon == Catch::Approx(-0.75 * kPi));

    const GridPoint back = project(g, {1, 0, 0});
    CHECK(back.x == Catch::Approx(2.0).margin(1e-9));
    CHECK(back.y == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("unproject rejects out-of-raster points") {
    const ProjectionGrid g = erp_grid(8);
    CHECK_THROWS_AS(unproject(g, {-1.0, 0.0}), std::out_of_range);
    CHECK_THROWS_AS(unproject(g, {0.0, 9.5}), std::out_of_range);
}

TEST_CASE("ssp corners are inactive") {
    const ProjectionGrid g = ssp_grid(64);
    // top-right raster corner sits outside the north pole circle
    CHECK_FALSE(unproject(g, {g.width - 0.5, 0.5}).has_value());
    CHECK(unproject(g, {0.5, 0.5}).has_value());  // band
}

TEST_CASE("cmp front face center") {
    const ProjectionGrid g = cube_grid(ProjectionFormat::cmp, 64);
    const GridPoint p = project(g, {1, 0, 0});
    CHECK(p.x == Catch::Approx(1.5 * 64.0).margin(1e-9));  // front is the middle top cell
    CHECK(p.y == Catch::Approx(0.5 * 64.0).margin(1e-9));
}

TEST_CASE("eac remap anchors and identity") {
    CHECK(eac_remap(0.0) == 0.0);
    CHECK(eac_remap(1.0) == 1.0);
    CHECK(eac_remap(-1.0) == -1.0);
    CHECK(eac_unmap(1.0) == 1.0);
    CHECK(eac_remap(std::tan(kPi / 8.0)) == Catch::Approx(0.5).margin(1e-12));
    CHECK_THROWS_AS(eac_remap(1.5), std::invalid_argument);
    CHECK_THROWS_AS(eac_unmap(-1.5), std::invalid_argument);

    double prev = -1.0;
    for (int i = 0; i <= 10000; ++i) {
        const double u = -1.0 + 2.0 * i / 10000.0;
        const double t = eac_remap(u);
        CHECK(std::abs(eac_unmap(t) - u) < 1e-12);
        CHECK(std::abs(eac_remap(-u) + t) < 1e-15);  // odd
        if (i) CHECK(t > prev);                      // monotone
        prev = t;
    }
}

TEST_CASE("eac shares cmp face geometry through the remap") {
    const ProjectionGrid cmp = cube_grid(ProjectionFormat::cmp, 64);
    const ProjectionGrid eac = cube_grid(ProjectionFormat::eac, 64);
    const double face = 64.0;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 d = random_dir(rng);
        const GridPoint pc = project(cmp, d);
        const GridPoint pe = project(eac, d);
        REQUIRE(pc.region == pe.region);
        const double uc = 2.0 * std::fmod(pc.x, face) / face - 1.0;
        const double ue = 2.0 * std::fmod(pe.x, face) / face - 1.0;
        CHECK(std::abs(eac_remap(uc) - ue) < 1e-9);
        const double vc = 2.0 * std::fmod(pc.y, face) / face - 1.0;
        const double ve = 2.0 * std::fmod(pe.y, face) / face - 1.0;
        CHECK(std::abs(eac_remap(vc) - ve) < 1e-9);
    }
}

TEST_CASE("active masks") {
    CHECK(active_mask(erp_grid(32)).count() == 64 * 32);
    CHECK(active_mask(cube_grid(ProjectionFormat::cmp, 32)).count() == 6 * 32 * 32);
    CHECK(active_mask(tsp_grid(32)).count() == 64 * 32);

    // SSP pole square: circle inscribed in a square covers ~pi/4 of it
    for (int side : {64, 128}) {
        const ProjectionGrid g = ssp_grid(2 * side);
        const ActiveMask m = active_mask(g);
        long in_square = 0;
        for (int y = 0; y < side; ++y)
            for (int x = g.width - side; x < g.width; ++x) in_square += m.at(x, y) ? 1 : 0;
        const double frac = static_cast<double>(in_square) / (static_cast<double>(side) * side);
        CHECK(frac == Catch::Approx(kPi / 4.0).epsilon(0.02));
    }

    for (ProjectionFormat f : {ProjectionFormat::ssp, ProjectionFormat::isp,
                               ProjectionFormat::ohp}) {
        const ProjectionGrid g = default_grid(f, 8192);
        const ActiveMask m = active_mask(g);
        CHECK(m.count() < static_cast<long>(g.width) * g.height);
    }
}

TEST_CASE("default_grid anchors and budget matching") {
    const ProjectionGrid erp = default_grid(ProjectionFormat::erp, 2048);
    CHECK(erp.width == 64);
    CHECK(erp.height == 32);

    const ProjectionGrid cmp = default_grid(ProjectionFormat::cmp, 6 * 64 * 64);
    CHECK(cmp.width == 192);
    CHECK(cmp.height == 128);

    for (ProjectionFormat f : kAllFormats)
        for (long budget : {2048L, 32768L}) {
            const ProjectionGrid g = default_grid(f, budget);
            const long active = count_active(g);
            CHECK(std::abs(active - budget) <= budget / 10);
            CHECK(g.width % 2 == 0);
            CHECK(g.height % 2 == 0);
        }

    CHECK_THROWS_AS(default_grid(ProjectionFormat::erp, 100), std::invalid_argument);
}

TEST_CASE("bijectivity on active pixel centers") {
    std::mt19937_64 rng(17);
    for (ProjectionFormat f : kAllFormats) {
        const ProjectionGrid g = default_grid(f, 32768);
        const auto m = make_mapping(g);
        const ActiveMask mask = active_mask(*m);
        double worst = 0.0;
        int n = 0;
        while (n < 3000) {
            const int x = static_cast<int>(uniform01(rng) * g.width);
            const int y = static_cast<int>(uniform01(rng) * g.height);
            if (x >= g.width || y >= g.height || !mask.at(x, y)) continue;
            ++n;
            const int r = m->region_at(x + 0.5, y + 0.5);
            const Vec3 d = m->unproject_region(r, x + 0.5, y + 0.5);
            const GridPoint p = m->project(d);
            worst = std::max(worst, std::hypot(p.x - (x + 0.5), p.y - (y + 0.5)));
        }
        INFO("format " << to_string(f));
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("sphere coverage: every direction projects to an active location") {
    std::mt19937_64 rng(23);
    for (ProjectionFormat f : kAllFormats) {
        const ProjectionGrid g = default_grid(f, 32768);
        const auto m = make_mapping(g);
        for (int i = 0; i < 10000; ++i) {
            const GridPoint p = m->project(random_dir(rng));
            INFO("format " << to_string(f));
            REQUIRE(m->region_at(p.x, p.y) >= 0);
        }
    }
}

TEST_CASE("within-region continuity stays under 4x mean pitch") {
    for (ProjectionFormat f : kAllFormats) {
        const ProjectionGrid g = default_grid(f, 32768);
        const auto m = make_mapping(g);
        const double mean_pitch = std::sqrt(4.0 * kPi / count_active(g));
        double worst = 0.0;
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x + 1 < g.width; ++x) {
                const int r0 = m->region_at(x + 0.5, y + 0.5);
                if (r0 < 0 || m->region_at(x + 1.5, y + 0.5) != r0) continue;
                worst = std::max(worst,
                                 angular_error(m->unproject_region(r0, x + 0.5, y + 0.5),
                                               m->unproject_region(r0, x + 1.5, y + 0.5)));
            }
        for (int y = 0; y + 1 < g.height; ++y)
            for (int x = 0; x < g.width; ++x) {
                const int r0 = m->region_at(x + 0.5, y + 0.5);
                if (r0 < 0 || m->region_at(x + 0.5, y + 1.5) != r0) continue;
                worst = std::max(worst,
                                 angular_error(m->unproject_region(r0, x + 0.5, y + 0.5),
                                               m->unproject_region(r0, x + 0.5, y + 1.5)));
            }
        INFO("format " << to_string(f) << " worst step " << worst << " mean pitch "
                       << mean_pitch);
        CHECK(worst < 4.0 * mean_pitch);
    }
}

TEST_CASE("grid_from_dims inverts tri_grid layouts") {
    for (ProjectionFormat f : {ProjectionFormat::isp, ProjectionFormat::ohp})
        for (int b : {16, 37, 123}) {
            const ProjectionGrid g = tri_grid(f, b);
            const ProjectionGrid back = grid_from_dims(f, g.width, g.height);
            CHECK(back == g);
        }
    CHECK_THROWS_AS(grid_from_dims(ProjectionFormat::isp, 100, 64), std::invalid_argument);
}

TEST_CASE("scale_grid scales layouts exactly") {
    for (ProjectionFormat f : kAllFormats) {
        const ProjectionGrid g = default_grid(f, 2048);
        const ProjectionGrid s = scale_grid(g, 3);
        CHECK(s.width == 3 * g.width);
        CHECK(s.height == 3 * g.height);
        CHECK_NOTHROW(validate_grid(s));
    }
}

TEST_CASE("grid validation rejects malformed layouts") {
    ProjectionGrid g;
    g.format = ProjectionFormat::erp;
    g.width = 100;
    g.height = 60;
    CHECK_THROWS_AS(validate_grid(g), std::invalid_argument);
    g = cube_grid(ProjectionFormat::cmp, 32);
    g.width += 3;
    CHECK_THROWS_AS(validate_grid(g), std::invalid_argument);
}
