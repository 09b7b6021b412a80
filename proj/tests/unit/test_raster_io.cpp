#include <doctest.h>

#include <sstream>

#include "polygon_oracle.hpp"
#include "resvol/error.hpp"
#include "resvol/random.hpp"
#include "resvol/raster_io.hpp"
#include "test_support.hpp"

using namespace resvol;

namespace {

BandGrid constant_band(std::size_t ncols, std::size_t nrows, double v, double cell = 10.0) {
    return BandGrid{{ncols, nrows, cell}, -9999.0, std::vector<double>(ncols * nrows, v)};
}

std::array<std::optional<BandGrid>, 4> four_bands(const BandGrid& g) { return {g, g, g, g}; }

}  // namespace

TEST_SUITE("raster_io") {

TEST_CASE("ascii grid with one nodata cell") {
    auto g = parse_ascii_grid("ncols 2\nnrows 2\ncellsize 10\nnodata_value -9999\n0.1 0.2\n0.3 -9999\n");
    CHECK(g.shape.ncols == 2);
    CHECK(g.shape.nrows == 2);
    CHECK(g.shape.cell_size == 10.0);
    CHECK(g.values == std::vector<double>{0.1, 0.2, 0.3, -9999});
    CHECK_FALSE(g.is_nodata(0));
    CHECK(g.is_nodata(3));
}

TEST_CASE("ascii grid single cell") {
    auto g = parse_ascii_grid("ncols 1\nnrows 1\ncellsize 30\nnodata_value -1\n0.5\n");
    CHECK(g.values == std::vector<double>{0.5});
    CHECK(g.nodata_value == -1.0);
}

TEST_CASE("ascii grid header keys are case-insensitive and unordered") {
    auto g = parse_ascii_grid("NROWS 1\nNCols 2\nNODATA_value -1\nCellSize 5\n1 2\n");
    CHECK(g.shape.ncols == 2);
    CHECK(g.shape.cell_size == 5.0);
}

TEST_CASE("ascii grid errors name the line") {
    SUBCASE("too few rows") {
        try {
            parse_ascii_grid("ncols 2\nnrows 3\ncellsize 10\nnodata_value -9999\n1 2\n3 4\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() > 0);
        }
    }
    SUBCASE("short row") {
        try {
            parse_ascii_grid("ncols 2\nnrows 2\ncellsize 10\nnodata_value -9999\n1 2\n3\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 6);
        }
    }
    SUBCASE("non-numeric token") {
        try {
            parse_ascii_grid("ncols 2\nnrows 1\ncellsize 10\nnodata_value -9999\n1 abc\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 5);
        }
    }
    SUBCASE("malformed header") {
        CHECK_THROWS_AS(parse_ascii_grid("ncols 2\nnrows 1\ncellsize -3\nnodata_value -9999\n1 2\n"), ParseError);
        CHECK_THROWS_AS(parse_ascii_grid("ncols 2\nnrows 1\nnodata_value -9999\n1 2\n"), ParseError);
        CHECK_THROWS_AS(parse_ascii_grid("ncols x\nnrows 1\ncellsize 1\nnodata_value -9999\n1 2\n"), ParseError);
    }
    SUBCASE("non-finite value") {
        CHECK_THROWS_AS(parse_ascii_grid("ncols 1\nnrows 1\ncellsize 1\nnodata_value -9999\nnan\n"), ParseError);
    }
}

TEST_CASE("ascii grid round-trips for random grids") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t nc = 1 + rng.below(7), nr = 1 + rng.below(7);
        BandGrid g{{nc, nr, rng.uniform(0.5, 100.0)}, -9999.0, {}};
        for (std::size_t i = 0; i < nc * nr; ++i) g.values.push_back(rng.below(5) == 0 ? -9999.0 : rng.uniform(-1, 2));
        const auto text = serialize_ascii_grid(g);
        const auto back = parse_ascii_grid(text);
        CHECK(back == g);
        CHECK(serialize_ascii_grid(back) == text);
    }
}

TEST_CASE("sensor registry") {
    CHECK(sensor_profile("sentinel2").has_swir());
    CHECK(sensor_profile("landsat8").has_swir());
    const auto& mss = sensor_profile("landsat_mss");
    CHECK_FALSE(mss.has_swir());
    CHECK(mss.has_role(BandRole::Green));
    CHECK(mss.has_role(BandRole::Nir));
    CHECK_THROWS_AS(sensor_profile("spot5"), InputError);
    for (const auto& s : registered_sensors()) {
        CHECK(s.has_role(BandRole::Green));
        CHECK(s.has_role(BandRole::Nir));
        CHECK(s.has_swir() == (s.has_role(BandRole::Swir1) && s.has_role(BandRole::Swir2)));
    }
}

TEST_CASE("role names parse case-insensitively") {
    CHECK(parse_role("nir") == BandRole::Nir);
    CHECK(parse_role("SWIR2") == BandRole::Swir2);
    CHECK_FALSE(parse_role("red").has_value());
}

TEST_CASE("make_scene validates roles and dimensions") {
    const auto g = constant_band(3, 2, 0.2);
    SUBCASE("four-band sentinel2 scene has full valid mask") {
        auto s = make_scene(parse_date("2022-05-01"), sensor_profile("sentinel2"), four_bands(g));
        CHECK(s.sensor.has_swir());
        CHECK(count_true(s.valid_mask) == 6);
    }
    SUBCASE("two-band mss scene") {
        auto s = make_scene(parse_date("1975-05-01"), sensor_profile("landsat_mss"), {g, g, std::nullopt, std::nullopt});
        CHECK_FALSE(s.sensor.has_swir());
        CHECK_THROWS_AS(s.band(BandRole::Swir1), InputError);
    }
    SUBCASE("missing NIR") {
        try {
            make_scene(parse_date("2022-05-01"), sensor_profile("sentinel2"), {g, std::nullopt, g, g});
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("required role NIR absent") != std::string::npos);
        }
    }
    SUBCASE("dimension mismatch") {
        auto bands = four_bands(g);
        bands[2] = constant_band(2, 3, 0.2);
        CHECK_THROWS_AS(make_scene(parse_date("2022-05-01"), sensor_profile("sentinel2"), bands), InputError);
    }
    SUBCASE("out-of-range reflectance becomes nodata") {
        auto bands = four_bands(g);
        bands[0]->values[1] = 1.5;
        bands[3]->values[4] = -0.5;
        auto s = make_scene(parse_date("2022-05-01"), sensor_profile("sentinel2"), bands);
        CHECK(s.valid_mask[1] == 0);
        CHECK(s.valid_mask[4] == 0);
        CHECK(count_true(s.valid_mask) == 4);
    }
}

TEST_CASE("valid mask is the conjunction of band masks") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::array<std::optional<BandGrid>, 4> bands;
        for (auto& b : bands) {
            b = constant_band(4, 3, 0.1);
            for (auto& v : b->values)
                if (rng.below(4) == 0) v = -9999.0;
        }
        auto s = make_scene(parse_date("2020-01-01"), sensor_profile("landsat9"), bands);
        for (std::size_t i = 0; i < 12; ++i) {
            bool all = true;
            for (const auto& b : bands) all = all && !b->is_nodata(i);
            CHECK((s.valid_mask[i] != 0) == all);
        }
    }
}

TEST_CASE("manifest parse and load") {
    testing::TempDir dir("manifest");
    const auto g = constant_band(2, 2, 0.25);
    write_ascii_grid(dir / "g.asc", g);
    write_ascii_grid(dir / "n.asc", g);
    testing::spit(dir / "m.txt",
                  "# comment\n\ndate=1976-06-01 sensor=landsat_mss Green=g.asc NIR=n.asc\n"
                  "date=1976-07-01 sensor=landsat_mss green=g.asc\n");
    auto entries = read_manifest(dir / "m.txt");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].bands.size() == 2);
    auto scene = load_scene(entries[0]);
    CHECK_FALSE(scene.sensor.has_swir());
    try {
        load_scene(entries[1]);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("required role NIR absent") != std::string::npos);
    }

    std::ostringstream out;
    write_manifest(out, entries);
    std::istringstream in(out.str());
    auto again = parse_manifest(in, dir.path());
    CHECK(again.size() == 2);
    CHECK(again[0].bands == entries[0].bands);

    std::istringstream bad("date=2020-01-01 sensor=nosuch Green=g.asc NIR=n.asc\n");
    auto unknown = parse_manifest(bad, dir.path());
    CHECK_THROWS_AS(load_scene(unknown[0]), InputError);

    std::istringstream missing_date("sensor=sentinel2 Green=g.asc\n");
    CHECK_THROWS_AS(parse_manifest(missing_date, dir.path()), ParseError);
    CHECK_THROWS_AS(read_manifest(dir / "absent.txt"), InputError);
}

TEST_CASE("aoi polygon validation") {
    CHECK_THROWS_AS(AoiPolygon({{0, 0}, {1, 1}}), InputError);
    CHECK_THROWS_AS(AoiPolygon({{0, 0}, {1, 1}, {2, 2}}), InputError);
    AoiPolygon closed({{0, 0}, {2, 0}, {2, 2}, {0, 2}, {0, 0}});
    CHECK(closed.vertices().size() == 4);
    CHECK(closed.area() == doctest::Approx(4.0));

    std::istringstream in("0 0\n4 0\n4 4\n0 4\n");
    auto p = parse_aoi(in);
    CHECK(p.area() == 16.0);
    std::ostringstream out;
    write_aoi(out, p);
    std::istringstream back(out.str());
    CHECK(parse_aoi(back).vertices() == p.vertices());
}

TEST_CASE("rasterize full cover and left half") {
    const GridShape shape{4, 4, 1.0};
    auto full = rasterize_polygon(AoiPolygon({{0, 0}, {4, 0}, {4, 4}, {0, 4}}), shape);
    CHECK(count_true(full) == 16);

    auto half = rasterize_polygon(AoiPolygon({{0, 0}, {2, 0}, {2, 4}, {0, 4}}), shape);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) CHECK((half.at(c, r) != 0) == (c < 2));
}

TEST_CASE("half-open boundary: left and bottom edges inside") {
    AoiPolygon sq({{0.5, 0.5}, {2.5, 0.5}, {2.5, 2.5}, {0.5, 2.5}});
    CHECK(point_in_polygon(sq, {0.5, 1.0}));
    CHECK(point_in_polygon(sq, {1.0, 0.5}));
    CHECK_FALSE(point_in_polygon(sq, {2.5, 1.0}));
    CHECK_FALSE(point_in_polygon(sq, {1.0, 2.5}));
    // cell centers sit exactly on the left/bottom edges: columns/rows 0..1 in a 3x3 grid
    auto m = rasterize_polygon(sq, {3, 3, 1.0});
    CHECK(count_true(m) == 4);
}

TEST_CASE("rasterization agrees with an exact even-odd oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t nv = 3 + rng.below(6);
        std::vector<Point2> pts;
        std::vector<std::pair<double, double>> ring;
        for (std::size_t i = 0; i < nv; ++i) {
            const double x = static_cast<double>(rng.below(17)) * 0.5;
            const double y = static_cast<double>(rng.below(17)) * 0.5;
            pts.push_back({x, y});
            ring.emplace_back(x, y);
        }
        std::optional<AoiPolygon> poly;
        try {
            poly.emplace(pts);
        } catch (const InputError&) {
            continue;
        }
        ring.clear();
        for (const auto& p : poly->vertices()) ring.emplace_back(p.x, p.y);
        const GridShape shape{8, 8, 1.0};
        auto m = rasterize_polygon(*poly, shape);
        for (std::size_t r = 0; r < 8; ++r)
            for (std::size_t c = 0; c < 8; ++c) {
                const bool want = oracle::inside_even_odd(ring, shape.center_x(c), shape.center_y(r));
                CHECK((m.at(c, r) != 0) == want);
                CHECK(point_in_polygon(*poly, {shape.center_x(c), shape.center_y(r)}) == want);
            }
    }
}

TEST_CASE("rasterized area converges to shoelace area") {
    // Convex hexagon inside a 100 m square.
    const std::vector<Point2> v{{20, 10}, {70, 12}, {92, 45}, {75, 88}, {25, 85}, {8, 50}};
    AoiPolygon poly(v);
    double perimeter = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        perimeter += std::hypot(b.x - a.x, b.y - a.y);
    }
    for (double cell : {4.0, 1.0}) {
        const auto n = static_cast<std::size_t>(100.0 / cell);
        const auto m = rasterize_polygon(poly, {n, n, cell});
        const double area = static_cast<double>(count_true(m)) * cell * cell;
        const double err = std::abs(area - poly.area());
        CHECK(err <= perimeter * cell);
    }
}

}  // TEST_SUITE
