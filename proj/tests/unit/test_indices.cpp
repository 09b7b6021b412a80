#include <doctest.h>

#include "resvol/error.hpp"
#include "resvol/indices.hpp"
#include "resvol/random.hpp"

using namespace resvol;

namespace {

BandGrid band(std::vector<double> v) {
    const auto n = v.size();
    return BandGrid{{n, 1, 10.0}, -9999.0, std::move(v)};
}

Scene scene_of(const std::vector<double>& g, const std::vector<double>& n, const std::vector<double>& s1,
               const std::vector<double>& s2) {
    return make_scene(parse_date("2023-03-01"), sensor_profile("sentinel2"), {band(g), band(n), band(s1), band(s2)});
}

}  // namespace

TEST_SUITE("indices") {

TEST_CASE("ndwi examples") {
    CHECK(*ndwi_value(0.3, 0.3) == 0.0);
    CHECK(*ndwi_value(0.2, 0.1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_FALSE(ndwi_value(0.0, 0.0).has_value());
}

TEST_CASE("aweinsh examples") {
    CHECK(aweinsh_value(0.1, 0.08, 0.05, 0.04) == doctest::Approx(0.07).epsilon(1e-13));
    CHECK(aweinsh_value(0, 0, 0, 0) == 0.0);
}

TEST_CASE("wcwi examples") {
    CHECK(*wcwi_value(0.1, 0.08, 0.05, 0.04) == doctest::Approx(0.8 * 0.07 + 0.2 * (0.02 / 0.18)).epsilon(1e-13));
    CHECK(*wcwi_value(0.1, 0.08, 0.05, 0.04) == doctest::Approx(0.0782222222222222).epsilon(1e-12));
    CHECK_FALSE(wcwi_value(0, 0, 0, 0).has_value());
    // clear-water archetype
    CHECK(*wcwi_value(0.3, 0.02, 0.01, 0.01) == doctest::Approx(1.077).epsilon(1e-12));
}

TEST_CASE("scene-level indices and nodata propagation") {
    auto s = scene_of({0.2, 0.0, 0.3, -9999}, {0.1, 0.0, 0.02, 0.1}, {0.05, 0.0, 0.01, 0.1}, {0.04, 0.0, 0.01, 0.1});
    auto nd = ndwi(s);
    CHECK(nd.kind == IndexKind::Ndwi);
    CHECK(nd.valid_mask.values == std::vector<std::uint8_t>{1, 0, 1, 0});
    auto aw = aweinsh(s);
    CHECK(aw.valid_mask.values == std::vector<std::uint8_t>{1, 1, 1, 0});
    CHECK(aw.values[1] == 0.0);
    auto wc = wcwi(s);
    CHECK(wc.valid_mask.values == std::vector<std::uint8_t>{1, 0, 1, 0});
    for (std::size_t i = 0; i < 4; ++i) {
        if (!s.valid_mask[i]) CHECK_FALSE(nd.valid_mask[i]);
    }
    auto grid = index_to_grid(wc);
    CHECK(grid.is_nodata(1));
    CHECK(grid.values[2] == wc.values[2]);
}

TEST_CASE("swir indices refuse sensors without swir") {
    auto mss = make_scene(parse_date("1975-01-01"), sensor_profile("landsat_mss"),
                          {band({0.1}), band({0.2}), std::nullopt, std::nullopt});
    CHECK_THROWS_AS(aweinsh(mss), UnsupportedIndexError);
    CHECK_THROWS_AS(wcwi(mss), UnsupportedIndexError);
    CHECK_THROWS_AS(compute_index(mss, IndexKind::Wcwi), UnsupportedIndexError);
    CHECK_NOTHROW(ndwi(mss));
}

TEST_CASE("index names round-trip") {
    for (auto k : {IndexKind::Ndwi, IndexKind::AweiNsh, IndexKind::Wcwi}) CHECK(parse_index_kind(index_name(k)) == k);
    CHECK(parse_index_kind("wcwi") == IndexKind::Wcwi);
    CHECK_FALSE(parse_index_kind("mndwi").has_value());
}

TEST_CASE("index properties on random reflectance") {
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const double g = rng.uniform(0.001, 1), n = rng.uniform(0.001, 1), s1 = rng.uniform(0, 1), s2 = rng.uniform(0, 1);
        const double nd = *ndwi_value(g, n);
        CHECK(nd >= -1.0);
        CHECK(nd <= 1.0);
        CHECK(*ndwi_value(n, g) == -nd);
        const double aw = aweinsh_value(g, n, s1, s2);
        CHECK(*wcwi_value(g, n, s1, s2) == 0.8 * aw + 0.2 * nd);
        const double k = rng.uniform(0.1, 3.0);
        CHECK(aweinsh_value(k * g, k * n, k * s1, k * s2) == doctest::Approx(k * aw).epsilon(1e-12).scale(1.0));
        CHECK(*ndwi_value(k * g, k * n) == doctest::Approx(nd).epsilon(1e-12).scale(1.0));
    }
}

}  // TEST_SUITE
