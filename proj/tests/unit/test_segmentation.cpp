#include <doctest.h>

#include <algorithm>

#include "components_oracle.hpp"
#include "otsu_oracle.hpp"
#include "resvol/error.hpp"
#include "resvol/random.hpp"
#include "resvol/segmentation.hpp"
#include "resvol/synth.hpp"

using namespace resvol;

namespace {

IndexRaster raster(std::size_t ncols, std::size_t nrows, std::vector<double> v) {
    IndexRaster r;
    r.kind = IndexKind::Ndwi;
    r.shape = {ncols, nrows, 10.0};
    r.values = std::move(v);
    r.valid_mask = Mask(r.shape, 1);
    return r;
}

Mask mask_from(std::size_t ncols, std::size_t nrows, std::vector<std::uint8_t> v) {
    Mask m({ncols, nrows, 1.0});
    m.values = std::move(v);
    return m;
}

Histogram random_histogram(Rng& rng) {
    Histogram h;
    const std::size_t bins = 2 + rng.below(255);
    h.lo = rng.uniform(-2, 1);
    h.hi = h.lo + rng.uniform(0.01, 3);
    h.counts.assign(bins, 0);
    do {
        for (auto& c : h.counts) c = rng.below(3) == 0 ? 0 : rng.below(1000);
    } while (std::count_if(h.counts.begin(), h.counts.end(), [](auto c) { return c > 0; }) < 2);
    return h;
}

}  // namespace

TEST_SUITE("segmentation") {

TEST_CASE("histogram binning examples") {
    const std::vector<double> a{0, 1};
    auto h = build_histogram(a, 2);
    CHECK(h.counts == std::vector<std::uint64_t>{1, 1});
    CHECK(h.lo == 0.0);
    CHECK(h.hi == 1.0);

    const std::vector<double> b{0, 0.5, 1};
    CHECK(build_histogram(b, 2).counts == std::vector<std::uint64_t>{2, 1});

    const std::vector<double> c{0.3, 0.3, 0.3};
    CHECK_THROWS_AS(build_histogram(c, 16), DegenerateError);
    const std::vector<double> one{0.3};
    CHECK_THROWS_AS(build_histogram(one, 16), DegenerateError);
}

TEST_CASE("histogram totals equal contributing pixels") {
    auto r = raster(3, 2, {0.1, 0.5, -0.2, 0.9, 0.4, 0.3});
    r.valid_mask[1] = 0;
    auto aoi = mask_from(3, 2, {1, 1, 1, 0, 1, 1});
    auto h = build_histogram(r, aoi, 8);
    CHECK(h.total() == 4);
    CHECK(h.lo == -0.2);
    CHECK(h.hi == 0.4);
}

TEST_CASE("otsu on the separated-pairs example") {
    const std::vector<double> v{1, 1, 2, 2, 8, 8, 9, 9};
    auto h = build_histogram(v, 16);
    const double t = otsu_threshold(h);
    // Every edge between the clusters scores the same; the lowest wins.
    CHECK(t == 2.0);
    const auto ref = oracle::otsu_exhaustive(h.counts, h.lo, h.hi);
    CHECK(otsu(h).split_bin == ref.split_bin);
}

TEST_CASE("otsu with two bins picks the interior edge") {
    Histogram h{0.0, 1.0, {5, 5}};
    CHECK(otsu_threshold(h) == 0.5);
    CHECK(otsu(h).split_bin == 0);
}

TEST_CASE("otsu separates two gaussians") {
    Rng rng(99);
    std::vector<double> vals;
    std::vector<bool> water;
    for (int i = 0; i < 20000; ++i) {
        const bool w = rng.below(2) == 0;
        vals.push_back(w ? rng.normal(0.8, 0.05) : rng.normal(-0.5, 0.05));
        water.push_back(w);
    }
    const double t = otsu_threshold(build_histogram(vals, 256));
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) wrong += (vals[i] > t) != water[i];
    CHECK(static_cast<double>(wrong) / vals.size() < 0.001);
}

TEST_CASE("otsu matches the exhaustive rational oracle") {
    Rng rng(1);
    for (int trial = 0; trial < 150; ++trial) {
        auto h = random_histogram(rng);
        const auto ref = oracle::otsu_exhaustive(h.counts, h.lo, h.hi);
        const auto got = otsu(h);
        CHECK(got.split_bin == ref.split_bin);
        CHECK(got.threshold == h.edge(ref.split_bin + 1));
    }
}

TEST_CASE("otsu ties go to the lowest edge") {
    // symmetric histogram with two equally good splits
    Histogram h{0.0, 4.0, {4, 0, 0, 4}};
    const auto ref = oracle::otsu_exhaustive(h.counts, h.lo, h.hi);
    CHECK(ref.split_bin == 0);
    CHECK(otsu(h).split_bin == 0);
}

TEST_CASE("between plus within equals total") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        auto h = random_histogram(rng);
        for (std::size_t k = 0; k + 1 < h.bin_count(); ++k) {
            const auto v = class_variances(h, k);
            CHECK(v.between + v.within == doctest::Approx(v.total).epsilon(1e-9));
        }
    }
}

TEST_CASE("apply_threshold rules") {
    auto r = raster(2, 1, {0.1, 0.9});
    Mask all(r.shape, 1);
    CHECK(apply_threshold(r, 0.5, all).values == std::vector<std::uint8_t>{0, 1});
    CHECK(count_true(apply_threshold(r, 1.0, all)) == 0);
    r.valid_mask[1] = 0;
    CHECK(count_true(apply_threshold(r, -100.0, all)) == 1);
    Mask outside(r.shape, 0);
    CHECK(count_true(apply_threshold(raster(2, 1, {0.1, 0.9}), -1.0, outside)) == 0);
}

TEST_CASE("raising the threshold never adds pixels") {
    Rng rng(8);
    std::vector<double> v(400);
    for (auto& x : v) x = rng.uniform(-1, 1);
    auto r = raster(20, 20, v);
    Mask all(r.shape, 1);
    std::size_t prev = r.values.size() + 1;
    for (double t = -1.1; t <= 1.1; t += 0.05) {
        const auto n = count_true(apply_threshold(r, t, all));
        CHECK(n <= prev);
        prev = n;
    }
}

TEST_CASE("clean_mask examples") {
    auto lone = mask_from(3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 0});
    CHECK(clean_mask(lone, 1) == lone);
    CHECK(count_true(clean_mask(lone, 2)) == 0);

    // two separate 3-pixel components, one joined only diagonally
    auto two = mask_from(5, 3, {1, 1, 1, 0, 0,  //
                                0, 0, 0, 0, 1,  //
                                0, 0, 0, 1, 1});
    CHECK(clean_mask(two, 3) == two);
    CHECK(count_true(clean_mask(two, 4)) == 0);
}

TEST_CASE("clean_mask agrees with flood-fill labelling") {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t nc = 1 + rng.below(15), nr = 1 + rng.below(15);
        Mask m({nc, nr, 1.0});
        for (auto& v : m.values) v = rng.below(3) == 0;
        const std::size_t min_size = 1 + rng.below(6);
        const auto sizes = oracle::component_sizes(m.values, nc, nr);
        const auto cleaned = clean_mask(m, min_size);
        for (std::size_t i = 0; i < m.size(); ++i) {
            CHECK((cleaned[i] != 0) == (m[i] != 0 && sizes[i] >= min_size));
        }
    }
}

TEST_CASE("dilate is a Chebyshev square") {
    auto m = mask_from(5, 5, std::vector<std::uint8_t>(25, 0));
    m.at(2, 2) = 1;
    CHECK(count_true(dilate(m, 1)) == 9);
    CHECK(count_true(dilate(m, 2)) == 25);
    CHECK(dilate(m, 0) == m);
}

TEST_CASE("surface_stats examples") {
    Mask m({10, 10, 10.0}, 0);
    for (std::size_t i = 0; i < 10; ++i) m[i] = 1;
    auto s = surface_stats(m, 10.0, 10000.0);
    CHECK(s.area_m2 == 1000.0);
    CHECK(s.surface_fraction == doctest::Approx(0.1));
    auto e = surface_stats(Mask({10, 10, 10.0}, 0), 10.0, 10000.0);
    CHECK(e.area_m2 == 0.0);
    CHECK(e.surface_fraction == 0.0);
}

TEST_CASE("area is translation invariant") {
    Mask a({8, 8, 2.0}, 0), b({8, 8, 2.0}, 0);
    for (std::size_t r = 1; r < 4; ++r)
        for (std::size_t c = 1; c < 5; ++c) {
            a.at(c, r) = 1;
            b.at(c + 3, r + 4) = 1;
        }
    CHECK(surface_stats(a, 2.0, 100.0).area_m2 == surface_stats(b, 2.0, 100.0).area_m2);
}

TEST_CASE("mask covering the nominal contour has fraction near one") {
    AoiPolygon circle = synth_aoi(SynthSpec{}, 720);
    const GridShape shape = SynthSpec{}.grid();
    auto aoi = prepare_aoi(circle, shape, 10);
    auto s = surface_stats(aoi.nominal, shape.cell_size, circle.area());
    double perimeter = 2.0 * 3.141592653589793 * std::sqrt(circle.area() / 3.141592653589793);
    const double band = perimeter * shape.cell_size / circle.area();
    CHECK(std::abs(s.surface_fraction - 1.0) <= band);
}

TEST_CASE("segment_scene reproduces the truth mask at zero noise") {
    SynthSpec spec;
    const auto dem = synth_dem(spec);
    const auto aoi = synth_aoi(spec);
    for (double level : {815.0, 833.0, 846.0}) {
        auto sc = synth_scene(dem, level, spec, parse_date("2022-06-01"));
        auto w = segment_scene(sc.scene, aoi, SegmentConfig{});
        CHECK(w.index_used == IndexKind::Wcwi);
        CHECK(w.water == sc.truth);
    }
}

TEST_CASE("mss scenes fall back to ndwi") {
    SynthSpec spec;
    spec.sensor_id = "landsat_mss";
    const auto dem = synth_dem(spec);
    auto sc = synth_scene(dem, 830.0, spec, parse_date("1976-06-01"));
    CHECK(select_index(sc.scene) == IndexKind::Ndwi);
    auto w = segment_scene(sc.scene, synth_aoi(spec), SegmentConfig{});
    CHECK(w.index_used == IndexKind::Ndwi);
    CHECK(w.water == sc.truth);
}

TEST_CASE("all-land scene is flagged unusable") {
    SynthSpec spec;
    const auto dem = synth_dem(spec);
    auto sc = synth_scene(dem, spec.bed_min - 1.0, spec, parse_date("2022-06-01"));
    CHECK(count_true(sc.truth) == 0);
    CHECK_THROWS_AS(segment_scene(sc.scene, synth_aoi(spec), SegmentConfig{}), DegenerateError);
}

TEST_CASE("all-land scene with noise yields a small fraction or is unusable") {
    SynthSpec spec;
    spec.noise_sd = 0.02;
    const auto dem = synth_dem(spec);
    auto sc = synth_scene(dem, spec.bed_min - 1.0, spec, parse_date("2022-06-01"));
    try {
        auto w = segment_scene(sc.scene, synth_aoi(spec), SegmentConfig{});
        CHECK(w.surface_fraction < 1.0);  // Otsu splits noise; the result is never near-full
    } catch (const DegenerateError&) {
        CHECK(true);
    }
}

TEST_CASE("iou and boundary f1") {
    auto a = mask_from(4, 4, {0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0});
    CHECK(mask_iou(a, a) == 1.0);
    CHECK(boundary_f1(a, a, 1) == 1.0);
    auto shifted = mask_from(4, 4, {0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0});
    CHECK(mask_iou(a, shifted) == doctest::Approx(2.0 / 6.0));
    CHECK(boundary_f1(a, shifted, 1) == 1.0);
    CHECK(boundary_f1(a, shifted, 0) == doctest::Approx(0.5));
    auto empty = mask_from(4, 4, std::vector<std::uint8_t>(16, 0));
    CHECK(boundary_f1(empty, empty, 1) == 1.0);
    CHECK(boundary_f1(a, empty, 1) == 0.0);
    // off-grid neighbours count as boundary
    auto full = mask_from(2, 2, {1, 1, 1, 1});
    CHECK(count_true(boundary_pixels(full)) == 4);
}

}  // TEST_SUITE
