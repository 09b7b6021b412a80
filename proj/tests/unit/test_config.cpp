#include <doctest.h>

#include <sstream>

#include "resvol/config.hpp"
#include "resvol/error.hpp"
#include "test_support.hpp"

using namespace resvol;

namespace {

RunConfig parse(const std::string& text, const std::filesystem::path& base = "/base") {
    std::istringstream in(text);
    return parse_config(in, base);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
    RunConfig c;
    CHECK(c.segment.bins == 256);
    CHECK(c.segment.min_component_size == 1);
    CHECK(c.segment.aoi_dilation == 10);
    CHECK(c.hypso_levels == 200);
    CHECK(c.train_fraction == 0.8);
    CHECK(c.grid.folds == 10);
    CHECK(c.persistence.permanent_days == 300);
    CHECK(c.persistence.ephemeral_days == 150);
    CHECK(model_path(c) == std::filesystem::path("resvol_out") / "model.txt");
}

TEST_CASE("parsing keys, comments and relative paths") {
    auto c = parse(
        "# run settings\n"
        "manifest = scenes/manifest.txt\n"
        "aoi=/abs/aoi.txt   # trailing comment\n"
        "\n"
        "out = results\n"
        "seed = 7\n"
        "segment.bins = 128\n"
        "segment.write_masks = true\n"
        "train.c_grid = 1, 10\n"
        "train.source = curve\n"
        "evaluate.year = 2023\n"
        "report.title = Lake Test\n");
    CHECK(*c.manifest == std::filesystem::path("/base/scenes/manifest.txt"));
    CHECK(*c.aoi == std::filesystem::path("/abs/aoi.txt"));
    CHECK(c.out_dir == std::filesystem::path("/base/results"));
    CHECK(c.seed == 7);
    CHECK(c.segment.bins == 128);
    CHECK(c.write_masks);
    CHECK(c.grid.c_grid == std::vector<double>{1, 10});
    CHECK(c.train_source == TrainSource::Curve);
    CHECK(c.evaluate_year == 2023);
    CHECK(c.report_title == "Lake Test");
    CHECK(model_path(c) == std::filesystem::path("/base/results/model.txt"));
}

TEST_CASE("seed does not depend on key order") {
    auto a = parse("seed = 9\nsynth.seed = 3\n");
    auto b = parse("synth.seed = 3\nseed = 9\n");
    CHECK(a.seed == b.seed);
    CHECK(a.synth_seed == b.synth_seed);
}

TEST_CASE("every out-of-range setting names its key") {
    const std::vector<std::pair<std::string, std::string>> bad{
        {"seed", "-1"},
        {"segment.bins", "1"},
        {"segment.bins", "abc"},
        {"segment.min_component_size", "0"},
        {"segment.aoi_dilation", "-2"},
        {"segment.write_masks", "maybe"},
        {"hypso.levels", "1"},
        {"hypso.spillway", "high"},
        {"hypso.ncols", "0"},
        {"hypso.nrows", "0"},
        {"hypso.cell_size", "0"},
        {"train.source", "magic"},
        {"train.fraction", "0"},
        {"train.fraction", "1.5"},
        {"train.holdout_year", "nineteen"},
        {"train.c_grid", "0, 10"},
        {"train.epsilon_grid", "-0.1"},
        {"train.gamma_grid", ""},
        {"train.folds", "1"},
        {"train.tolerance", "0"},
        {"train.max_iter", "0"},
        {"evaluate.year", "0"},
        {"evaluate.mape_max", "-1"},
        {"evaluate.rsr_max", "-1"},
        {"evaluate.r2_min", "2"},
        {"evaluate.pbias_max", "-5"},
        {"persistence.permanent_days", "400"},
        {"persistence.ephemeral_days", "-1"},
        {"report.title", "<script>"},
        {"synth.shape", "pyramid"},
        {"synth.power", "0"},
        {"synth.ncols", "2"},
        {"synth.cell_size", "-1"},
        {"synth.relief", "0"},
        {"synth.sensor", "spot5"},
        {"synth.noise_sd", "-0.1"},
        {"synth.water", "0.3,0.02"},
        {"synth.start", "2021-13-01"},
        {"synth.n_dates", "0"},
        {"no.such.key", "1"},
    };
    for (const auto& [key, value] : bad) {
        CAPTURE(key);
        CAPTURE(value);
        try {
            parse(key + " = " + value + "\n");
            FAIL("accepted an invalid setting");
        } catch (const ConfigError& e) {
            CHECK(e.key() == key);
            CHECK(std::string(e.what()).find(key) != std::string::npos);
            CHECK(e.kind() == ErrorKind::Config);
        }
    }
}

TEST_CASE("cross-field checks") {
    try {
        parse("persistence.permanent_days = 100\npersistence.ephemeral_days = 200\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "persistence.ephemeral_days");
    }
    CHECK_THROWS_AS(parse("synth.spillway = 700\n"), ConfigError);
}

TEST_CASE("structural errors") {
    CHECK_THROWS_AS(parse("segment.bins 12\n"), ConfigError);
    try {
        parse("seed = 1\nseed = 2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "seed");
    }
    CHECK_THROWS_AS(load_config("/definitely/not/here.txt"), ConfigError);
}

TEST_CASE("load_config resolves against the file's directory") {
    testing::TempDir dir("config");
    testing::spit(dir / "sub/run.txt", "manifest = m.txt\n");
    auto c = load_config(dir / "sub/run.txt");
    CHECK(*c.manifest == dir / "sub/m.txt");
}

}  // TEST_SUITE
