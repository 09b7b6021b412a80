#include <doctest.h>

#include <fstream>

#include "resvol/error.hpp"
#include "resvol/pipeline.hpp"
#include "test_support.hpp"

using namespace resvol;
namespace fs = std::filesystem;

namespace {

// Small bowl fixture with a one-point hyperparameter grid so a full run stays fast.
RunConfig small_fixture(const fs::path& dir) {
    SynthSpec spec;
    spec.ncols = 30;
    spec.nrows = 30;
    spec.cell_size = 30.0;
    spec.seed = 5;
    CampaignSpec campaign;
    campaign.n_dates = 24;
    write_fixture(dir, spec, campaign);
    auto c = load_config(dir / "config.txt");
    c.out_dir = dir / "out";
    c.hypso_levels = 50;
    c.grid.c_grid = {10.0};
    c.grid.epsilon_grid = {0.01};
    c.grid.gamma_grid = {1.0};
    c.grid.folds = 2;
    c.grid.threads = 1;
    return c;
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("full run writes every output") {
    testing::TempDir dir("pipeline_run");
    const auto c = small_fixture(dir.path());
    cmd_run(c);
    for (const char* name : {outputs::kSegments, outputs::kCurve, outputs::kDem, outputs::kCvTable,
                             outputs::kTrainSummary, outputs::kSeries, outputs::kMetrics, outputs::kPairs,
                             outputs::kPersistenceSummary, outputs::kReport}) {
        CAPTURE(name);
        CHECK(fs::exists(c.out_dir / name));
    }
    CHECK(fs::exists(c.out_dir / "model.txt"));
    CHECK(line_count(c.out_dir / outputs::kSeries) == 25);
    const auto series = read_series_csv(c.out_dir / outputs::kSeries);
    for (const auto& r : series) CHECK(r.volume_m3 >= 0.0);
}

TEST_CASE("commands read prerequisites back from out") {
    testing::TempDir dir("pipeline_steps");
    const auto c = small_fixture(dir.path());
    const auto seg = cmd_segment(c);
    CHECK(seg.records.size() == 24);
    CHECK(seg.unusable.empty());
    const auto curve = cmd_hypso(c);
    CHECK(curve.capacity_volume() > 0.0);
    const auto trained = cmd_train(c);
    CHECK(trained.summary.n_train + trained.summary.n_test > 0);
    const auto series = cmd_predict(c);
    CHECK(series.size() == 24);
    const auto metrics = cmd_evaluate(c);
    CHECK(metrics.n > 1);
    cmd_report(c);
    CHECK(fs::exists(c.out_dir / outputs::kReport));
}

TEST_CASE("missing prerequisites are reported") {
    testing::TempDir dir("pipeline_missing");
    auto c = small_fixture(dir.path());

    try {
        cmd_predict(c);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("model.txt") != std::string::npos);
    }
    CHECK_THROWS_AS(cmd_report(c), InputError);

    auto no_truth = c;
    no_truth.truth.reset();
    try {
        cmd_evaluate(no_truth);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "truth");
    }

    auto no_manifest = c;
    no_manifest.manifest.reset();
    try {
        cmd_segment(no_manifest);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "manifest");
    }

    auto low_spill = c;
    low_spill.hypso_spillway = 100.0;
    try {
        cmd_hypso(low_spill);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "hypso.spillway");
    }
}

TEST_CASE("synth writes a loadable fixture") {
    testing::TempDir dir("pipeline_synth");
    RunConfig c;
    c.out_dir = dir.path();
    c.synth.ncols = 16;
    c.synth.nrows = 16;
    c.campaign.n_dates = 4;
    cmd_synth(c);
    CHECK(fs::exists(dir / "config.txt"));
    const auto loaded = load_config(dir / "config.txt");
    CHECK(loaded.manifest.has_value());
}

}  // TEST_SUITE
