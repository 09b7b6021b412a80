#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "resvol/metrics.hpp"
#include "resvol/regression.hpp"
#include "resvol/segmentation.hpp"
#include "resvol/synth.hpp"
#include "resvol/timeseries.hpp"

namespace resvol {

enum class TrainSource { Auto, Gauge, Curve };

// Every key has a default; see README for the key reference.
struct RunConfig {
    // Input paths, resolved against the config file's directory.
    std::optional<std::filesystem::path> manifest;
    std::optional<std::filesystem::path> aoi;
    std::optional<std::filesystem::path> soundings;
    std::optional<std::filesystem::path> curve;
    std::optional<std::filesystem::path> gauge;
    std::optional<std::filesystem::path> truth;
    std::optional<std::filesystem::path> model;  // default <out>/model.txt

    std::filesystem::path out_dir = "resvol_out";
    std::uint64_t seed = 42;  // split, folds and (by default) synthetic noise

    SegmentConfig segment;
    bool write_masks = false;

    std::size_t hypso_levels = 200;
    std::optional<double> hypso_spillway;
    std::optional<std::size_t> hypso_ncols;
    std::optional<std::size_t> hypso_nrows;
    std::optional<double> hypso_cell_size;

    TrainSource train_source = TrainSource::Auto;
    double train_fraction = 0.8;
    std::optional<int> holdout_year;
    GridSearchSpec grid;

    std::optional<int> evaluate_year;
    MetricThresholds thresholds;

    PersistenceThresholds persistence;
    std::optional<int> persistence_year;

    std::string report_title = "Reservoir storage report";

    SynthSpec synth;
    std::optional<std::uint64_t> synth_seed;  // falls back to seed
    CampaignSpec campaign;
    FixtureOptions fixture;
};

// key = value lines, `#` comments. Unknown keys and out-of-range values throw
// ConfigError naming the key.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);
void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir);

std::filesystem::path model_path(const RunConfig& config);

}  // namespace resvol
