#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "resvol/date.hpp"
#include "resvol/grid.hpp"
#include "resvol/hypsometry.hpp"
#include "resvol/raster_io.hpp"

namespace resvol {

enum class DemShape { Cone, Bowl, Ramp };

std::string_view dem_shape_name(DemShape s);

// Reflectance per band role, ordered Green, NIR, SWIR1, SWIR2.
struct Spectra {
    std::array<double, 4> water{0.30, 0.02, 0.01, 0.01};
    std::array<double, 4> land{0.12, 0.35, 0.30, 0.25};
};

// Parametric reservoir. Radial shapes put the deepest point (bed_min) at the grid
// center with bed = bed_min + relief * (r / R)^power, R half the shorter grid side;
// Cone forces power 1. Ramp rises linearly in x from bed_min to bed_min + relief.
struct SynthSpec {
    DemShape shape = DemShape::Bowl;
    double power = 2.0;
    std::size_t ncols = 100;
    std::size_t nrows = 100;
    double cell_size = 30.0;
    double bed_min = 800.0;
    double relief = 60.0;
    double spillway_level = 848.0;
    std::string sensor_id = "sentinel2";
    Spectra spectra;
    double noise_sd = 0.0;
    std::uint64_t seed = 42;

    GridShape grid() const { return {ncols, nrows, cell_size}; }
};

// Throws InputError on inconsistent parameters.
void validate(const SynthSpec& spec);

// Bed elevation at a point in grid coordinates.
double synth_bed(const SynthSpec& spec, double x, double y);
Dem synth_dem(const SynthSpec& spec);

// Closed-form inundated area and volume at level h, from the continuous surface.
LevelStats analytic_level_stats(const SynthSpec& spec, double h);

// Nominal contour (bed == spillway_level) as a polygon.
AoiPolygon synth_aoi(const SynthSpec& spec, std::size_t vertices = 360);

struct SynthScene {
    Scene scene;
    Mask truth;
};

// Pixel wet iff bed < level. stream selects an independent noise sequence.
SynthScene synth_scene(const Dem& dem, double level, const SynthSpec& spec, Date date, std::uint64_t stream = 0);

struct LevelTrajectory {
    // level(t) = mean + amplitude * sin(2 pi t / period_days + phase) + trend_per_year * t / 365.25
    double mean = 833.0;
    double amplitude = 10.0;
    double period_days = 365.25;
    double phase = 0.0;
    double trend_per_year = 0.0;

    double level(double t_days) const;
};

struct CampaignSpec {
    Date start{std::chrono::year{2021}, std::chrono::January, std::chrono::day{3}};
    long span_days = 1092;
    std::size_t n_dates = 120;
    LevelTrajectory trajectory;
};

struct CampaignEntry {
    Date date;
    double level = 0.0;
    SynthScene scene;
    double truth_area_m2 = 0.0;
    double truth_volume_m3 = 0.0;
    double truth_fraction = 0.0;
};

// Dated scenes plus closed-form truth at each level.
std::vector<CampaignEntry> synth_campaign(const SynthSpec& spec, const CampaignSpec& campaign);

struct FixtureOptions {
    std::size_t sounding_stride = 2;  // keep every k-th row and column of cell centers
    std::size_t aoi_vertices = 360;
    std::size_t holdout_year_offset = 2;  // year index (from campaign start) held out for evaluation
};

// Writes scenes/, manifest.txt, aoi.txt, soundings.txt, gauge.csv, truth.csv and
// config.txt under dir so the CLI can consume it like real data.
void write_fixture(const std::filesystem::path& dir, const SynthSpec& spec, const CampaignSpec& campaign,
                   const FixtureOptions& options = {});

}  // namespace resvol
