#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "resvol/date.hpp"
#include "resvol/grid.hpp"
#include "resvol/indices.hpp"
#include "resvol/raster_io.hpp"

namespace resvol {

struct SeriesRecord {
    Date date;
    std::string sensor_id;
    IndexKind index_used = IndexKind::Wcwi;
    double threshold = 0.0;
    double area_m2 = 0.0;
    double surface_fraction = 0.0;
    double volume_m3 = 0.0;
    bool extrapolated = false;
    bool operator==(const SeriesRecord&) const = default;
};

// Sorted by (date, sensor); duplicate keys throw InputError. No infill.
std::vector<SeriesRecord> build_series(std::vector<SeriesRecord> records);

struct SeriesExtremes {
    std::size_t max_index = 0;
    std::size_t min_index = 0;
};
// By volume, first occurrence wins. Series must be non-empty.
SeriesExtremes volume_extremes(std::span<const SeriesRecord> series);

// Header: date,sensor,index,threshold,area_m2,surface_fraction,volume_m3,extrapolated
void write_series_csv(std::ostream& out, std::span<const SeriesRecord> series);
std::vector<SeriesRecord> parse_series_csv(std::istream& in);
void export_series_csv(const std::filesystem::path& path, std::span<const SeriesRecord> series);
std::vector<SeriesRecord> read_series_csv(const std::filesystem::path& path);

struct DatedMask {
    Date date;
    std::string sensor_id;
    Mask water;
};

struct PersistenceThresholds {
    double permanent_days = 300.0;  // strictly more
    double ephemeral_days = 150.0;  // strictly fewer, among pixels ever wet
};

enum class PersistenceClass : std::uint8_t { Dry = 0, Ephemeral = 1, Seasonal = 2, Permanent = 3 };

std::string_view persistence_class_name(PersistenceClass c);

struct PersistenceMap {
    int year = 0;
    GridShape shape;
    std::size_t observations = 0;
    std::vector<double> days_water;
    std::vector<PersistenceClass> classes;

    std::size_t count(PersistenceClass c) const;
};

// Each observation in the year stands for the span between the midpoints to its
// neighbours (first and last extend to the year edges). Days are counted in
// half-day resolution: a date is the unit interval [doy, doy + 1).
PersistenceMap persistence(std::span<const DatedMask> masks, int year, const PersistenceThresholds& thresholds = {});

// Day counts as an ASCII grid.
BandGrid persistence_to_grid(const PersistenceMap& map);

}  // namespace resvol
