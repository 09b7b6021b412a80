#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "resvol/date.hpp"
#include "resvol/grid.hpp"
#include "resvol/raster_io.hpp"

namespace resvol {

struct Sounding {
    double x = 0.0;
    double y = 0.0;
    double bed_elevation = 0.0;
};

// Non-empty set of finite soundings in grid coordinates (meters).
class SoundingSet {
public:
    explicit SoundingSet(std::vector<Sounding> points);
    const std::vector<Sounding>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }

private:
    std::vector<Sounding> points_;
};

// One `x y elevation` triple per line.
SoundingSet parse_soundings(std::istream& in);
SoundingSet read_soundings(const std::filesystem::path& path);
void write_soundings(std::ostream& out, const SoundingSet& s);

// Bed elevation per cell (meters). Every cell is finite.
struct Dem {
    GridShape shape;
    std::vector<double> bed;

    double cell_area() const noexcept { return shape.cell_area(); }
    double min_bed() const;
    double max_bed() const;
};

BandGrid dem_to_grid(const Dem& dem);

// Each cell takes the elevation of the sounding nearest to its center; equidistant
// soundings resolve to the lowest index.
Dem nn_interpolate(const SoundingSet& soundings, const GridShape& shape);

struct LevelStats {
    double area_m2 = 0.0;
    double volume_m3 = 0.0;
};

// Cells with bed < h contribute cell_area to area and (h - bed) * cell_area to volume.
LevelStats level_area_volume(const Dem& dem, double h);

struct CurveRow {
    double level = 0.0;
    double area_m2 = 0.0;
    double volume_m3 = 0.0;
    bool operator==(const CurveRow&) const = default;
};

// Level-area-volume table with strictly increasing levels and nondecreasing area and volume.
class HypsometricCurve {
public:
    explicit HypsometricCurve(std::vector<CurveRow> rows);

    const std::vector<CurveRow>& rows() const noexcept { return rows_; }
    double capacity_volume() const noexcept { return rows_.back().volume_m3; }
    double nominal_area() const noexcept { return rows_.back().area_m2; }
    double min_level() const noexcept { return rows_.front().level; }
    double max_level() const noexcept { return rows_.back().level; }

    // Piecewise-linear lookups; LookupError outside the table.
    double volume_at(double level) const;
    double area_at(double level) const;
    // Also LookupError when the area lies on a plateau of differing volumes.
    double volume_from_area(double area_m2) const;

private:
    std::vector<CurveRow> rows_;
};

HypsometricCurve build_curve(const Dem& dem, std::span<const double> levels);
// count uniform levels from lo to hi inclusive.
std::vector<double> uniform_levels(double lo, double hi, std::size_t count);

inline double curve_volume_at(const HypsometricCurve& c, double level) { return c.volume_at(level); }
inline double curve_volume_from_area(const HypsometricCurve& c, double area) { return c.volume_from_area(area); }

// CSV with header `level,area_m2,volume_m3`.
void write_curve_csv(std::ostream& out, const HypsometricCurve& curve);
HypsometricCurve parse_curve_csv(std::istream& in);
HypsometricCurve read_curve_csv(const std::filesystem::path& path);

struct VolumeSample {
    double surface_fraction = 0.0;
    double relative_volume = 0.0;
    std::optional<double> level;
    std::optional<Date> date;
};

// Fraction of nominal area and fraction of capacity at each level.
std::vector<VolumeSample> make_samples(const HypsometricCurve& curve, std::span<const double> levels);

}  // namespace resvol
