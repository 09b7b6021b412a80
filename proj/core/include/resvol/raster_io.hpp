#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "resvol/date.hpp"
#include "resvol/grid.hpp"

namespace resvol {

// A single band of values with a nodata sentinel. Used for reflectance bands,
// index exports, DEMs and day-count maps alike.
struct BandGrid {
    GridShape shape;
    double nodata_value = -9999.0;
    std::vector<double> values;

    bool is_nodata(std::size_t i) const noexcept { return values[i] == nodata_value; }
    bool operator==(const BandGrid&) const = default;
};

// ASCII grid: `ncols`, `nrows`, `cellsize`, `nodata_value` header lines (any order,
// case-insensitive keys) followed by nrows rows of ncols numbers, top row first.
BandGrid parse_ascii_grid(std::istream& in);
BandGrid parse_ascii_grid(std::string_view text);
BandGrid read_ascii_grid(const std::filesystem::path& path);
void write_ascii_grid(std::ostream& out, const BandGrid& grid);
std::string serialize_ascii_grid(const BandGrid& grid);
void write_ascii_grid(const std::filesystem::path& path, const BandGrid& grid);

// 0/1 export of a mask.
BandGrid mask_to_grid(const Mask& mask);

enum class BandRole { Green = 0, Nir = 1, Swir1 = 2, Swir2 = 3 };
inline constexpr std::array<BandRole, 4> kAllRoles{BandRole::Green, BandRole::Nir, BandRole::Swir1,
                                                   BandRole::Swir2};

std::string_view role_name(BandRole role);
std::optional<BandRole> parse_role(std::string_view name);

struct SensorProfile {
    std::string sensor_id;
    // Source band label per role, empty when the sensor lacks that role.
    std::array<std::string, 4> band_labels;

    bool has_role(BandRole r) const { return !band_labels[static_cast<std::size_t>(r)].empty(); }
    bool has_swir() const { return has_role(BandRole::Swir1) && has_role(BandRole::Swir2); }
};

std::span<const SensorProfile> registered_sensors();
// Throws InputError for unknown ids.
const SensorProfile& sensor_profile(std::string_view sensor_id);

// Reflectance outside this range is treated as nodata.
inline constexpr double kMinReflectance = -0.2;
inline constexpr double kMaxReflectance = 1.2;

struct Scene {
    Date date;
    SensorProfile sensor;
    std::array<std::optional<BandGrid>, 4> bands;
    Mask valid_mask;

    const GridShape& shape() const { return valid_mask.shape; }
    bool has_band(BandRole r) const { return bands[static_cast<std::size_t>(r)].has_value(); }
    // Throws InputError when the role is absent.
    const BandGrid& band(BandRole r) const;
};

// Validates roles against the profile and shared dimensions, coerces out-of-range
// reflectance to nodata and derives the valid mask.
Scene make_scene(Date date, const SensorProfile& sensor, std::array<std::optional<BandGrid>, 4> bands);

struct ManifestEntry {
    Date date;
    std::string sensor_id;
    std::vector<std::pair<BandRole, std::filesystem::path>> bands;
};

// One scene per line: `date=YYYY-MM-DD sensor=<id> Green=<path> NIR=<path> ...`.
// Relative paths resolve against base_dir. Blank lines and `#` comments are skipped.
std::vector<ManifestEntry> parse_manifest(std::istream& in, const std::filesystem::path& base_dir);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, std::span<const ManifestEntry> entries);

Scene load_scene(const ManifestEntry& entry);

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point2&) const = default;
};

// Closed ring in grid coordinates. Construction rejects degenerate rings.
class AoiPolygon {
public:
    explicit AoiPolygon(std::vector<Point2> vertices);
    const std::vector<Point2>& vertices() const noexcept { return vertices_; }
    // Unsigned shoelace area.
    double area() const noexcept;

private:
    std::vector<Point2> vertices_;
};

// One `x y` pair per line; a repeated closing vertex is accepted.
AoiPolygon parse_aoi(std::istream& in);
AoiPolygon read_aoi(const std::filesystem::path& path);
void write_aoi(std::ostream& out, const AoiPolygon& poly);

// Even-odd test on cell centers. Left and bottom edges count as inside,
// right and top edges as outside.
bool point_in_polygon(const AoiPolygon& poly, Point2 p);
Mask rasterize_polygon(const AoiPolygon& poly, const GridShape& shape);

}  // namespace resvol
