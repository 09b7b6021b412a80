#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "resvol/grid.hpp"
#include "resvol/raster_io.hpp"

namespace resvol {

enum class IndexKind { Ndwi, AweiNsh, Wcwi };

std::string_view index_name(IndexKind kind);
std::optional<IndexKind> parse_index_kind(std::string_view name);

// Per-pixel index values; entries outside valid_mask are unspecified.
struct IndexRaster {
    IndexKind kind = IndexKind::Ndwi;
    GridShape shape;
    std::vector<double> values;
    Mask valid_mask;
};

// (Green - NIR) / (Green + NIR); nullopt when the denominator is zero.
std::optional<double> ndwi_value(double green, double nir);
// 4 (Green - SWIR1) - (0.25 NIR + 2.75 SWIR2)
double aweinsh_value(double green, double nir, double swir1, double swir2);
// 0.8 AWEInsh + 0.2 NDWI; nullopt wherever NDWI is undefined.
std::optional<double> wcwi_value(double green, double nir, double swir1, double swir2);

IndexRaster ndwi(const Scene& scene);
// Throw UnsupportedIndexError when the sensor has no SWIR bands.
IndexRaster aweinsh(const Scene& scene);
IndexRaster wcwi(const Scene& scene);
IndexRaster compute_index(const Scene& scene, IndexKind kind);

BandGrid index_to_grid(const IndexRaster& index, double nodata_value = -9999.0);

}  // namespace resvol
