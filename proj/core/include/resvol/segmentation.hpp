#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "resvol/grid.hpp"
#include "resvol/indices.hpp"
#include "resvol/raster_io.hpp"

namespace resvol {

// Uniform bins over [lo, hi]. Bin k holds values in (edge(k), edge(k+1)], except
// bin 0 which also holds lo itself.
struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::uint64_t> counts;

    std::size_t bin_count() const noexcept { return counts.size(); }
    double edge(std::size_t k) const noexcept;
    std::size_t bin_of(double v) const noexcept;
    std::uint64_t total() const noexcept;
};

// Throws DegenerateError when fewer than two distinct values contribute.
Histogram build_histogram(std::span<const double> values, std::size_t bin_count);
// Contributing pixels: index-valid and inside aoi.
Histogram build_histogram(const IndexRaster& index, const Mask& aoi, std::size_t bin_count);

struct OtsuResult {
    std::size_t split_bin = 0;  // last bin of the low class
    double threshold = 0.0;     // edge(split_bin + 1)
};

// Maximizes between-class variance over interior edges, exact in integer
// arithmetic on bin indices; ties go to the lowest edge.
OtsuResult otsu(const Histogram& h);
double otsu_threshold(const Histogram& h);

// Variances of the bin-center distribution split after split_bin.
struct ClassVariances {
    double between = 0.0;
    double within = 0.0;
    double total = 0.0;
};
ClassVariances class_variances(const Histogram& h, std::size_t split_bin);

// water iff valid && in aoi && value > t
Mask apply_threshold(const IndexRaster& index, double t, const Mask& aoi);

// Drops 8-connected components smaller than min_component_size.
Mask clean_mask(const Mask& mask, std::size_t min_component_size);

// Square (Chebyshev) dilation by radius cells.
Mask dilate(const Mask& mask, std::size_t radius);

struct WaterMask {
    Mask water;
    double threshold_used = 0.0;
    IndexKind index_used = IndexKind::Ndwi;
    double area_m2 = 0.0;
    double surface_fraction = 0.0;
};

WaterMask surface_stats(const Mask& mask, double cell_size, double nominal_area_m2);

struct SegmentConfig {
    std::size_t bins = 256;
    std::size_t min_component_size = 1;
    std::size_t aoi_dilation = 10;
};

// Nominal contour raster plus the dilated support the histogram is drawn from.
struct AoiMasks {
    Mask nominal;
    Mask support;
    double nominal_area_m2 = 0.0;
};

AoiMasks prepare_aoi(const AoiPolygon& poly, const GridShape& shape, std::size_t dilation);

// WCWI when the sensor has SWIR, NDWI otherwise.
IndexKind select_index(const Scene& scene);

WaterMask segment_scene(const Scene& scene, const AoiMasks& aoi, const SegmentConfig& config);
WaterMask segment_scene(const Scene& scene, const AoiPolygon& aoi, const SegmentConfig& config);

// Agreement measures against a reference mask.
double mask_iou(const Mask& predicted, const Mask& truth);
// Boundary pixels are true pixels with a false (or off-grid) 4-neighbour. A boundary
// pixel matches when the other boundary has a pixel within tolerance (Chebyshev).
double boundary_f1(const Mask& predicted, const Mask& truth, std::size_t tolerance = 1);
Mask boundary_pixels(const Mask& mask);

}  // namespace resvol
