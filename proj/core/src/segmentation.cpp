#include "resvol/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "resvol/error.hpp"

namespace resvol {

double Histogram::edge(std::size_t k) const noexcept {
    const std::size_t n = counts.size();
    if (k == 0) return lo;
    if (k >= n) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n);
}

std::size_t Histogram::bin_of(double v) const noexcept {
    const std::size_t n = counts.size();
    const double pos = (v - lo) / (hi - lo) * static_cast<double>(n);
    long guess = static_cast<long>(std::ceil(pos)) - 1;
    std::size_t k = static_cast<std::size_t>(std::clamp(guess, 0L, static_cast<long>(n) - 1));
    // Settle against the exact edges used for thresholding.
    while (k > 0 && v <= edge(k)) --k;
    while (k + 1 < n && v > edge(k + 1)) ++k;
    return k;
}

std::uint64_t Histogram::total() const noexcept {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

Histogram build_histogram(std::span<const double> values, std::size_t bin_count) {
    if (bin_count < 2) throw PipelineError("histogram needs at least 2 bins");
    if (values.size() < 2) throw DegenerateError("histogram needs at least 2 contributing pixels");
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    if (!(*mx > *mn)) throw DegenerateError("degenerate histogram: all contributing values are identical");
    Histogram h{*mn, *mx, std::vector<std::uint64_t>(bin_count, 0)};
    for (double v : values) ++h.counts[h.bin_of(v)];
    return h;
}

Histogram build_histogram(const IndexRaster& index, const Mask& aoi, std::size_t bin_count) {
    std::vector<double> vals;
    vals.reserve(index.values.size());
    for (std::size_t i = 0; i < index.values.size(); ++i) {
        if (index.valid_mask[i] && aoi[i]) vals.push_back(index.values[i]);
    }
    return build_histogram(vals, bin_count);
}

OtsuResult otsu(const Histogram& h) {
    using boost::multiprecision::int512_t;
    const std::size_t n = h.bin_count();
    if (n < 2 || !(h.hi > h.lo)) throw DegenerateError("degenerate histogram");
    const std::uint64_t total = h.total();
    if (total == 0) throw DegenerateError("empty histogram");

    int512_t sum_all = 0;
    for (std::size_t b = 0; b < n; ++b) sum_all += int512_t(h.counts[b]) * b;

    // Between-class variance in bin-index units is proportional to D^2 / (n0 n1)
    // with D = n1*S0 - n0*S1; compare candidates by cross-multiplication.
    int512_t best_num = -1;
    int512_t best_den = 1;
    std::size_t best = 0;
    int512_t n0 = 0;
    int512_t s0 = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        n0 += h.counts[k];
        s0 += int512_t(h.counts[k]) * k;
        const int512_t n1 = int512_t(total) - n0;
        int512_t num = 0;
        int512_t den = 1;
        if (n0 > 0 && n1 > 0) {
            const int512_t d = n1 * s0 - n0 * (sum_all - s0);
            num = d * d;
            den = n0 * n1;
        }
        if (num * best_den > best_num * den) {
            best_num = num;
            best_den = den;
            best = k;
        }
    }
    return {best, h.edge(best + 1)};
}

double otsu_threshold(const Histogram& h) { return otsu(h).threshold; }

ClassVariances class_variances(const Histogram& h, std::size_t split_bin) {
    const std::size_t n = h.bin_count();
    const double width = (h.hi - h.lo) / static_cast<double>(n);
    double w0 = 0, w1 = 0, m0 = 0, m1 = 0;
    for (std::size_t b = 0; b < n; ++b) {
        const double c = static_cast<double>(h.counts[b]);
        const double x = h.lo + (static_cast<double>(b) + 0.5) * width;
        if (b <= split_bin) {
            w0 += c;
            m0 += c * x;
        } else {
            w1 += c;
            m1 += c * x;
        }
    }
    const double total = w0 + w1;
    const double mean = (m0 + m1) / total;
    m0 = w0 > 0 ? m0 / w0 : 0.0;
    m1 = w1 > 0 ? m1 / w1 : 0.0;
    double var0 = 0, var1 = 0, var_total = 0;
    for (std::size_t b = 0; b < n; ++b) {
        const double c = static_cast<double>(h.counts[b]);
        const double x = h.lo + (static_cast<double>(b) + 0.5) * width;
        var_total += c * (x - mean) * (x - mean);
        if (b <= split_bin) var0 += c * (x - m0) * (x - m0);
        else var1 += c * (x - m1) * (x - m1);
    }
    ClassVariances out;
    const double p0 = w0 / total;
    const double p1 = w1 / total;
    out.between = p0 * p1 * (m0 - m1) * (m0 - m1);
    out.within = (var0 + var1) / total;
    out.total = var_total / total;
    return out;
}

Mask apply_threshold(const IndexRaster& index, double t, const Mask& aoi) {
    Mask m(index.shape, 0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = (index.valid_mask[i] && aoi[i] && index.values[i] > t) ? 1 : 0;
    }
    return m;
}

Mask clean_mask(const Mask& mask, std::size_t min_component_size) {
    if (min_component_size <= 1) return mask;
    const auto& s = mask.shape;
    Mask out = mask;
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<std::size_t> component;
    std::deque<std::size_t> queue;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || seen[start]) continue;
        component.clear();
        queue.push_back(start);
        seen[start] = 1;
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            component.push_back(i);
            const long c = static_cast<long>(i % s.ncols);
            const long r = static_cast<long>(i / s.ncols);
            for (long dr = -1; dr <= 1; ++dr) {
                for (long dc = -1; dc <= 1; ++dc) {
                    const long nc = c + dc, nr = r + dr;
                    if (nc < 0 || nr < 0 || nc >= static_cast<long>(s.ncols) || nr >= static_cast<long>(s.nrows))
                        continue;
                    const std::size_t j = static_cast<std::size_t>(nr) * s.ncols + static_cast<std::size_t>(nc);
                    if (mask[j] && !seen[j]) {
                        seen[j] = 1;
                        queue.push_back(j);
                    }
                }
            }
        }
        if (component.size() < min_component_size) {
            for (auto i : component) out[i] = 0;
        }
    }
    return out;
}

Mask dilate(const Mask& mask, std::size_t radius) {
    if (radius == 0) return mask;
    const auto& s = mask.shape;
    const long rad = static_cast<long>(radius);
    Mask horiz(s, 0);
    for (std::size_t r = 0; r < s.nrows; ++r) {
        long last = -(rad + 1) * 4;  // column of the last true pixel seen, left to right
        for (long c = 0; c < static_cast<long>(s.ncols); ++c) {
            if (mask.at(c, r)) last = c;
            if (c - last <= rad) horiz.at(c, r) = 1;
        }
        last = std::numeric_limits<long>::max() / 2;
        for (long c = static_cast<long>(s.ncols) - 1; c >= 0; --c) {
            if (mask.at(c, r)) last = c;
            if (last - c <= rad) horiz.at(c, r) = 1;
        }
    }
    Mask out(s, 0);
    for (std::size_t c = 0; c < s.ncols; ++c) {
        long last = -(rad + 1) * 4;
        for (long r = 0; r < static_cast<long>(s.nrows); ++r) {
            if (horiz.at(c, r)) last = r;
            if (r - last <= rad) out.at(c, r) = 1;
        }
        last = std::numeric_limits<long>::max() / 2;
        for (long r = static_cast<long>(s.nrows) - 1; r >= 0; --r) {
            if (horiz.at(c, r)) last = r;
            if (last - r <= rad) out.at(c, r) = 1;
        }
    }
    return out;
}

WaterMask surface_stats(const Mask& mask, double cell_size, double nominal_area_m2) {
    if (!(nominal_area_m2 > 0)) throw PipelineError("nominal area must be positive");
    WaterMask w;
    w.water = mask;
    w.area_m2 = static_cast<double>(count_true(mask)) * cell_size * cell_size;
    w.surface_fraction = w.area_m2 / nominal_area_m2;
    return w;
}

AoiMasks prepare_aoi(const AoiPolygon& poly, const GridShape& shape, std::size_t dilation) {
    AoiMasks a;
    a.nominal = rasterize_polygon(poly, shape);
    const auto cells = count_true(a.nominal);
    if (cells == 0) throw InputError("AOI polygon covers no cell centers of the scene grid");
    a.nominal_area_m2 = static_cast<double>(cells) * shape.cell_area();
    a.support = dilate(a.nominal, dilation);
    return a;
}

IndexKind select_index(const Scene& scene) {
    return scene.sensor.has_swir() ? IndexKind::Wcwi : IndexKind::Ndwi;
}

WaterMask segment_scene(const Scene& scene, const AoiMasks& aoi, const SegmentConfig& config) {
    if (!(aoi.support.shape == scene.shape())) throw InputError("AOI grid does not match scene grid");
    const IndexKind kind = select_index(scene);
    const auto index = compute_index(scene, kind);
    const auto hist = build_histogram(index, aoi.support, config.bins);
    const double t = otsu_threshold(hist);
    auto water = clean_mask(apply_threshold(index, t, aoi.support), config.min_component_size);
    auto result = surface_stats(water, scene.shape().cell_size, aoi.nominal_area_m2);
    result.threshold_used = t;
    result.index_used = kind;
    return result;
}

WaterMask segment_scene(const Scene& scene, const AoiPolygon& aoi, const SegmentConfig& config) {
    return segment_scene(scene, prepare_aoi(aoi, scene.shape(), config.aoi_dilation), config);
}

double mask_iou(const Mask& a, const Mask& b) {
    if (!(a.shape == b.shape)) throw PipelineError("mask shapes differ");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        inter += a[i] && b[i];
        uni += a[i] || b[i];
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Mask boundary_pixels(const Mask& m) {
    const auto& s = m.shape;
    Mask out(s, 0);
    for (std::size_t r = 0; r < s.nrows; ++r) {
        for (std::size_t c = 0; c < s.ncols; ++c) {
            if (!m.at(c, r)) continue;
            const bool edge = c == 0 || r == 0 || c + 1 == s.ncols || r + 1 == s.nrows || !m.at(c - 1, r) ||
                              !m.at(c + 1, r) || !m.at(c, r - 1) || !m.at(c, r + 1);
            out.at(c, r) = edge ? 1 : 0;
        }
    }
    return out;
}

namespace {

// Fraction of `from` boundary pixels with a `to` boundary pixel within tol.
double matched_fraction(const Mask& from, const Mask& to, std::size_t tol) {
    const auto near = dilate(to, tol);
    std::size_t hit = 0, n = 0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        if (!from[i]) continue;
        ++n;
        hit += near[i] != 0;
    }
    return n == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(n);
}

}  // namespace

double boundary_f1(const Mask& predicted, const Mask& truth, std::size_t tolerance) {
    if (!(predicted.shape == truth.shape)) throw PipelineError("mask shapes differ");
    const auto bp = boundary_pixels(predicted);
    const auto bt = boundary_pixels(truth);
    const auto np = count_true(bp), nt = count_true(bt);
    if (np == 0 && nt == 0) return 1.0;
    if (np == 0 || nt == 0) return 0.0;
    const double precision = matched_fraction(bp, bt, tolerance);
    const double recall = matched_fraction(bt, bp, tolerance);
    return precision + recall == 0 ? 0.0 : 2 * precision * recall / (precision + recall);
}

}  // namespace resvol
