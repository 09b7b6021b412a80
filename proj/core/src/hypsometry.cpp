#include "resvol/hypsometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "resvol/error.hpp"
#include "resvol/numeric.hpp"
#include "text_util.hpp"

namespace resvol {

using detail::fmt_num;

SoundingSet::SoundingSet(std::vector<Sounding> points) : points_(std::move(points)) {
    if (points_.empty()) throw InputError("sounding set is empty");
    for (const auto& p : points_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.bed_elevation)) {
            throw InputError("sounding with non-finite coordinate");
        }
    }
}

SoundingSet parse_soundings(std::istream& in) {
    std::vector<Sounding> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0].front() == '#') continue;
        if (toks.size() != 3) throw ParseError(lineno, "expected 'x y elevation'");
        auto x = detail::to_double(toks[0]);
        auto y = detail::to_double(toks[1]);
        auto z = detail::to_double(toks[2]);
        if (!x || !y || !z) throw ParseError(lineno, "non-numeric sounding");
        pts.push_back({*x, *y, *z});
    }
    return SoundingSet(std::move(pts));
}

SoundingSet read_soundings(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    try {
        return parse_soundings(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
}

void write_soundings(std::ostream& out, const SoundingSet& s) {
    for (const auto& p : s.points()) {
        out << fmt_num(p.x) << ' ' << fmt_num(p.y) << ' ' << fmt_num(p.bed_elevation) << '\n';
    }
}

double Dem::min_bed() const { return *std::min_element(bed.begin(), bed.end()); }
double Dem::max_bed() const { return *std::max_element(bed.begin(), bed.end()); }

BandGrid dem_to_grid(const Dem& dem) {
    BandGrid g;
    g.shape = dem.shape;
    g.nodata_value = -9999.0;
    g.values = dem.bed;
    return g;
}

namespace {

// Static 2-d tree over sounding indices. Queries return the nearest point,
// lowest index among equidistant points.
class KdTree {
public:
    explicit KdTree(const std::vector<Sounding>& pts) : pts_(pts), order_(pts.size()) {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        build(0, order_.size(), 0);
    }

    std::size_t nearest(double x, double y) const {
        Best best;
        search(0, order_.size(), 0, x, y, best);
        return best.index;
    }

private:
    struct Best {
        double d2 = std::numeric_limits<double>::infinity();
        std::size_t index = std::numeric_limits<std::size_t>::max();
    };

    double coord(std::size_t i, int axis) const { return axis == 0 ? pts_[i].x : pts_[i].y; }

    void build(std::size_t lo, std::size_t hi, int axis) {
        if (hi - lo <= 1) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                         [&](std::size_t a, std::size_t b) {
                             const double ca = coord(a, axis), cb = coord(b, axis);
                             return ca < cb || (ca == cb && a < b);
                         });
        build(lo, mid, 1 - axis);
        build(mid + 1, hi, 1 - axis);
    }

    void search(std::size_t lo, std::size_t hi, int axis, double x, double y, Best& best) const {
        if (lo >= hi) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        const std::size_t i = order_[mid];
        const double dx = pts_[i].x - x, dy = pts_[i].y - y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best.d2 || (d2 == best.d2 && i < best.index)) best = {d2, i};
        const double delta = (axis == 0 ? x : y) - coord(i, axis);
        const bool left_first = delta <= 0;
        if (left_first) search(lo, mid, 1 - axis, x, y, best);
        else search(mid + 1, hi, 1 - axis, x, y, best);
        // <= keeps equidistant candidates on the far side reachable for the tie rule.
        if (delta * delta <= best.d2) {
            if (left_first) search(mid + 1, hi, 1 - axis, x, y, best);
            else search(lo, mid, 1 - axis, x, y, best);
        }
    }

    const std::vector<Sounding>& pts_;
    std::vector<std::size_t> order_;
};

}  // namespace

Dem nn_interpolate(const SoundingSet& soundings, const GridShape& shape) {
    if (shape.size() == 0 || !(shape.cell_size > 0)) throw InputError("invalid DEM grid shape");
    const KdTree tree(soundings.points());
    Dem dem{shape, std::vector<double>(shape.size())};
    for (std::size_t r = 0; r < shape.nrows; ++r) {
        const double y = shape.center_y(r);
        for (std::size_t c = 0; c < shape.ncols; ++c) {
            dem.bed[r * shape.ncols + c] = soundings.points()[tree.nearest(shape.center_x(c), y)].bed_elevation;
        }
    }
    return dem;
}

LevelStats level_area_volume(const Dem& dem, double h) {
    std::size_t wet = 0;
    CompensatedSum depth;
    for (double b : dem.bed) {
        if (b < h) {
            ++wet;
            depth += h - b;
        }
    }
    const double a = dem.cell_area();
    return {static_cast<double>(wet) * a, depth.value() * a};
}

HypsometricCurve::HypsometricCurve(std::vector<CurveRow> rows) : rows_(std::move(rows)) {
    if (rows_.size() < 2) throw InputError("hypsometric curve needs at least 2 rows");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (!std::isfinite(r.level) || !std::isfinite(r.area_m2) || !std::isfinite(r.volume_m3) || r.area_m2 < 0 ||
            r.volume_m3 < 0) {
            throw InputError("curve row " + std::to_string(i) + " has invalid values");
        }
        if (i == 0) continue;
        const auto& p = rows_[i - 1];
        if (!(r.level > p.level)) throw InputError("curve levels must be strictly increasing (row " + std::to_string(i) + ")");
        if (r.area_m2 < p.area_m2 || r.volume_m3 < p.volume_m3) {
            throw InputError("curve area/volume must be nondecreasing in level (row " + std::to_string(i) + ")");
        }
    }
}

namespace {

double lerp(double x0, double x1, double y0, double y1, double x) {
    if (x == x0) return y0;
    if (x == x1) return y1;
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

}  // namespace

double HypsometricCurve::volume_at(double level) const {
    if (!(level >= min_level() && level <= max_level())) {
        throw LookupError("level " + fmt_num(level) + " outside curve range [" + fmt_num(min_level()) + ", " +
                          fmt_num(max_level()) + "]");
    }
    auto it = std::lower_bound(rows_.begin(), rows_.end(), level,
                               [](const CurveRow& r, double v) { return r.level < v; });
    if (it->level == level) return it->volume_m3;
    const auto& lo = *(it - 1);
    return lerp(lo.level, it->level, lo.volume_m3, it->volume_m3, level);
}

double HypsometricCurve::area_at(double level) const {
    if (!(level >= min_level() && level <= max_level())) {
        throw LookupError("level " + fmt_num(level) + " outside curve range");
    }
    auto it = std::lower_bound(rows_.begin(), rows_.end(), level,
                               [](const CurveRow& r, double v) { return r.level < v; });
    if (it->level == level) return it->area_m2;
    const auto& lo = *(it - 1);
    return lerp(lo.level, it->level, lo.area_m2, it->area_m2, level);
}

double HypsometricCurve::volume_from_area(double area) const {
    if (!(area >= rows_.front().area_m2 && area <= rows_.back().area_m2)) {
        throw LookupError("area " + fmt_num(area) + " outside curve range [" + fmt_num(rows_.front().area_m2) +
                          ", " + fmt_num(rows_.back().area_m2) + "]");
    }
    // Rows sharing exactly this area: unique only if they also share the volume.
    auto first = std::lower_bound(rows_.begin(), rows_.end(), area,
                                  [](const CurveRow& r, double v) { return r.area_m2 < v; });
    auto last = std::upper_bound(first, rows_.end(), area,
                                 [](double v, const CurveRow& r) { return v < r.area_m2; });
    if (first != last) {
        if ((last - 1)->volume_m3 != first->volume_m3) {
            throw LookupError("ambiguous area lookup: plateau at area " + fmt_num(area) + " between levels " +
                              fmt_num(first->level) + " and " + fmt_num((last - 1)->level));
        }
        return first->volume_m3;
    }
    const auto& hi = *first;
    const auto& lo = *(first - 1);
    return lerp(lo.area_m2, hi.area_m2, lo.volume_m3, hi.volume_m3, area);
}

HypsometricCurve build_curve(const Dem& dem, std::span<const double> levels) {
    if (levels.size() < 2) throw InputError("need at least 2 levels");
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (!(levels[i] > levels[i - 1])) throw InputError("levels must be strictly increasing without duplicates");
    }
    std::vector<CurveRow> rows;
    rows.reserve(levels.size());
    for (double h : levels) {
        const auto s = level_area_volume(dem, h);
        rows.push_back({h, s.area_m2, s.volume_m3});
    }
    return HypsometricCurve(std::move(rows));
}

std::vector<double> uniform_levels(double lo, double hi, std::size_t count) {
    if (count < 2 || !(hi > lo)) throw InputError("uniform_levels needs count >= 2 and hi > lo");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

void write_curve_csv(std::ostream& out, const HypsometricCurve& curve) {
    out << "level,area_m2,volume_m3\n";
    for (const auto& r : curve.rows()) {
        out << fmt_num(r.level) << ',' << fmt_num(r.area_m2) << ',' << fmt_num(r.volume_m3) << '\n';
    }
}

HypsometricCurve parse_curve_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty curve file");
    ++lineno;
    if (detail::trim(line) != "level,area_m2,volume_m3") throw ParseError(1, "expected header level,area_m2,volume_m3");
    std::vector<CurveRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto f = detail::split(detail::trim(line), ',');
        if (f.size() != 3) throw ParseError(lineno, "expected 3 fields");
        auto l = detail::to_double(f[0]);
        auto a = detail::to_double(f[1]);
        auto v = detail::to_double(f[2]);
        if (!l || !a || !v) throw ParseError(lineno, "non-numeric curve field");
        rows.push_back({*l, *a, *v});
    }
    return HypsometricCurve(std::move(rows));
}

HypsometricCurve read_curve_csv(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    try {
        return parse_curve_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
}

std::vector<VolumeSample> make_samples(const HypsometricCurve& curve, std::span<const double> levels) {
    if (!(curve.capacity_volume() > 0) || !(curve.nominal_area() > 0)) {
        throw PipelineError("curve has zero capacity or nominal area");
    }
    std::vector<VolumeSample> out;
    out.reserve(levels.size());
    for (double h : levels) {
        VolumeSample s;
        s.surface_fraction = curve.area_at(h) / curve.nominal_area();
        s.relative_volume = curve.volume_at(h) / curve.capacity_volume();
        s.level = h;
        out.push_back(s);
    }
    return out;
}

}  // namespace resvol
