#include "resvol/raster_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "resvol/error.hpp"
#include "text_util.hpp"

namespace resvol {

using detail::fmt_num;
using detail::lower;
using detail::split_ws;
using detail::to_double;
using detail::trim;

BandGrid parse_ascii_grid(std::istream& in) {
    std::optional<double> ncols, nrows, cellsize, nodata;
    std::string line;
    std::size_t lineno = 0;

    for (int k = 0; k < 4; ++k) {
        if (!std::getline(in, line)) throw ParseError(lineno + 1, "truncated grid header");
        ++lineno;
        auto toks = split_ws(line);
        if (toks.size() != 2) throw ParseError(lineno, "expected '<key> <value>' header line");
        const std::string key = lower(toks[0]);
        auto value = to_double(toks[1]);
        if (!value) throw ParseError(lineno, "non-numeric header value '" + std::string(toks[1]) + "'");
        std::optional<double>* slot = nullptr;
        if (key == "ncols") slot = &ncols;
        else if (key == "nrows") slot = &nrows;
        else if (key == "cellsize") slot = &cellsize;
        else if (key == "nodata_value") slot = &nodata;
        else throw ParseError(lineno, "unknown header key '" + std::string(toks[0]) + "'");
        if (slot->has_value()) throw ParseError(lineno, "duplicate header key '" + key + "'");
        *slot = *value;
    }
    auto whole = [](double v) { return v >= 1 && v == std::floor(v) && v < 1e9; };
    if (!whole(*ncols) || !whole(*nrows)) throw ParseError(lineno, "ncols/nrows must be positive integers");
    if (!(*cellsize > 0)) throw ParseError(lineno, "cellsize must be positive");

    BandGrid g;
    g.shape = GridShape{static_cast<std::size_t>(*ncols), static_cast<std::size_t>(*nrows), *cellsize};
    g.nodata_value = *nodata;
    g.values.reserve(g.shape.size());

    std::size_t rows_read = 0;
    while (rows_read < g.shape.nrows && std::getline(in, line)) {
        ++lineno;
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != g.shape.ncols) {
            throw ParseError(lineno, "row has " + std::to_string(toks.size()) + " values, expected " +
                                         std::to_string(g.shape.ncols));
        }
        for (auto t : toks) {
            auto v = to_double(t);
            if (!v) throw ParseError(lineno, "non-numeric value '" + std::string(t) + "'");
            g.values.push_back(*v);
        }
        ++rows_read;
    }
    if (rows_read != g.shape.nrows) {
        throw ParseError(lineno, "expected " + std::to_string(g.shape.nrows) + " rows, found " +
                                     std::to_string(rows_read));
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty()) throw ParseError(lineno, "unexpected data after last row");
    }
    return g;
}

BandGrid parse_ascii_grid(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_ascii_grid(in);
}

BandGrid read_ascii_grid(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    try {
        return parse_ascii_grid(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
}

void write_ascii_grid(std::ostream& out, const BandGrid& g) {
    out << "ncols " << g.shape.ncols << '\n'
        << "nrows " << g.shape.nrows << '\n'
        << "cellsize " << fmt_num(g.shape.cell_size) << '\n'
        << "nodata_value " << fmt_num(g.nodata_value) << '\n';
    std::string row;
    for (std::size_t r = 0; r < g.shape.nrows; ++r) {
        row.clear();
        for (std::size_t c = 0; c < g.shape.ncols; ++c) {
            if (c) row += ' ';
            row += fmt_num(g.values[r * g.shape.ncols + c]);
        }
        out << row << '\n';
    }
}

std::string serialize_ascii_grid(const BandGrid& g) {
    std::ostringstream out;
    write_ascii_grid(out, g);
    return out.str();
}

void write_ascii_grid(const std::filesystem::path& path, const BandGrid& g) {
    auto out = detail::open_out(path);
    write_ascii_grid(out, g);
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

BandGrid mask_to_grid(const Mask& mask) {
    BandGrid g;
    g.shape = mask.shape;
    g.nodata_value = -1;
    g.values.assign(mask.values.begin(), mask.values.end());
    return g;
}

std::string_view role_name(BandRole role) {
    switch (role) {
        case BandRole::Green: return "Green";
        case BandRole::Nir: return "NIR";
        case BandRole::Swir1: return "SWIR1";
        case BandRole::Swir2: return "SWIR2";
    }
    return "?";
}

std::optional<BandRole> parse_role(std::string_view name) {
    const auto n = lower(name);
    for (auto r : kAllRoles) {
        if (lower(role_name(r)) == n) return r;
    }
    return std::nullopt;
}

std::span<const SensorProfile> registered_sensors() {
    static const std::vector<SensorProfile> profiles{
        {"sentinel2", {"B3", "B8", "B11", "B12"}},
        {"landsat9", {"B3", "B5", "B6", "B7"}},
        {"landsat8", {"B3", "B5", "B6", "B7"}},
        {"landsat7", {"B2", "B4", "B5", "B7"}},
        {"landsat_tm", {"B2", "B4", "B5", "B7"}},
        {"landsat_mss", {"B4", "B6", "", ""}},
    };
    return profiles;
}

const SensorProfile& sensor_profile(std::string_view sensor_id) {
    for (const auto& p : registered_sensors()) {
        if (p.sensor_id == sensor_id) return p;
    }
    throw InputError("unknown sensor '" + std::string(sensor_id) + "'");
}

const BandGrid& Scene::band(BandRole r) const {
    const auto& b = bands[static_cast<std::size_t>(r)];
    if (!b) throw InputError("required role " + std::string(role_name(r)) + " absent");
    return *b;
}

Scene make_scene(Date date, const SensorProfile& sensor, std::array<std::optional<BandGrid>, 4> bands) {
    std::optional<GridShape> shape;
    for (auto r : kAllRoles) {
        auto& b = bands[static_cast<std::size_t>(r)];
        if (sensor.has_role(r) && !b) {
            throw InputError("required role " + std::string(role_name(r)) + " absent");
        }
        if (!sensor.has_role(r) && b) {
            throw InputError("sensor " + sensor.sensor_id + " has no " + std::string(role_name(r)) + " band");
        }
        if (!b) continue;
        if (b->values.size() != b->shape.size()) throw InputError("band value count does not match shape");
        if (!shape) {
            shape = b->shape;
        } else if (!(*shape == b->shape)) {
            throw InputError("band " + std::string(role_name(r)) + " dimensions differ from other bands");
        }
    }
    if (!shape) throw InputError("scene has no bands");

    Scene s{date, sensor, std::move(bands), Mask(*shape, 1)};
    for (auto& b : s.bands) {
        if (!b) continue;
        for (std::size_t i = 0; i < b->values.size(); ++i) {
            double& v = b->values[i];
            if (v == b->nodata_value) {
                s.valid_mask[i] = 0;
            } else if (!std::isfinite(v) || v < kMinReflectance || v > kMaxReflectance) {
                v = b->nodata_value;
                s.valid_mask[i] = 0;
            }
        }
    }
    return s;
}

std::vector<ManifestEntry> parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = std::string_view(line);
        if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        auto toks = split_ws(body);
        if (toks.empty()) continue;

        std::optional<Date> date;
        std::optional<std::string> sensor;
        ManifestEntry e;
        for (auto tok : toks) {
            auto eq = tok.find('=');
            if (eq == std::string_view::npos || eq == 0 || eq + 1 == tok.size()) {
                throw ParseError(lineno, "expected key=value, got '" + std::string(tok) + "'");
            }
            auto key = tok.substr(0, eq);
            auto value = tok.substr(eq + 1);
            if (lower(key) == "date") {
                try {
                    date = parse_date(value);
                } catch (const ParseError& err) {
                    throw ParseError(lineno, err.what());
                }
            } else if (lower(key) == "sensor") {
                sensor = std::string(value);
            } else if (auto role = parse_role(key)) {
                for (auto& [r, _] : e.bands) {
                    if (r == *role) throw ParseError(lineno, "duplicate role " + std::string(key));
                }
                e.bands.emplace_back(*role, detail::resolve(base_dir, std::filesystem::path(std::string(value))));
            } else {
                throw ParseError(lineno, "unknown manifest key '" + std::string(key) + "'");
            }
        }
        if (!date) throw ParseError(lineno, "missing date");
        if (!sensor) throw ParseError(lineno, "missing sensor");
        e.date = *date;
        e.sensor_id = *sensor;
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    try {
        return parse_manifest(in, path.parent_path());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
}

void write_manifest(std::ostream& out, std::span<const ManifestEntry> entries) {
    for (const auto& e : entries) {
        out << "date=" << format_date(e.date) << " sensor=" << e.sensor_id;
        for (const auto& [role, path] : e.bands) out << ' ' << role_name(role) << '=' << path.generic_string();
        out << '\n';
    }
}

Scene load_scene(const ManifestEntry& entry) {
    const auto& profile = sensor_profile(entry.sensor_id);
    std::array<std::optional<BandGrid>, 4> bands;
    for (const auto& [role, path] : entry.bands) bands[static_cast<std::size_t>(role)] = read_ascii_grid(path);
    for (auto r : {BandRole::Green, BandRole::Nir}) {
        if (!bands[static_cast<std::size_t>(r)]) {
            throw InputError("required role " + std::string(role_name(r)) + " absent");
        }
    }
    return make_scene(entry.date, profile, std::move(bands));
}

namespace {

double signed_area(const std::vector<Point2>& v) {
    double acc = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    return 0.5 * acc;
}

}  // namespace

AoiPolygon::AoiPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() > 1 && vertices_.front() == vertices_.back()) vertices_.pop_back();
    for (const auto& p : vertices_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InputError("polygon vertex is not finite");
    }
    auto distinct = vertices_;
    std::sort(distinct.begin(), distinct.end(),
              [](const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw InputError("polygon needs at least 3 distinct vertices");
    if (signed_area(vertices_) == 0.0) throw InputError("polygon encloses zero area");
}

double AoiPolygon::area() const noexcept { return std::abs(signed_area(vertices_)); }

AoiPolygon parse_aoi(std::istream& in) {
    std::vector<Point2> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = split_ws(line);
        if (toks.empty() || toks[0].front() == '#') continue;
        if (toks.size() != 2) throw ParseError(lineno, "expected 'x y' vertex");
        auto x = to_double(toks[0]);
        auto y = to_double(toks[1]);
        if (!x || !y) throw ParseError(lineno, "non-numeric vertex coordinate");
        pts.push_back({*x, *y});
    }
    return AoiPolygon(std::move(pts));
}

AoiPolygon read_aoi(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    try {
        return parse_aoi(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
}

void write_aoi(std::ostream& out, const AoiPolygon& poly) {
    for (const auto& p : poly.vertices()) out << fmt_num(p.x) << ' ' << fmt_num(p.y) << '\n';
}

bool point_in_polygon(const AoiPolygon& poly, Point2 p) {
    const auto& v = poly.vertices();
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const auto& a = v[i];
        const auto& b = v[j];
        // Half-open in y: an edge counts when it straddles p.y with the lower end included.
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

Mask rasterize_polygon(const AoiPolygon& poly, const GridShape& shape) {
    // Scanline form of point_in_polygon: same crossing abscissae, so identical parity.
    Mask m(shape, 0);
    const auto& v = poly.vertices();
    std::vector<double> crossings;
    for (std::size_t r = 0; r < shape.nrows; ++r) {
        const double y = shape.center_y(r);
        crossings.clear();
        for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
            const auto& a = v[i];
            const auto& b = v[j];
            if ((a.y > y) != (b.y > y)) crossings.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
        std::sort(crossings.begin(), crossings.end());
        // Cell is inside when an odd number of crossings lie strictly to its right.
        std::size_t k = 0;
        for (std::size_t c = 0; c < shape.ncols; ++c) {
            const double x = shape.center_x(c);
            while (k < crossings.size() && crossings[k] <= x) ++k;
            m.at(c, r) = ((crossings.size() - k) % 2 == 1) ? 1 : 0;
        }
    }
    return m;
}

}  // namespace resvol
