#include "resvol/timeseries.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <tuple>

#include "resvol/error.hpp"
#include "text_util.hpp"

namespace resvol {

using detail::fmt_num;

namespace {

bool key_less(const SeriesRecord& a, const SeriesRecord& b) {
    return std::tie(a.date, a.sensor_id) < std::tie(b.date, b.sensor_id);
}

constexpr std::string_view kSeriesHeader = "date,sensor,index,threshold,area_m2,surface_fraction,volume_m3,extrapolated";

}  // namespace

std::vector<SeriesRecord> build_series(std::vector<SeriesRecord> records) {
    std::stable_sort(records.begin(), records.end(), key_less);
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].date == records[i - 1].date && records[i].sensor_id == records[i - 1].sensor_id) {
            throw InputError("duplicate series record for " + format_date(records[i].date) + " / " +
                             records[i].sensor_id);
        }
    }
    return records;
}

SeriesExtremes volume_extremes(std::span<const SeriesRecord> series) {
    if (series.empty()) throw PipelineError("empty series has no extremes");
    SeriesExtremes e;
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i].volume_m3 > series[e.max_index].volume_m3) e.max_index = i;
        if (series[i].volume_m3 < series[e.min_index].volume_m3) e.min_index = i;
    }
    return e;
}

void write_series_csv(std::ostream& out, std::span<const SeriesRecord> series) {
    out << kSeriesHeader << '\n';
    for (const auto& r : series) {
        out << format_date(r.date) << ',' << r.sensor_id << ',' << index_name(r.index_used) << ','
            << fmt_num(r.threshold) << ',' << fmt_num(r.area_m2) << ',' << fmt_num(r.surface_fraction) << ','
            << fmt_num(r.volume_m3) << ',' << (r.extrapolated ? 1 : 0) << '\n';
    }
}

std::vector<SeriesRecord> parse_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != kSeriesHeader) {
        throw ParseError(1, "expected series header '" + std::string(kSeriesHeader) + "'");
    }
    std::vector<SeriesRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        const auto f = detail::split(body, ',');
        if (f.size() != 8) throw ParseError(lineno, "expected 8 fields");
        SeriesRecord r;
        try {
            r.date = parse_date(f[0]);
        } catch (const ParseError& e) {
            throw ParseError(lineno, e.what());
        }
        r.sensor_id = std::string(f[1]);
        auto kind = parse_index_kind(f[2]);
        if (!kind) throw ParseError(lineno, "unknown index '" + std::string(f[2]) + "'");
        r.index_used = *kind;
        auto num = [&](std::string_view s) {
            auto v = detail::to_double(s);
            if (!v) throw ParseError(lineno, "non-numeric field '" + std::string(s) + "'");
            return *v;
        };
        r.threshold = num(f[3]);
        r.area_m2 = num(f[4]);
        r.surface_fraction = num(f[5]);
        r.volume_m3 = num(f[6]);
        if (f[7] != "0" && f[7] != "1") throw ParseError(lineno, "extrapolated must be 0 or 1");
        r.extrapolated = f[7] == "1";
        out.push_back(std::move(r));
    }
    return out;
}

void export_series_csv(const std::filesystem::path& path, std::span<const SeriesRecord> series) {
    auto out = detail::open_out(path);
    write_series_csv(out, series);
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

std::vector<SeriesRecord> read_series_csv(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    try {
        return parse_series_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
}

std::string_view persistence_class_name(PersistenceClass c) {
    switch (c) {
        case PersistenceClass::Dry: return "dry";
        case PersistenceClass::Ephemeral: return "ephemeral";
        case PersistenceClass::Seasonal: return "seasonal";
        case PersistenceClass::Permanent: return "permanent";
    }
    return "?";
}

std::size_t PersistenceMap::count(PersistenceClass c) const {
    return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), c));
}

PersistenceMap persistence(std::span<const DatedMask> masks, int year, const PersistenceThresholds& thresholds) {
    std::vector<const DatedMask*> obs;
    for (const auto& m : masks) {
        if (year_of(m.date) == year) obs.push_back(&m);
    }
    if (obs.empty()) throw InputError("no observations in year " + std::to_string(year));
    std::sort(obs.begin(), obs.end(), [](const DatedMask* a, const DatedMask* b) {
        return std::tie(a->date, a->sensor_id) < std::tie(b->date, b->sensor_id);
    });
    const GridShape shape = obs.front()->water.shape;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (!(obs[i]->water.shape == shape)) throw InputError("persistence masks do not share a grid");
        if (i > 0 && obs[i]->date == obs[i - 1]->date && obs[i]->sensor_id == obs[i - 1]->sensor_id) {
            throw InputError("duplicate persistence observation " + format_date(obs[i]->date));
        }
    }

    const double year_days = days_in_year(year);
    PersistenceMap map;
    map.year = year;
    map.shape = shape;
    map.observations = obs.size();
    map.days_water.assign(shape.size(), 0.0);
    std::vector<std::uint8_t> ever(shape.size(), 0);

    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double d = day_of_year(obs[i]->date);
        const double start = i == 0 ? 0.0 : (day_of_year(obs[i - 1]->date) + d + 1.0) / 2.0;
        const double end = i + 1 == obs.size() ? year_days : (d + day_of_year(obs[i + 1]->date) + 1.0) / 2.0;
        const double span = end - start;
        const auto& w = obs[i]->water.values;
        for (std::size_t p = 0; p < w.size(); ++p) {
            if (!w[p]) continue;
            map.days_water[p] += span;
            ever[p] = 1;
        }
    }

    map.classes.resize(shape.size());
    for (std::size_t p = 0; p < shape.size(); ++p) {
        const double days = map.days_water[p];
        if (!ever[p]) map.classes[p] = PersistenceClass::Dry;
        else if (days > thresholds.permanent_days) map.classes[p] = PersistenceClass::Permanent;
        else if (days < thresholds.ephemeral_days) map.classes[p] = PersistenceClass::Ephemeral;
        else map.classes[p] = PersistenceClass::Seasonal;
    }
    return map;
}

BandGrid persistence_to_grid(const PersistenceMap& map) {
    BandGrid g;
    g.shape = map.shape;
    g.nodata_value = -1.0;
    g.values = map.days_water;
    return g;
}

}  // namespace resvol
