#include "resvol/config.hpp"

#include <cmath>
#include <functional>
#include <istream>
#include <map>

#include "resvol/error.hpp"
#include "text_util.hpp"

namespace resvol {

namespace {

double as_double(const std::string& key, const std::string& v) {
    auto d = detail::to_double(v);
    if (!d) throw ConfigError(key, "expected a number, got '" + v + "'");
    return *d;
}

double in_range(const std::string& key, const std::string& v, double lo, double hi, bool lo_open = false) {
    const double d = as_double(key, v);
    if (d > hi || d < lo || (lo_open && d == lo)) {
        throw ConfigError(key, "value " + v + " out of range " + (lo_open ? "(" : "[") + detail::fmt_num(lo) + ", " +
                                   detail::fmt_num(hi) + "]");
    }
    return d;
}

std::size_t as_count(const std::string& key, const std::string& v, std::size_t lo, std::size_t hi) {
    auto n = detail::to_int<std::size_t>(v);
    if (!n) throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
    if (*n < lo || *n > hi) {
        throw ConfigError(key, "value " + v + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return *n;
}

int as_year(const std::string& key, const std::string& v) {
    auto n = detail::to_int<int>(v);
    if (!n || *n < 1 || *n > 9999) throw ConfigError(key, "expected a calendar year, got '" + v + "'");
    return *n;
}

bool as_bool(const std::string& key, const std::string& v) {
    const auto l = detail::lower(v);
    if (l == "true" || l == "1" || l == "yes") return true;
    if (l == "false" || l == "0" || l == "no") return false;
    throw ConfigError(key, "expected true/false, got '" + v + "'");
}

std::vector<double> as_list(const std::string& key, const std::string& v, double lo, bool lo_open) {
    std::vector<double> out;
    for (auto part : detail::split(v, ',')) {
        out.push_back(in_range(key, std::string(detail::trim(part)), lo, 1e300, lo_open));
    }
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
}

std::array<double, 4> as_spectrum(const std::string& key, const std::string& v) {
    const auto parts = detail::split(v, ',');
    if (parts.size() != 4) throw ConfigError(key, "expected 4 comma-separated reflectances (Green,NIR,SWIR1,SWIR2)");
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) out[i] = in_range(key, std::string(detail::trim(parts[i])), 0.0, 1.0);
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value,
                                  const std::filesystem::path& base)>;

std::filesystem::path as_path(const std::string& v, const std::filesystem::path& base) {
    return detail::resolve(base, std::filesystem::path(v));
}

const std::map<std::string, Setter>& setters() {
    using P = std::filesystem::path;
    static const std::map<std::string, Setter> table{
        {"manifest", [](RunConfig& c, auto&, auto& v, const P& b) { c.manifest = as_path(v, b); }},
        {"aoi", [](RunConfig& c, auto&, auto& v, const P& b) { c.aoi = as_path(v, b); }},
        {"soundings", [](RunConfig& c, auto&, auto& v, const P& b) { c.soundings = as_path(v, b); }},
        {"curve", [](RunConfig& c, auto&, auto& v, const P& b) { c.curve = as_path(v, b); }},
        {"gauge", [](RunConfig& c, auto&, auto& v, const P& b) { c.gauge = as_path(v, b); }},
        {"truth", [](RunConfig& c, auto&, auto& v, const P& b) { c.truth = as_path(v, b); }},
        {"model", [](RunConfig& c, auto&, auto& v, const P& b) { c.model = as_path(v, b); }},
        {"out", [](RunConfig& c, auto&, auto& v, const P& b) { c.out_dir = as_path(v, b); }},
        {"seed",
         [](RunConfig& c, auto& k, auto& v, const P&) {
             auto n = detail::to_int<std::uint64_t>(v);
             if (!n) throw ConfigError(k, "expected a non-negative integer seed");
             c.seed = *n;
         }},
        {"segment.bins", [](RunConfig& c, auto& k, auto& v, const P&) { c.segment.bins = as_count(k, v, 2, 65536); }},
        {"segment.min_component_size",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.segment.min_component_size = as_count(k, v, 1, 1u << 30); }},
        {"segment.aoi_dilation",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.segment.aoi_dilation = as_count(k, v, 0, 100000); }},
        {"segment.write_masks", [](RunConfig& c, auto& k, auto& v, const P&) { c.write_masks = as_bool(k, v); }},
        {"hypso.levels", [](RunConfig& c, auto& k, auto& v, const P&) { c.hypso_levels = as_count(k, v, 2, 1000000); }},
        {"hypso.spillway", [](RunConfig& c, auto& k, auto& v, const P&) { c.hypso_spillway = as_double(k, v); }},
        {"hypso.ncols", [](RunConfig& c, auto& k, auto& v, const P&) { c.hypso_ncols = as_count(k, v, 1, 1u << 20); }},
        {"hypso.nrows", [](RunConfig& c, auto& k, auto& v, const P&) { c.hypso_nrows = as_count(k, v, 1, 1u << 20); }},
        {"hypso.cell_size",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.hypso_cell_size = in_range(k, v, 0, 1e9, true); }},
        {"train.source",
         [](RunConfig& c, auto& k, auto& v, const P&) {
             const auto l = detail::lower(v);
             if (l == "auto") c.train_source = TrainSource::Auto;
             else if (l == "gauge") c.train_source = TrainSource::Gauge;
             else if (l == "curve") c.train_source = TrainSource::Curve;
             else throw ConfigError(k, "expected auto, gauge or curve");
         }},
        {"train.fraction", [](RunConfig& c, auto& k, auto& v, const P&) { c.train_fraction = in_range(k, v, 0, 1, true); }},
        {"train.holdout_year", [](RunConfig& c, auto& k, auto& v, const P&) { c.holdout_year = as_year(k, v); }},
        {"train.c_grid", [](RunConfig& c, auto& k, auto& v, const P&) { c.grid.c_grid = as_list(k, v, 0, true); }},
        {"train.epsilon_grid",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.grid.epsilon_grid = as_list(k, v, 0, false); }},
        {"train.gamma_grid", [](RunConfig& c, auto& k, auto& v, const P&) { c.grid.gamma_grid = as_list(k, v, 0, true); }},
        {"train.folds", [](RunConfig& c, auto& k, auto& v, const P&) { c.grid.folds = as_count(k, v, 2, 1000); }},
        {"train.tolerance",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.grid.solver.tolerance = in_range(k, v, 0, 1, true); }},
        {"train.max_iter",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.grid.solver.max_iter = as_count(k, v, 1, 1u << 31); }},
        {"train.threads", [](RunConfig& c, auto& k, auto& v, const P&) { c.grid.threads = as_count(k, v, 0, 1024); }},
        {"evaluate.year", [](RunConfig& c, auto& k, auto& v, const P&) { c.evaluate_year = as_year(k, v); }},
        {"evaluate.mape_max",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.thresholds.mape_max = in_range(k, v, 0, 100, true); }},
        {"evaluate.rsr_max",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.thresholds.rsr_max = in_range(k, v, 0, 10, true); }},
        {"evaluate.r2_min", [](RunConfig& c, auto& k, auto& v, const P&) { c.thresholds.r2_min = in_range(k, v, -1e9, 1); }},
        {"evaluate.pbias_max",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.thresholds.pbias_abs_max = in_range(k, v, 0, 100, true); }},
        {"persistence.year", [](RunConfig& c, auto& k, auto& v, const P&) { c.persistence_year = as_year(k, v); }},
        {"persistence.permanent_days",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.persistence.permanent_days = in_range(k, v, 0, 366); }},
        {"persistence.ephemeral_days",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.persistence.ephemeral_days = in_range(k, v, 0, 366); }},
        {"report.title", [](RunConfig& c, auto& k, auto& v, const P&) {
             if (v.find_first_of("<>&") != std::string::npos) throw ConfigError(k, "title may not contain <, > or &");
             c.report_title = v;
         }},
        {"synth.shape",
         [](RunConfig& c, auto& k, auto& v, const P&) {
             const auto l = detail::lower(v);
             if (l == "cone") c.synth.shape = DemShape::Cone;
             else if (l == "bowl") c.synth.shape = DemShape::Bowl;
             else if (l == "ramp") c.synth.shape = DemShape::Ramp;
             else throw ConfigError(k, "expected cone, bowl or ramp");
         }},
        {"synth.power", [](RunConfig& c, auto& k, auto& v, const P&) { c.synth.power = in_range(k, v, 0, 100, true); }},
        {"synth.ncols", [](RunConfig& c, auto& k, auto& v, const P&) { c.synth.ncols = as_count(k, v, 4, 8192); }},
        {"synth.nrows", [](RunConfig& c, auto& k, auto& v, const P&) { c.synth.nrows = as_count(k, v, 4, 8192); }},
        {"synth.cell_size",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.synth.cell_size = in_range(k, v, 0, 1e6, true); }},
        {"synth.bed_min", [](RunConfig& c, auto& k, auto& v, const P&) { c.synth.bed_min = as_double(k, v); }},
        {"synth.relief", [](RunConfig& c, auto& k, auto& v, const P&) { c.synth.relief = in_range(k, v, 0, 1e5, true); }},
        {"synth.spillway", [](RunConfig& c, auto& k, auto& v, const P&) { c.synth.spillway_level = as_double(k, v); }},
        {"synth.sensor",
         [](RunConfig& c, auto& k, auto& v, const P&) {
             try {
                 sensor_profile(v);
             } catch (const InputError&) {
                 throw ConfigError(k, "unknown sensor '" + v + "'");
             }
             c.synth.sensor_id = v;
         }},
        {"synth.noise_sd", [](RunConfig& c, auto& k, auto& v, const P&) { c.synth.noise_sd = in_range(k, v, 0, 1); }},
        {"synth.seed",
         [](RunConfig& c, auto& k, auto& v, const P&) {
             auto n = detail::to_int<std::uint64_t>(v);
             if (!n) throw ConfigError(k, "expected a non-negative integer seed");
             c.synth_seed = *n;
         }},
        {"synth.water", [](RunConfig& c, auto& k, auto& v, const P&) { c.synth.spectra.water = as_spectrum(k, v); }},
        {"synth.land", [](RunConfig& c, auto& k, auto& v, const P&) { c.synth.spectra.land = as_spectrum(k, v); }},
        {"synth.start",
         [](RunConfig& c, auto& k, auto& v, const P&) {
             try {
                 c.campaign.start = parse_date(v);
             } catch (const ParseError& e) {
                 throw ConfigError(k, e.what());
             }
         }},
        {"synth.span_days",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.campaign.span_days = static_cast<long>(as_count(k, v, 0, 100000)); }},
        {"synth.n_dates", [](RunConfig& c, auto& k, auto& v, const P&) { c.campaign.n_dates = as_count(k, v, 1, 100000); }},
        {"synth.level_mean", [](RunConfig& c, auto& k, auto& v, const P&) { c.campaign.trajectory.mean = as_double(k, v); }},
        {"synth.level_amplitude",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.campaign.trajectory.amplitude = in_range(k, v, 0, 1e5); }},
        {"synth.period_days",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.campaign.trajectory.period_days = in_range(k, v, 0, 1e6, true); }},
        {"synth.phase", [](RunConfig& c, auto& k, auto& v, const P&) { c.campaign.trajectory.phase = as_double(k, v); }},
        {"synth.trend_per_year",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.campaign.trajectory.trend_per_year = as_double(k, v); }},
        {"synth.sounding_stride",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.fixture.sounding_stride = as_count(k, v, 1, 1024); }},
        {"synth.aoi_vertices",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.fixture.aoi_vertices = as_count(k, v, 3, 100000); }},
        {"synth.holdout_year_offset",
         [](RunConfig& c, auto& k, auto& v, const P&) { c.fixture.holdout_year_offset = as_count(k, v, 0, 1000); }},
    };
    return table;
}

void check_cross_fields(const RunConfig& c) {
    if (c.persistence.ephemeral_days > c.persistence.permanent_days) {
        throw ConfigError("persistence.ephemeral_days", "must not exceed persistence.permanent_days");
    }
    try {
        validate(c.synth);
    } catch (const InputError& e) {
        throw ConfigError("synth", e.what());
    }
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir) {
    const auto& table = setters();
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown configuration key");
    if (value.empty()) throw ConfigError(key, "empty value");
    it->second(config, key, value, base_dir);
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    RunConfig c;
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = std::string_view(line);
        if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = detail::trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key(detail::trim(body.substr(0, eq)));
        const std::string value(detail::trim(body.substr(eq + 1)));
        if (auto [it, fresh] = seen.emplace(key, lineno); !fresh) {
            throw ConfigError(key, "set twice (lines " + std::to_string(it->second) + " and " + std::to_string(lineno) + ")");
        }
        apply_setting(c, key, value, base_dir);
    }
    check_cross_fields(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
    return parse_config(in, path.parent_path());
}

std::filesystem::path model_path(const RunConfig& config) {
    return config.model ? *config.model : config.out_dir / "model.txt";
}

}  // namespace resvol
