#include "resvol/synth.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "resvol/error.hpp"
#include "resvol/random.hpp"
#include "text_util.hpp"

namespace resvol {

using detail::fmt_num;

std::string_view dem_shape_name(DemShape s) {
    switch (s) {
        case DemShape::Cone: return "cone";
        case DemShape::Bowl: return "bowl";
        case DemShape::Ramp: return "ramp";
    }
    return "?";
}

namespace {

double radial_power(const SynthSpec& s) { return s.shape == DemShape::Cone ? 1.0 : s.power; }

double extent_x(const SynthSpec& s) { return static_cast<double>(s.ncols) * s.cell_size; }
double extent_y(const SynthSpec& s) { return static_cast<double>(s.nrows) * s.cell_size; }
double rim_radius(const SynthSpec& s) { return 0.5 * std::min(extent_x(s), extent_y(s)); }

}  // namespace

void validate(const SynthSpec& s) {
    if (s.ncols == 0 || s.nrows == 0 || !(s.cell_size > 0)) throw InputError("synth grid must be non-empty");
    if (!(s.relief > 0)) throw InputError("synth relief must be positive");
    if (s.shape == DemShape::Bowl && !(s.power > 0)) throw InputError("synth bowl power must be positive");
    if (!(s.spillway_level > s.bed_min && s.spillway_level <= s.bed_min + s.relief)) {
        throw InputError("synth spillway must lie in (bed_min, bed_min + relief]");
    }
    if (!(s.noise_sd >= 0)) throw InputError("synth noise_sd must be >= 0");
    const auto nd = [](double g, double n) { return (g - n) / (g + n); };
    if (!(nd(s.spectra.water[0], s.spectra.water[1]) > nd(s.spectra.land[0], s.spectra.land[1]))) {
        throw InputError("synth water spectrum must have higher NDWI than land");
    }
    sensor_profile(s.sensor_id);
}

double synth_bed(const SynthSpec& s, double x, double y) {
    if (s.shape == DemShape::Ramp) return s.bed_min + s.relief * x / extent_x(s);
    const double r = std::hypot(x - 0.5 * extent_x(s), y - 0.5 * extent_y(s));
    return s.bed_min + s.relief * std::pow(r / rim_radius(s), radial_power(s));
}

Dem synth_dem(const SynthSpec& s) {
    validate(s);
    const auto g = s.grid();
    Dem dem{g, std::vector<double>(g.size())};
    for (std::size_t r = 0; r < g.nrows; ++r) {
        for (std::size_t c = 0; c < g.ncols; ++c) dem.bed[r * g.ncols + c] = synth_bed(s, g.center_x(c), g.center_y(r));
    }
    return dem;
}

LevelStats analytic_level_stats(const SynthSpec& s, double h) {
    if (!(h > s.bed_min)) return {0.0, 0.0};
    const double u = std::min((h - s.bed_min) / s.relief, 1.0);
    if (s.shape == DemShape::Ramp) {
        // Wet strip x < x_h across the full grid height.
        const double w = extent_x(s), ht = extent_y(s);
        const double xh = w * u;
        double vol = ht * s.relief * xh * xh / (2.0 * w);
        if (h > s.bed_min + s.relief) vol += ht * w * (h - s.bed_min - s.relief);
        return {ht * xh, vol};
    }
    const double p = radial_power(s);
    const double big_r = rim_radius(s);
    // A(z) = pi R^2 u(z)^(2/p); V(h) = integral of A from bed_min to h.
    const double area = std::numbers::pi * big_r * big_r * std::pow(u, 2.0 / p);
    const double vol = std::numbers::pi * big_r * big_r * s.relief * std::pow(u, 2.0 / p + 1.0) / (2.0 / p + 1.0);
    return {area, vol};
}

AoiPolygon synth_aoi(const SynthSpec& s, std::size_t vertices) {
    validate(s);
    const double u = (s.spillway_level - s.bed_min) / s.relief;
    std::vector<Point2> pts;
    if (s.shape == DemShape::Ramp) {
        const double xh = extent_x(s) * u;
        pts = {{0, 0}, {xh, 0}, {xh, extent_y(s)}, {0, extent_y(s)}};
    } else {
        const double rc = rim_radius(s) * std::pow(u, 1.0 / radial_power(s));
        const double cx = 0.5 * extent_x(s), cy = 0.5 * extent_y(s);
        for (std::size_t k = 0; k < vertices; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(vertices);
            pts.push_back({cx + rc * std::cos(a), cy + rc * std::sin(a)});
        }
    }
    return AoiPolygon(std::move(pts));
}

SynthScene synth_scene(const Dem& dem, double level, const SynthSpec& spec, Date date, std::uint64_t stream) {
    const auto& profile = sensor_profile(spec.sensor_id);
    SynthScene out;
    out.truth = Mask(dem.shape, 0);
    for (std::size_t i = 0; i < dem.bed.size(); ++i) out.truth[i] = dem.bed[i] < level ? 1 : 0;

    Rng rng(mix_seed(spec.seed, stream));
    std::array<std::optional<BandGrid>, 4> bands;
    for (auto role : kAllRoles) {
        if (!profile.has_role(role)) continue;
        const auto k = static_cast<std::size_t>(role);
        BandGrid b;
        b.shape = dem.shape;
        b.nodata_value = -9999.0;
        b.values.resize(dem.shape.size());
        for (std::size_t i = 0; i < b.values.size(); ++i) {
            const double base = out.truth[i] ? spec.spectra.water[k] : spec.spectra.land[k];
            b.values[i] = spec.noise_sd > 0 ? base + spec.noise_sd * rng.normal() : base;
        }
        bands[k] = std::move(b);
    }
    out.scene = make_scene(date, profile, std::move(bands));
    return out;
}

double LevelTrajectory::level(double t) const {
    return mean + amplitude * std::sin(2.0 * std::numbers::pi * t / period_days + phase) + trend_per_year * t / 365.25;
}

std::vector<CampaignEntry> synth_campaign(const SynthSpec& spec, const CampaignSpec& campaign) {
    validate(spec);
    if (campaign.n_dates == 0) throw InputError("campaign needs at least one date");
    const auto dem = synth_dem(spec);
    const double nominal = analytic_level_stats(spec, spec.spillway_level).area_m2;
    const long start = days_since_epoch(campaign.start);
    std::vector<CampaignEntry> out;
    out.reserve(campaign.n_dates);
    for (std::size_t i = 0; i < campaign.n_dates; ++i) {
        const long offset = campaign.n_dates == 1
                                ? 0
                                : static_cast<long>(i) * campaign.span_days / static_cast<long>(campaign.n_dates - 1);
        const double level = campaign.trajectory.level(static_cast<double>(offset));
        if (level < spec.bed_min || level > spec.spillway_level) {
            throw InputError("trajectory level " + fmt_num(level) + " outside [bed_min, spillway]");
        }
        CampaignEntry e;
        e.date = date_from_epoch_days(start + offset);
        e.level = level;
        e.scene = synth_scene(dem, level, spec, e.date, i);
        const auto truth = analytic_level_stats(spec, level);
        e.truth_area_m2 = truth.area_m2;
        e.truth_volume_m3 = truth.volume_m3;
        e.truth_fraction = truth.area_m2 / nominal;
        out.push_back(std::move(e));
    }
    return out;
}

void write_fixture(const std::filesystem::path& dir, const SynthSpec& spec, const CampaignSpec& campaign,
                   const FixtureOptions& options) {
    namespace fs = std::filesystem;
    const auto entries = synth_campaign(spec, campaign);
    const auto dem = synth_dem(spec);
    const auto g = spec.grid();

    std::vector<ManifestEntry> manifest;
    for (const auto& e : entries) {
        ManifestEntry m{e.date, spec.sensor_id, {}};
        for (auto role : kAllRoles) {
            if (!e.scene.scene.has_band(role)) continue;
            const fs::path rel = fs::path("scenes") / (format_date(e.date) + "_" + spec.sensor_id + "_" +
                                                       std::string(role_name(role)) + ".asc");
            write_ascii_grid(dir / rel, e.scene.scene.band(role));
            m.bands.emplace_back(role, rel);
        }
        manifest.push_back(std::move(m));
    }
    {
        auto out = detail::open_out(dir / "manifest.txt");
        write_manifest(out, manifest);
    }
    {
        auto out = detail::open_out(dir / "aoi.txt");
        write_aoi(out, synth_aoi(spec, options.aoi_vertices));
    }
    {
        const std::size_t stride = std::max<std::size_t>(1, options.sounding_stride);
        std::vector<Sounding> pts;
        for (std::size_t r = 0; r < g.nrows; r += stride) {
            for (std::size_t c = 0; c < g.ncols; c += stride) {
                pts.push_back({g.center_x(c), g.center_y(r), dem.bed[r * g.ncols + c]});
            }
        }
        auto out = detail::open_out(dir / "soundings.txt");
        write_soundings(out, SoundingSet(std::move(pts)));
    }
    {
        auto gauge = detail::open_out(dir / "gauge.csv");
        auto truth = detail::open_out(dir / "truth.csv");
        gauge << "date,level_m\n";
        truth << "date,level_m,area_m2,volume_m3,surface_fraction\n";
        for (const auto& e : entries) {
            gauge << format_date(e.date) << ',' << fmt_num(e.level) << '\n';
            truth << format_date(e.date) << ',' << fmt_num(e.level) << ',' << fmt_num(e.truth_area_m2) << ','
                  << fmt_num(e.truth_volume_m3) << ',' << fmt_num(e.truth_fraction) << '\n';
        }
    }
    {
        const int holdout = year_of(campaign.start) + static_cast<int>(options.holdout_year_offset);
        auto out = detail::open_out(dir / "config.txt");
        out << "# synthetic reservoir fixture (" << dem_shape_name(spec.shape) << ", seed " << spec.seed << ")\n"
            << "manifest = manifest.txt\n"
            << "aoi = aoi.txt\n"
            << "soundings = soundings.txt\n"
            << "gauge = gauge.csv\n"
            << "truth = truth.csv\n"
            << "hypso.ncols = " << g.ncols << '\n'
            << "hypso.nrows = " << g.nrows << '\n'
            << "hypso.cell_size = " << fmt_num(g.cell_size) << '\n'
            << "hypso.spillway = " << fmt_num(spec.spillway_level) << '\n'
            << "train.holdout_year = " << holdout << '\n'
            << "evaluate.year = " << holdout << '\n';
    }
}

}  // namespace resvol
