#include "resvol/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "resvol/error.hpp"
#include "resvol/segmentation.hpp"
#include "resvol/synth.hpp"
#include "text_util.hpp"

namespace resvol {

namespace fs = std::filesystem;
using detail::fmt_num;

namespace {

const fs::path& require(const std::optional<fs::path>& p, const char* key) {
    if (!p) throw ConfigError(key, "required for this command but not set");
    return *p;
}

fs::path out_file(const RunConfig& c, const char* name) { return c.out_dir / name; }

void write_text(const fs::path& path, const std::string& text) {
    auto out = detail::open_out(path);
    out << text;
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

// Minimal header-addressed CSV reader.
class CsvTable {
public:
    CsvTable(const fs::path& path, std::initializer_list<const char*> required) : path_(path) {
        auto in = detail::open_in(path);
        std::string line;
        if (!std::getline(in, line)) throw ParseError(1, path.string() + ": empty CSV");
        const auto header = detail::split(detail::trim(line), ',');
        for (std::size_t i = 0; i < header.size(); ++i) columns_[std::string(detail::trim(header[i]))] = i;
        for (const char* name : required) {
            if (!columns_.count(name)) throw ParseError(1, path.string() + ": missing column '" + name + "'");
        }
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            const auto body = detail::trim(line);
            if (body.empty()) continue;
            auto fields = detail::split(body, ',');
            if (fields.size() != header.size()) {
                throw ParseError(lineno, path.string() + ": expected " + std::to_string(header.size()) + " fields");
            }
            rows_.push_back({lineno, {}});
            for (auto f : fields) rows_.back().second.emplace_back(detail::trim(f));
        }
    }

    std::size_t size() const { return rows_.size(); }
    const std::string& text(std::size_t row, const char* col) const { return rows_[row].second[columns_.at(col)]; }
    double number(std::size_t row, const char* col) const {
        auto v = detail::to_double(text(row, col));
        if (!v) throw ParseError(rows_[row].first, path_.string() + ": non-numeric " + col);
        return *v;
    }
    Date date(std::size_t row, const char* col) const {
        try {
            return parse_date(text(row, col));
        } catch (const ParseError& e) {
            throw ParseError(rows_[row].first, path_.string() + ": " + e.what());
        }
    }

private:
    fs::path path_;
    std::map<std::string, std::size_t> columns_;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows_;
};

void write_segments_csv(const fs::path& path, const SegmentRun& run) {
    std::ostringstream out;
    out << "date,sensor,index,threshold,area_m2,surface_fraction\n";
    for (const auto& r : run.records) {
        out << format_date(r.date) << ',' << r.sensor_id << ',' << index_name(r.index_used) << ','
            << fmt_num(r.threshold) << ',' << fmt_num(r.area_m2) << ',' << fmt_num(r.surface_fraction) << '\n';
    }
    write_text(path, out.str());
}

std::vector<SeriesRecord> read_segments_csv(const fs::path& path) {
    CsvTable t(path, {"date", "sensor", "index", "threshold", "area_m2", "surface_fraction"});
    std::vector<SeriesRecord> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        SeriesRecord r;
        r.date = t.date(i, "date");
        r.sensor_id = t.text(i, "sensor");
        auto kind = parse_index_kind(t.text(i, "index"));
        if (!kind) throw ParseError(i + 2, path.string() + ": unknown index");
        r.index_used = *kind;
        r.threshold = t.number(i, "threshold");
        r.area_m2 = t.number(i, "area_m2");
        r.surface_fraction = t.number(i, "surface_fraction");
        out.push_back(std::move(r));
    }
    return build_series(std::move(out));
}

SegmentRun segment_all(const RunConfig& c) {
    const auto manifest = read_manifest(require(c.manifest, "manifest"));
    const auto aoi = read_aoi(require(c.aoi, "aoi"));
    if (manifest.empty()) throw InputError("manifest lists no scenes");

    SegmentRun run;
    std::optional<AoiMasks> masks;
    for (const auto& entry : manifest) {
        const Scene scene = load_scene(entry);
        if (!masks || !(masks->support.shape == scene.shape())) {
            masks = prepare_aoi(aoi, scene.shape(), c.segment.aoi_dilation);
        }
        try {
            auto w = segment_scene(scene, *masks, c.segment);
            SeriesRecord r;
            r.date = scene.date;
            r.sensor_id = scene.sensor.sensor_id;
            r.index_used = w.index_used;
            r.threshold = w.threshold_used;
            r.area_m2 = w.area_m2;
            r.surface_fraction = w.surface_fraction;
            run.records.push_back(std::move(r));
            run.masks.push_back({scene.date, scene.sensor.sensor_id, std::move(w.water)});
        } catch (const DegenerateError& e) {
            run.unusable.push_back(format_date(scene.date) + "," + scene.sensor.sensor_id + "," + e.what());
        }
    }
    run.records = build_series(std::move(run.records));
    std::sort(run.masks.begin(), run.masks.end(), [](const DatedMask& a, const DatedMask& b) {
        return std::tie(a.date, a.sensor_id) < std::tie(b.date, b.sensor_id);
    });
    return run;
}

SegmentRun segment_and_write(const RunConfig& c) {
    auto run = segment_all(c);
    write_segments_csv(out_file(c, outputs::kSegments), run);
    std::string unusable = "date,sensor,reason\n";
    for (const auto& u : run.unusable) unusable += u + "\n";
    write_text(out_file(c, outputs::kUnusable), unusable);
    if (c.write_masks) {
        for (const auto& m : run.masks) {
            write_ascii_grid(c.out_dir / "masks" / (format_date(m.date) + "_" + m.sensor_id + ".asc"),
                             mask_to_grid(m.water));
        }
    }
    return run;
}

GridShape dem_shape(const RunConfig& c) {
    if (c.hypso_ncols || c.hypso_nrows || c.hypso_cell_size) {
        if (!c.hypso_ncols) throw ConfigError("hypso.ncols", "required when any hypso grid key is set");
        if (!c.hypso_nrows) throw ConfigError("hypso.nrows", "required when any hypso grid key is set");
        if (!c.hypso_cell_size) throw ConfigError("hypso.cell_size", "required when any hypso grid key is set");
        return {*c.hypso_ncols, *c.hypso_nrows, *c.hypso_cell_size};
    }
    // Default to the grid of the first scene.
    const auto manifest = read_manifest(require(c.manifest, "manifest"));
    if (manifest.empty()) throw InputError("manifest lists no scenes; set hypso.ncols/nrows/cell_size");
    return load_scene(manifest.front()).shape();
}

HypsometricCurve hypso_and_write(const RunConfig& c) {
    if (c.curve && !c.soundings) {
        auto curve = read_curve_csv(*c.curve);
        auto out = detail::open_out(out_file(c, outputs::kCurve));
        write_curve_csv(out, curve);
        return curve;
    }
    const auto soundings = read_soundings(require(c.soundings, "soundings"));
    const auto dem = nn_interpolate(soundings, dem_shape(c));
    const double lo = dem.min_bed();
    const double hi = c.hypso_spillway.value_or(dem.max_bed());
    if (!(hi > lo)) throw ConfigError("hypso.spillway", "must exceed the lowest bed elevation " + fmt_num(lo));
    const auto levels = uniform_levels(lo, hi, c.hypso_levels);
    auto curve = build_curve(dem, levels);
    write_ascii_grid(out_file(c, outputs::kDem), dem_to_grid(dem));
    auto out = detail::open_out(out_file(c, outputs::kCurve));
    write_curve_csv(out, curve);
    return curve;
}

HypsometricCurve curve_for(const RunConfig& c) {
    if (c.curve && !c.soundings) return read_curve_csv(*c.curve);
    const auto existing = out_file(c, outputs::kCurve);
    if (fs::exists(existing)) return read_curve_csv(existing);
    return hypso_and_write(c);
}

std::vector<SeriesRecord> segments_for(const RunConfig& c) {
    const auto existing = out_file(c, outputs::kSegments);
    if (fs::exists(existing)) return read_segments_csv(existing);
    return segment_and_write(c).records;
}

std::vector<SvrSample> training_samples(const RunConfig& c, const std::vector<SeriesRecord>* segments,
                                        const HypsometricCurve& curve) {
    const bool use_gauge =
        c.train_source == TrainSource::Gauge || (c.train_source == TrainSource::Auto && c.gauge.has_value());
    std::vector<SvrSample> samples;
    if (use_gauge) {
        CsvTable gauge(require(c.gauge, "gauge"), {"date", "level_m"});
        std::map<Date, double> levels;
        for (std::size_t i = 0; i < gauge.size(); ++i) levels[gauge.date(i, "date")] = gauge.number(i, "level_m");
        std::vector<SeriesRecord> loaded;
        if (!segments) {
            loaded = segments_for(c);
            segments = &loaded;
        }
        for (const auto& r : *segments) {
            if (c.holdout_year && year_of(r.date) == *c.holdout_year) continue;
            auto it = levels.find(r.date);
            if (it == levels.end()) continue;
            samples.push_back({r.surface_fraction, curve.volume_at(it->second) / curve.capacity_volume()});
        }
    } else {
        const auto levels = uniform_levels(curve.min_level(), curve.max_level(), c.hypso_levels);
        for (const auto& s : make_samples(curve, levels)) samples.push_back({s.surface_fraction, s.relative_volume});
    }
    if (samples.size() < 2) throw PipelineError("fewer than 2 training samples available");
    return samples;
}

TrainOutcome train_and_write(const RunConfig& c, const std::vector<SeriesRecord>* segments,
                             const HypsometricCurve& curve) {
    if (!(curve.capacity_volume() > 0)) throw PipelineError("curve capacity is zero");
    const auto samples = training_samples(c, segments, curve);
    const auto split = train_test_split(samples.size(), c.train_fraction, c.seed);

    std::vector<double> xs, ys;
    for (auto i : split.train) {
        xs.push_back(samples[i].x);
        ys.push_back(samples[i].y);
    }
    const auto x_scaler = minmax_fit(xs);
    const auto y_scaler = minmax_fit(ys);
    std::vector<SvrSample> train_scaled;
    for (auto i : split.train) {
        train_scaled.push_back({minmax_apply(x_scaler, samples[i].x), minmax_apply(y_scaler, samples[i].y)});
    }

    GridSearchSpec spec = c.grid;
    spec.seed = c.seed;
    spec.folds = std::min(spec.folds, train_scaled.size());
    TrainOutcome out;
    out.cv = grid_search_cv(train_scaled, spec);
    auto fit = svr_fit(train_scaled, out.cv.best, spec.solver);
    out.model = std::move(fit.model);
    out.model.x_scaler = x_scaler;
    out.model.y_scaler = y_scaler;
    out.model.capacity_m3 = curve.capacity_volume();

    double abs_sum = 0.0, sq_sum = 0.0;
    for (auto i : split.test) {
        const double e = svr_predict(out.model, samples[i].x).value - samples[i].y;
        abs_sum += std::abs(e);
        sq_sum += e * e;
    }
    const double nt = static_cast<double>(split.test.size());
    out.summary = {out.cv.best,
                   split.train.size(),
                   split.test.size(),
                   out.model.support_inputs.size(),
                   abs_sum / nt,
                   std::sqrt(sq_sum / nt),
                   curve.capacity_volume()};

    save_model(model_path(c), out.model);
    {
        auto f = detail::open_out(out_file(c, outputs::kCvTable));
        write_cv_table_csv(f, out.cv);
    }
    {
        const auto& s = out.summary;
        std::ostringstream f;
        f << "c,epsilon,gamma,n_train,n_test,support_vectors,test_mae,test_rmse,capacity_m3,converged\n"
          << fmt_num(s.best.c) << ',' << fmt_num(s.best.epsilon) << ',' << fmt_num(s.best.gamma) << ',' << s.n_train
          << ',' << s.n_test << ',' << s.support_vectors << ',' << fmt_num(s.test_mae) << ',' << fmt_num(s.test_rmse)
          << ',' << fmt_num(s.capacity_m3) << ',' << (out.model.converged ? 1 : 0) << '\n';
        write_text(out_file(c, outputs::kTrainSummary), f.str());
    }
    return out;
}

std::vector<SeriesRecord> predict_and_write(const RunConfig& c, const SvrModel& model,
                                            const std::vector<SeriesRecord>& segments) {
    if (!(model.capacity_m3 > 0)) throw PipelineError("model carries no capacity; retrain with a curve");
    std::vector<SeriesRecord> series;
    for (auto r : segments) {
        const auto p = svr_predict(model, r.surface_fraction);
        r.volume_m3 = std::max(p.value, 0.0) * model.capacity_m3;
        r.extrapolated = p.extrapolated;
        series.push_back(std::move(r));
    }
    series = build_series(std::move(series));
    export_series_csv(out_file(c, outputs::kSeries), series);
    return series;
}

SvrModel load_trained_model(const RunConfig& c) {
    const auto path = model_path(c);
    if (!fs::exists(path)) throw InputError("trained model not found at '" + path.string() + "' (run `train` first)");
    return load_model(path);
}

std::optional<int> evaluation_year(const RunConfig& c) { return c.evaluate_year ? c.evaluate_year : c.holdout_year; }

MetricsReport evaluate_and_write(const RunConfig& c, const std::vector<SeriesRecord>& series) {
    const auto& truth_path = require(c.truth, "truth");
    if (!fs::exists(truth_path)) throw InputError("truth file not found at '" + truth_path.string() + "'");
    CsvTable truth(truth_path, {"date", "volume_m3"});
    std::map<Date, double> observed;
    for (std::size_t i = 0; i < truth.size(); ++i) observed[truth.date(i, "date")] = truth.number(i, "volume_m3");

    const auto year = evaluation_year(c);
    std::vector<double> obs, sim;
    std::ostringstream pairs;
    pairs << "date,sensor,observed_m3,estimated_m3\n";
    for (const auto& r : series) {
        if (year && year_of(r.date) != *year) continue;
        auto it = observed.find(r.date);
        if (it == observed.end()) continue;
        obs.push_back(it->second);
        sim.push_back(r.volume_m3);
        pairs << format_date(r.date) << ',' << r.sensor_id << ',' << fmt_num(it->second) << ',' << fmt_num(r.volume_m3)
              << '\n';
    }
    if (obs.size() < 2) throw PipelineError("fewer than 2 series dates match the truth file");
    auto report = compute_metrics(obs, sim);
    report.verdicts = judge(report, c.thresholds);

    std::ostringstream m;
    write_metrics_csv_header(m);
    write_metrics_csv_row(m, report);
    write_text(out_file(c, outputs::kMetrics), m.str());
    write_text(out_file(c, outputs::kPairs), pairs.str());
    return report;
}

std::vector<PersistenceMap> persistence_and_write(const RunConfig& c, const std::vector<DatedMask>& masks) {
    std::set<int> years;
    if (c.persistence_year) years.insert(*c.persistence_year);
    else
        for (const auto& m : masks) years.insert(year_of(m.date));
    std::vector<PersistenceMap> maps;
    std::ostringstream summary;
    summary << "year,observations,permanent,seasonal,ephemeral,dry\n";
    for (int y : years) {
        auto map = persistence(masks, y, c.persistence);
        write_ascii_grid(c.out_dir / ("persistence_" + std::to_string(y) + ".asc"), persistence_to_grid(map));
        const auto s = summarize(map);
        summary << s.year << ',' << s.observations << ',' << s.permanent << ',' << s.seasonal << ',' << s.ephemeral
                << ',' << s.dry << '\n';
        maps.push_back(std::move(map));
    }
    write_text(out_file(c, outputs::kPersistenceSummary), summary.str());
    return maps;
}

std::optional<MetricsReport> read_metrics(const fs::path& path) {
    if (!fs::exists(path)) return std::nullopt;
    CsvTable t(path, {"n", "mae", "rmse", "mape", "rsr", "r2", "pbias", "mape_pass", "rsr_pass", "r2_pass", "pbias_pass"});
    if (t.size() == 0) return std::nullopt;
    MetricsReport r;
    r.n = static_cast<std::size_t>(t.number(0, "n"));
    r.mae = t.number(0, "mae");
    r.rmse = t.number(0, "rmse");
    r.mape = t.number(0, "mape");
    r.rsr = t.number(0, "rsr");
    r.r2 = t.number(0, "r2");
    r.pbias = t.number(0, "pbias");
    r.verdicts = {t.text(0, "mape_pass") == "1", t.text(0, "rsr_pass") == "1", t.text(0, "r2_pass") == "1",
                  t.text(0, "pbias_pass") == "1"};
    return r;
}

std::optional<TrainSummary> read_train_summary(const fs::path& path) {
    if (!fs::exists(path)) return std::nullopt;
    CsvTable t(path, {"c", "epsilon", "gamma", "n_train", "n_test", "support_vectors", "test_mae", "test_rmse",
                      "capacity_m3"});
    if (t.size() == 0) return std::nullopt;
    TrainSummary s;
    s.best = {t.number(0, "c"), t.number(0, "epsilon"), t.number(0, "gamma")};
    s.n_train = static_cast<std::size_t>(t.number(0, "n_train"));
    s.n_test = static_cast<std::size_t>(t.number(0, "n_test"));
    s.support_vectors = static_cast<std::size_t>(t.number(0, "support_vectors"));
    s.test_mae = t.number(0, "test_mae");
    s.test_rmse = t.number(0, "test_rmse");
    s.capacity_m3 = t.number(0, "capacity_m3");
    return s;
}

std::vector<PersistenceSummary> read_persistence_summary(const fs::path& path) {
    std::vector<PersistenceSummary> out;
    if (!fs::exists(path)) return out;
    CsvTable t(path, {"year", "observations", "permanent", "seasonal", "ephemeral", "dry"});
    for (std::size_t i = 0; i < t.size(); ++i) {
        auto n = [&](const char* col) { return static_cast<std::size_t>(t.number(i, col)); };
        out.push_back({static_cast<int>(t.number(i, "year")), n("observations"), n("permanent"), n("seasonal"),
                       n("ephemeral"), n("dry")});
    }
    return out;
}

void write_report(const RunConfig& c, ReportInputs inputs) {
    inputs.title = c.report_title;
    write_text(out_file(c, outputs::kReport), render_report(inputs));
}

}  // namespace

SegmentRun cmd_segment(const RunConfig& config) { return segment_and_write(config); }

HypsometricCurve cmd_hypso(const RunConfig& config) { return hypso_and_write(config); }

TrainOutcome cmd_train(const RunConfig& config) {
    const auto curve = curve_for(config);
    return train_and_write(config, nullptr, curve);
}

std::vector<SeriesRecord> cmd_predict(const RunConfig& config) {
    const auto model = load_trained_model(config);
    return predict_and_write(config, model, segments_for(config));
}

MetricsReport cmd_evaluate(const RunConfig& config) {
    require(config.truth, "truth");
    const auto existing = out_file(config, outputs::kSeries);
    const auto series = fs::exists(existing) ? read_series_csv(existing) : cmd_predict(config);
    return evaluate_and_write(config, series);
}

std::vector<PersistenceMap> cmd_persistence(const RunConfig& config) {
    return persistence_and_write(config, segment_all(config).masks);
}

void cmd_report(const RunConfig& config) {
    const auto series_path = out_file(config, outputs::kSeries);
    if (!fs::exists(series_path)) throw InputError("series not found at '" + series_path.string() + "' (run `predict` first)");
    ReportInputs in;
    in.series = read_series_csv(series_path);
    in.metrics = read_metrics(out_file(config, outputs::kMetrics));
    if (in.metrics) in.metrics_year = evaluation_year(config);
    const auto curve_path = out_file(config, outputs::kCurve);
    if (fs::exists(curve_path)) in.curve = read_curve_csv(curve_path);
    in.persistence = read_persistence_summary(out_file(config, outputs::kPersistenceSummary));
    in.training = read_train_summary(out_file(config, outputs::kTrainSummary));
    write_report(config, std::move(in));
}

void cmd_run(const RunConfig& config) {
    const auto seg = segment_and_write(config);
    const auto curve = hypso_and_write(config);
    const auto trained = train_and_write(config, &seg.records, curve);
    ReportInputs in;
    in.series = predict_and_write(config, trained.model, seg.records);
    if (config.truth) {
        in.metrics = evaluate_and_write(config, in.series);
        in.metrics_year = evaluation_year(config);
    }
    for (const auto& m : persistence_and_write(config, seg.masks)) in.persistence.push_back(summarize(m));
    in.curve = curve;
    in.training = trained.summary;
    write_report(config, std::move(in));
}

void cmd_synth(const RunConfig& config) {
    SynthSpec spec = config.synth;
    spec.seed = config.synth_seed.value_or(config.seed);
    write_fixture(config.out_dir, spec, config.campaign, config.fixture);
}

}  // namespace resvol
