#include "resvol/report.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "resvol/error.hpp"
#include "text_util.hpp"

namespace resvol {

PersistenceSummary summarize(const PersistenceMap& map) {
    return {map.year,
            map.observations,
            map.count(PersistenceClass::Permanent),
            map.count(PersistenceClass::Seasonal),
            map.count(PersistenceClass::Ephemeral),
            map.count(PersistenceClass::Dry)};
}

namespace {

constexpr double kWidth = 760, kHeight = 260;
constexpr double kLeft = 70, kRight = 20, kTop = 20, kBottom = 40;

struct Axis {
    double lo = 0, hi = 1;
    double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Axis padded(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = lo == 0 ? 1.0 : std::abs(lo) * 0.05;
        return {lo - pad, hi + pad};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

std::string num(double v, int digits = 2) { return fmt::format("{:.{}f}", v, digits); }

struct Series2 {
    std::vector<double> x;
    std::vector<double> y;
};

// Polyline with markers; x labels formatted by label_x.
template <class LabelX>
std::string svg_chart(const std::string& id, const Series2& s, const std::string& y_label, LabelX label_x,
                      const std::string& extra = "") {
    auto [xmin, xmax] = std::minmax_element(s.x.begin(), s.x.end());
    auto [ymin, ymax] = std::minmax_element(s.y.begin(), s.y.end());
    const Axis ax = padded(*xmin, *xmax), ay = padded(*ymin, *ymax);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

    std::string out = fmt::format(
        "<svg id=\"{}\" xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", id,
        kWidth, kHeight, kWidth, kHeight);
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#fff\" stroke=\"#888\"/>\n", x0, y1,
                       x1 - x0, y0 - y1);
    for (int k = 0; k <= 4; ++k) {
        const double v = ay.lo + (ay.hi - ay.lo) * k / 4.0;
        const double py = ay.map(v, y0, y1);
        out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#eee\"/>", x0, num(py), x1, num(py));
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n", x0 - 4,
                           num(py + 3), num(v, 2));
    }
    for (int k = 0; k <= 4; ++k) {
        const double v = ax.lo + (ax.hi - ax.lo) * k / 4.0;
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
                           num(ax.map(v, x0, x1)), y0 + 14, label_x(v));
    }
    out += fmt::format("<text x=\"12\" y=\"{}\" font-size=\"11\" transform=\"rotate(-90 12 {})\" "
                       "text-anchor=\"middle\">{}</text>\n",
                       num((y0 + y1) / 2), num((y0 + y1) / 2), y_label);
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) pts += ' ';
        pts += num(ax.map(s.x[i], x0, x1)) + "," + num(ay.map(s.y[i], y0, y1));
    }
    out += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        out += fmt::format("<circle class=\"marker\" cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"#1f5fa8\"/>\n",
                           num(ax.map(s.x[i], x0, x1)), num(ay.map(s.y[i], y0, y1)));
    }
    out += extra;
    out += "</svg>\n";
    return out;
}

std::string date_label(double epoch_days) {
    return format_date(date_from_epoch_days(static_cast<long>(std::lround(epoch_days))));
}

std::string verdict(bool pass) { return pass ? "<td class=\"pass\">pass</td>" : "<td class=\"fail\">fail</td>"; }

}  // namespace

std::string render_report(const ReportInputs& in) {
    if (in.series.empty()) throw PipelineError("report needs a non-empty series");

    std::string html;
    html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    html += "<title>" + in.title + "</title>\n";
    html += "<style>body{font-family:sans-serif;margin:2em;color:#222}table{border-collapse:collapse;margin:1em 0}"
            "td,th{border:1px solid #bbb;padding:4px 8px;text-align:right}th{background:#f0f0f0}"
            ".pass{color:#176b2c}.fail{color:#a31515;font-weight:bold}</style>\n</head>\n<body>\n";
    html += "<h1>" + in.title + "</h1>\n";

    // Volume and area series.
    Series2 vol, frac;
    for (const auto& r : in.series) {
        const double t = static_cast<double>(days_since_epoch(r.date));
        vol.x.push_back(t);
        vol.y.push_back(r.volume_m3 / 1e6);
        frac.x.push_back(t);
        frac.y.push_back(r.surface_fraction * 100.0);
    }
    const auto ext = volume_extremes(in.series);
    const auto& hi = in.series[ext.max_index];
    const auto& lo = in.series[ext.min_index];
    html += fmt::format("<h2>Storage time series</h2>\n<p>{} observations from {} to {}.</p>\n", in.series.size(),
                        format_date(in.series.front().date), format_date(in.series.back().date));

    auto annotate = [&](const SeriesRecord& r, const char* cls, const char* label) {
        auto [xmin, xmax] = std::minmax_element(vol.x.begin(), vol.x.end());
        auto [ymin, ymax] = std::minmax_element(vol.y.begin(), vol.y.end());
        const Axis ax = padded(*xmin, *xmax), ay = padded(*ymin, *ymax);
        const double px = ax.map(static_cast<double>(days_since_epoch(r.date)), kLeft, kWidth - kRight);
        const double py = ay.map(r.volume_m3 / 1e6, kHeight - kBottom, kTop);
        return fmt::format("<g class=\"{}\" data-date=\"{}\" data-volume=\"{}\"><circle cx=\"{}\" cy=\"{}\" r=\"5\" "
                           "fill=\"none\" stroke=\"#c0392b\"/><text x=\"{}\" y=\"{}\" font-size=\"10\" "
                           "fill=\"#c0392b\">{} {} ({} Mm&#179;)</text></g>\n",
                           cls, format_date(r.date), detail::fmt_num(r.volume_m3), num(px), num(py), num(px + 6),
                           num(py - 6), label, format_date(r.date), num(r.volume_m3 / 1e6, 3));
    };
    html += svg_chart("volume-chart", vol, "Volume (million m&#179;)", date_label,
                      annotate(hi, "annotation-max", "max") + annotate(lo, "annotation-min", "min"));
    html += fmt::format("<p>Maximum storage {} m&#179; on {}; minimum {} m&#179; on {}.</p>\n",
                        detail::fmt_num(hi.volume_m3), format_date(hi.date), detail::fmt_num(lo.volume_m3),
                        format_date(lo.date));
    html += svg_chart("area-chart", frac, "Surface (% of nominal)", date_label);
    const auto extrapolated = std::count_if(in.series.begin(), in.series.end(), [](auto& r) { return r.extrapolated; });
    if (extrapolated > 0) {
        html += fmt::format("<p>{} observation(s) lie outside the model's training range and are flagged as "
                            "extrapolated in the series CSV.</p>\n",
                            extrapolated);
    }

    if (in.metrics) {
        const auto& m = *in.metrics;
        html += "<h2>Volume accuracy</h2>\n";
        if (in.metrics_year) html += fmt::format("<p>Evaluation year {}.</p>\n", *in.metrics_year);
        html += "<table id=\"metrics\"><tr><th>n</th><th>MAE (m&#179;)</th><th>RMSE (m&#179;)</th><th>MAPE (%)</th>"
                "<th>RSR</th><th>R&#178;</th><th>PBIAS (%)</th></tr>\n";
        html += fmt::format("<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>\n",
                            m.n, num(m.mae, 0), num(m.rmse, 0), num(m.mape, 3), num(m.rsr, 3), num(m.r2, 4),
                            num(m.pbias, 3));
        html += "<tr><td></td><td></td><td></td>" + verdict(m.verdicts.mape) + verdict(m.verdicts.rsr) +
                verdict(m.verdicts.r2) + verdict(m.verdicts.pbias) + "</tr>\n</table>\n";
    }

    if (in.training) {
        const auto& t = *in.training;
        html += "<h2>Regression model</h2>\n<table id=\"training\">";
        html += fmt::format("<tr><th>C</th><td>{}</td></tr><tr><th>&#949;</th><td>{}</td></tr>"
                            "<tr><th>&#947;</th><td>{}</td></tr>",
                            detail::fmt_num(t.best.c), detail::fmt_num(t.best.epsilon), detail::fmt_num(t.best.gamma));
        html += fmt::format("<tr><th>train / test samples</th><td>{} / {}</td></tr><tr><th>support vectors</th>"
                            "<td>{}</td></tr>",
                            t.n_train, t.n_test, t.support_vectors);
        html += fmt::format("<tr><th>test MAE (fraction of capacity)</th><td>{}</td></tr><tr><th>test RMSE "
                            "(fraction of capacity)</th><td>{}</td></tr></table>\n",
                            num(t.test_mae, 5), num(t.test_rmse, 5));
    }

    if (in.curve) {
        Series2 c;
        for (const auto& r : in.curve->rows()) {
            c.x.push_back(r.level);
            c.y.push_back(r.volume_m3 / 1e6);
        }
        html += "<h2>Level&#8211;volume curve</h2>\n";
        html += fmt::format("<p>Capacity {} m&#179; at level {} m; nominal area {} m&#178;.</p>\n",
                            detail::fmt_num(in.curve->capacity_volume()), detail::fmt_num(in.curve->max_level()),
                            detail::fmt_num(in.curve->nominal_area()));
        html += svg_chart("curve-chart", c, "Volume (million m&#179;)", [](double v) { return num(v, 1) + " m"; });
    }

    if (!in.persistence.empty()) {
        html += "<h2>Water persistence</h2>\n<table id=\"persistence\"><tr><th>year</th><th>observations</th>"
                "<th>permanent</th><th>seasonal</th><th>ephemeral</th><th>dry</th></tr>\n";
        for (const auto& p : in.persistence) {
            html += fmt::format("<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>\n", p.year,
                                p.observations, p.permanent, p.seasonal, p.ephemeral, p.dry);
        }
        html += "</table>\n";
    }

    html += "</body>\n</html>\n";
    return html;
}

}  // namespace resvol
