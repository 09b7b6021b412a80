#include <doctest.h>

#include <regex>

#include "resvol/error.hpp"
#include "resvol/report.hpp"

using namespace resvol;

namespace {

SeriesRecord rec(const char* date, double volume) {
    SeriesRecord r;
    r.date = parse_date(date);
    r.sensor_id = "sentinel2";
    r.area_m2 = volume / 10.0;
    r.surface_fraction = 0.5;
    r.volume_m3 = volume;
    return r;
}

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

std::string section(const std::string& html, const std::string& svg_id) {
    const auto start = html.find("<svg id=\"" + svg_id + "\"");
    REQUIRE(start != std::string::npos);
    return html.substr(start, html.find("</svg>", start) - start);
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("empty series throws") {
    CHECK_THROWS_AS(render_report({}), PipelineError);
}

TEST_CASE("two-point series renders two markers and omits absent sections") {
    ReportInputs in;
    in.series = {rec("2022-01-10", 2.0e6), rec("2022-02-10", 3.0e6)};
    const auto html = render_report(in);
    CHECK(count(section(html, "volume-chart"), "class=\"marker\"") == 2);
    CHECK(html.find("id=\"metrics\"") == std::string::npos);
    CHECK(html.find("id=\"training\"") == std::string::npos);
    CHECK(html.find("id=\"persistence\"") == std::string::npos);
    CHECK(html.find("curve-chart") == std::string::npos);
    CHECK(render_report(in) == html);
}

TEST_CASE("annotations match the series extremes") {
    ReportInputs in;
    in.series = {rec("2022-01-10", 2.0e6), rec("2022-03-01", 5.5e6), rec("2022-05-01", 1.25e6),
                 rec("2022-07-01", 5.5e6)};
    const auto html = render_report(in);
    std::smatch m;
    const std::regex hi("class=\"annotation-max\" data-date=\"([0-9-]+)\" data-volume=\"([^\"]+)\"");
    const std::regex lo("class=\"annotation-min\" data-date=\"([0-9-]+)\" data-volume=\"([^\"]+)\"");
    REQUIRE(std::regex_search(html, m, hi));
    CHECK(m[1] == "2022-03-01");
    CHECK(std::stod(m[2]) == 5.5e6);
    REQUIRE(std::regex_search(html, m, lo));
    CHECK(m[1] == "2022-05-01");
    CHECK(std::stod(m[2]) == 1.25e6);
}

TEST_CASE("optional sections appear when provided") {
    ReportInputs in;
    in.title = "Test lake";
    in.series = {rec("2022-01-10", 2.0e6), rec("2022-02-10", 3.0e6)};
    std::vector<double> obs{1, 2, 3}, sim{1, 2, 3};
    in.metrics = compute_metrics(obs, sim);
    in.metrics_year = 2022;
    in.training = TrainSummary{};
    in.persistence = {PersistenceSummary{2022, 2, 1, 2, 3, 4}};
    const auto html = render_report(in);
    CHECK(html.find("<title>Test lake</title>") != std::string::npos);
    CHECK(html.find("id=\"metrics\"") != std::string::npos);
    CHECK(html.find("id=\"training\"") != std::string::npos);
    CHECK(html.find("<td>2022</td><td>2</td><td>1</td><td>2</td><td>3</td><td>4</td>") != std::string::npos);
}

TEST_CASE("no external resources") {
    ReportInputs in;
    in.series = {rec("2022-01-10", 2.0e6)};
    const auto html = render_report(in);
    CHECK(html.find("src=") == std::string::npos);
    CHECK(html.find("href=") == std::string::npos);
    CHECK(html.find("<script") == std::string::npos);
}

}  // TEST_SUITE
