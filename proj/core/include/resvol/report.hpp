#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resvol/hypsometry.hpp"
#include "resvol/metrics.hpp"
#include "resvol/regression.hpp"
#include "resvol/timeseries.hpp"

namespace resvol {

struct PersistenceSummary {
    int year = 0;
    std::size_t observations = 0;
    std::size_t permanent = 0;
    std::size_t seasonal = 0;
    std::size_t ephemeral = 0;
    std::size_t dry = 0;
};

PersistenceSummary summarize(const PersistenceMap& map);

struct TrainSummary {
    SvrHyperparams best;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::size_t support_vectors = 0;
    double test_mae = 0.0;   // fraction of capacity
    double test_rmse = 0.0;  // fraction of capacity
    double capacity_m3 = 0.0;
};

struct ReportInputs {
    std::string title = "Reservoir storage report";
    std::vector<SeriesRecord> series;
    std::optional<MetricsReport> metrics;
    std::optional<int> metrics_year;
    std::optional<HypsometricCurve> curve;
    std::vector<PersistenceSummary> persistence;
    std::optional<TrainSummary> training;
};

// Self-contained HTML with inline SVG charts; output depends only on the inputs.
// Throws PipelineError when the series is empty.
std::string render_report(const ReportInputs& inputs);

}  // namespace resvol
