#pragma once

#include <string>
#include <vector>

#include "resvol/config.hpp"
#include "resvol/hypsometry.hpp"
#include "resvol/metrics.hpp"
#include "resvol/regression.hpp"
#include "resvol/report.hpp"
#include "resvol/timeseries.hpp"

namespace resvol {

// Per-scene segmentation output. Scenes whose histogram is degenerate are listed
// in `unusable` and omitted from `records`.
struct SegmentRun {
    std::vector<SeriesRecord> records;
    std::vector<DatedMask> masks;
    std::vector<std::string> unusable;
};

struct TrainOutcome {
    SvrModel model;
    GridSearchResult cv;
    TrainSummary summary;
};

// Each command writes only under config.out_dir. Prerequisites produced by an
// earlier command are read back from out_dir when present and recomputed otherwise.
SegmentRun cmd_segment(const RunConfig& config);
HypsometricCurve cmd_hypso(const RunConfig& config);
TrainOutcome cmd_train(const RunConfig& config);
std::vector<SeriesRecord> cmd_predict(const RunConfig& config);
MetricsReport cmd_evaluate(const RunConfig& config);
std::vector<PersistenceMap> cmd_persistence(const RunConfig& config);
void cmd_report(const RunConfig& config);
// segment -> hypso -> train -> predict -> evaluate (when truth is configured) -> persistence -> report
void cmd_run(const RunConfig& config);
void cmd_synth(const RunConfig& config);

// File names inside out_dir.
namespace outputs {
inline constexpr const char* kSegments = "segments.csv";
inline constexpr const char* kUnusable = "segments_unusable.csv";
inline constexpr const char* kCurve = "curve.csv";
inline constexpr const char* kDem = "dem.asc";
inline constexpr const char* kCvTable = "cv_table.csv";
inline constexpr const char* kTrainSummary = "train_summary.csv";
inline constexpr const char* kSeries = "series.csv";
inline constexpr const char* kMetrics = "metrics.csv";
inline constexpr const char* kPairs = "evaluation_pairs.csv";
inline constexpr const char* kPersistenceSummary = "persistence_summary.csv";
inline constexpr const char* kReport = "report.html";
}  // namespace outputs

}  // namespace resvol
