#pragma once

#include <iosfwd>
#include <span>

namespace resvol {

struct MetricThresholds {
    double mape_max = 6.0;    // percent, strict
    double rsr_max = 0.7;     // strict
    double r2_min = 0.7;      // strict
    double pbias_abs_max = 25.0;  // percent, inclusive
};

struct Verdicts {
    bool mape = false;
    bool rsr = false;
    bool r2 = false;
    bool pbias = false;
    bool all() const { return mape && rsr && r2 && pbias; }
};

struct MetricsReport {
    std::size_t n = 0;
    double mae = 0.0;
    double rmse = 0.0;
    double mape = 0.0;   // percent
    double rsr = 0.0;    // RMSE / population SD of observations
    double r2 = 0.0;
    double pbias = 0.0;  // percent, 100 * sum(obs - sim) / sum(obs)
    Verdicts verdicts;
};

// Throws PipelineError on length mismatch or n < 2, DegenerateError when the
// observations have zero spread, and PipelineError on a zero observation (MAPE).
MetricsReport compute_metrics(std::span<const double> obs, std::span<const double> sim);

Verdicts judge(const MetricsReport& report, const MetricThresholds& thresholds = {});

// Column order n,mae,rmse,mape,rsr,r2,pbias followed by the verdicts.
void write_metrics_csv_header(std::ostream& out);
void write_metrics_csv_row(std::ostream& out, const MetricsReport& report);

}  // namespace resvol
