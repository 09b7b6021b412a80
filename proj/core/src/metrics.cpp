#include "resvol/metrics.hpp"

#include <cmath>
#include <ostream>

#include "resvol/error.hpp"
#include "resvol/numeric.hpp"
#include "text_util.hpp"

namespace resvol {

MetricsReport compute_metrics(std::span<const double> obs, std::span<const double> sim) {
    if (obs.size() != sim.size()) throw PipelineError("metrics: observed and simulated lengths differ");
    if (obs.size() < 2) throw PipelineError("metrics: need at least 2 pairs");
    const double n = static_cast<double>(obs.size());

    CompensatedSum sum_obs;
    for (double o : obs) sum_obs += o;
    const double mean_obs = sum_obs.value() / n;

    CompensatedSum abs_err, sq_err, ape, dev, bias;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double o = obs[i], s = sim[i];
        if (!std::isfinite(o) || !std::isfinite(s)) throw PipelineError("metrics: non-finite value");
        if (o == 0.0) throw PipelineError("metrics: zero observation makes MAPE undefined");
        const double e = o - s;
        abs_err += std::abs(e);
        sq_err += e * e;
        ape += std::abs(e) / std::abs(o);
        dev += (o - mean_obs) * (o - mean_obs);
        bias += e;
    }
    if (dev.value() == 0.0) throw DegenerateError("metrics: observations have zero standard deviation");

    MetricsReport r;
    r.n = obs.size();
    r.mae = abs_err.value() / n;
    r.rmse = std::sqrt(sq_err.value() / n);
    r.mape = 100.0 * ape.value() / n;
    r.rsr = r.rmse / std::sqrt(dev.value() / n);
    r.r2 = 1.0 - sq_err.value() / dev.value();
    r.pbias = 100.0 * bias.value() / sum_obs.value();
    r.verdicts = judge(r);
    return r;
}

Verdicts judge(const MetricsReport& r, const MetricThresholds& t) {
    Verdicts v;
    v.mape = r.mape < t.mape_max;
    v.rsr = r.rsr < t.rsr_max;
    v.r2 = r.r2 > t.r2_min;
    v.pbias = std::abs(r.pbias) <= t.pbias_abs_max;
    return v;
}

void write_metrics_csv_header(std::ostream& out) {
    out << "n,mae,rmse,mape,rsr,r2,pbias,mape_pass,rsr_pass,r2_pass,pbias_pass\n";
}

void write_metrics_csv_row(std::ostream& out, const MetricsReport& r) {
    using detail::fmt_num;
    out << r.n << ',' << fmt_num(r.mae) << ',' << fmt_num(r.rmse) << ',' << fmt_num(r.mape) << ','
        << fmt_num(r.rsr) << ',' << fmt_num(r.r2) << ',' << fmt_num(r.pbias) << ',' << r.verdicts.mape << ','
        << r.verdicts.rsr << ',' << r.verdicts.r2 << ',' << r.verdicts.pbias << '\n';
}

}  // namespace resvol
