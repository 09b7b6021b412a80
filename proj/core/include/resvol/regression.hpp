#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace resvol {

// Min-max scaling bounds, hi > lo.
struct ScalerParams {
    double lo = 0.0;
    double hi = 1.0;
    bool operator==(const ScalerParams&) const = default;
};

// Throws DegenerateError on fewer than two distinct values.
ScalerParams minmax_fit(std::span<const double> values);
double minmax_apply(const ScalerParams& p, double v);
double minmax_invert(const ScalerParams& p, double s);

struct SvrHyperparams {
    double c = 1000.0;
    double epsilon = 0.0004;
    double gamma = 9.0;
    bool operator==(const SvrHyperparams&) const = default;
};

void validate(const SvrHyperparams& h);

// exp(-gamma * (a - b)^2) for the single-feature case.
double rbf_kernel(double a, double b, double gamma);
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

struct SvrSample {
    double x = 0.0;
    double y = 0.0;
};

struct SolverOptions {
    double tolerance = 1e-6;
    std::size_t max_iter = 1'000'000;
};

struct SvrModel {
    std::vector<double> support_inputs;  // scaled
    std::vector<double> dual_coefs;      // beta = alpha - alpha*
    double bias = 0.0;
    SvrHyperparams hyper;
    ScalerParams x_scaler;
    ScalerParams y_scaler;
    double tolerance = 1e-6;
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
    // Curve capacity used to turn relative volume into m^3; 0 when unset.
    double capacity_m3 = 0.0;

    // Kernel expansion in scaled units.
    double decision(double x_scaled) const;
    bool operator==(const SvrModel&) const = default;
};

struct SvrFit {
    SvrModel model;
    std::vector<double> beta;  // one per training sample, zeros included
    double dual_objective = 0.0;
};

// Two-variable SMO on the epsilon-SVR dual. The first index is the maximal violator,
// the second is chosen by the second-order gain rule.
// Samples are expected in scaled units; the returned model has identity scalers.
SvrFit svr_fit(std::span<const SvrSample> samples, const SvrHyperparams& hyper, const SolverOptions& options = {});

// -1/2 b'Kb - eps*sum|b| + sum y*b
double svr_dual_objective(std::span<const SvrSample> samples, std::span<const double> beta,
                          const SvrHyperparams& hyper);

struct Prediction {
    double value = 0.0;
    bool extrapolated = false;  // x outside the scaler's training range
};

Prediction svr_predict(const SvrModel& model, double x_raw);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Seeded shuffle, first ceil(fraction * n) indices train. Throws when either side is empty.
SplitIndices train_test_split(std::size_t n, double train_fraction, std::uint64_t seed);

template <class T>
std::pair<std::vector<T>, std::vector<T>> train_test_split(std::span<const T> samples, double train_fraction,
                                                           std::uint64_t seed) {
    const auto idx = train_test_split(samples.size(), train_fraction, seed);
    std::pair<std::vector<T>, std::vector<T>> out;
    for (auto i : idx.train) out.first.push_back(samples[i]);
    for (auto i : idx.test) out.second.push_back(samples[i]);
    return out;
}

// Fold label per sample: seeded shuffle then contiguous blocks.
std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed);

struct GridSearchSpec {
    std::vector<double> c_grid{1, 10, 100, 1000};
    std::vector<double> epsilon_grid{0.0001, 0.0004, 0.001, 0.01};
    std::vector<double> gamma_grid{0.5, 1, 3, 9, 27};
    std::size_t folds = 10;
    std::uint64_t seed = 42;
    SolverOptions solver;
    std::size_t threads = 0;  // 0: hardware concurrency
};

struct CvRow {
    SvrHyperparams hyper;
    double mean_mse = 0.0;
    double std_mse = 0.0;
};

struct GridSearchResult {
    SvrHyperparams best;
    std::vector<CvRow> table;  // grid order: C outer, then epsilon, then gamma
};

// Lowest mean validation MSE; ties go to smaller C, then smaller gamma, then larger epsilon.
GridSearchResult grid_search_cv(std::span<const SvrSample> samples, const GridSearchSpec& spec);

void write_cv_table_csv(std::ostream& out, const GridSearchResult& result);

// Text record with every field needed for a bit-exact reload.
void write_model(std::ostream& out, const SvrModel& model);
SvrModel parse_model(std::istream& in);
void save_model(const std::filesystem::path& path, const SvrModel& model);
SvrModel load_model(const std::filesystem::path& path);

}  // namespace resvol
