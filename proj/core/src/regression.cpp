#include "resvol/regression.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include "resvol/error.hpp"
#include "resvol/random.hpp"
#include "text_util.hpp"

namespace resvol {

using detail::fmt_num;

ScalerParams minmax_fit(std::span<const double> values) {
    if (values.empty()) throw DegenerateError("cannot fit scaler on empty data");
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    if (!std::isfinite(*mn) || !std::isfinite(*mx)) throw PipelineError("non-finite value in scaler input");
    if (!(*mx > *mn)) throw DegenerateError("degenerate scaler: all values equal");
    return {*mn, *mx};
}

double minmax_apply(const ScalerParams& p, double v) { return (v - p.lo) / (p.hi - p.lo); }

double minmax_invert(const ScalerParams& p, double s) { return p.lo + s * (p.hi - p.lo); }

void validate(const SvrHyperparams& h) {
    if (!(h.c > 0) || !std::isfinite(h.c)) throw PipelineError("SVR C must be positive");
    if (!(h.epsilon >= 0) || !std::isfinite(h.epsilon)) throw PipelineError("SVR epsilon must be >= 0");
    if (!(h.gamma > 0) || !std::isfinite(h.gamma)) throw PipelineError("SVR gamma must be positive");
}

double rbf_kernel(double a, double b, double gamma) {
    const double d = a - b;
    return std::exp(-gamma * d * d);
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return std::exp(-gamma * d2);
}

double SvrModel::decision(double x) const {
    double f = bias;
    for (std::size_t i = 0; i < support_inputs.size(); ++i) f += dual_coefs[i] * rbf_kernel(support_inputs[i], x, hyper.gamma);
    return f;
}

namespace {

// Epsilon-SVR dual over 2n box variables: alpha (sign +1) for t < n and alpha* (sign -1)
// for t >= n, minimizing 1/2 a'Qa + p'a with Q_st = s_s s_t K and sum s_t a_t = 0.
class SmoSolver {
public:
    SmoSolver(std::span<const SvrSample> samples, const SvrHyperparams& hyper, const SolverOptions& opt)
        : n_(samples.size()), c_(hyper.c), opt_(opt), kernel_(n_ * n_), alpha_(2 * n_, 0.0), grad_(2 * n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double k = rbf_kernel(samples[i].x, samples[j].x, hyper.gamma);
                kernel_[i * n_ + j] = k;
                kernel_[j * n_ + i] = k;
            }
        }
        for (std::size_t i = 0; i < n_; ++i) {
            grad_[i] = hyper.epsilon - samples[i].y;
            grad_[i + n_] = hyper.epsilon + samples[i].y;
        }
    }

    void solve() {
        for (;;) {
            std::size_t up = 0, low = 0;
            const double gap = select(up, low);
            kkt_ = gap;
            if (gap < opt_.tolerance) {
                converged_ = true;
                return;
            }
            if (iterations_ >= opt_.max_iter) {
                converged_ = false;
                return;
            }
            step(up, low, sign(low) * grad_[low] - sign(up) * grad_[up]);
            ++iterations_;
        }
    }

    double bias() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t n_free = 0;
        for (std::size_t t = 0; t < 2 * n_; ++t) {
            const double s = sign(t);
            const double yg = s * grad_[t];
            if (alpha_[t] >= c_) {
                if (s < 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else if (alpha_[t] <= 0) {
                if (s > 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else {
                ++n_free;
                sum_free += yg;
            }
        }
        const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
        return -rho;
    }

    std::vector<double> beta() const {
        std::vector<double> b(n_);
        for (std::size_t i = 0; i < n_; ++i) b[i] = alpha_[i] - alpha_[i + n_];
        return b;
    }

    std::size_t iterations() const { return iterations_; }
    double kkt_residual() const { return kkt_; }
    bool converged() const { return converged_; }

private:
    double sign(std::size_t t) const { return t < n_ ? 1.0 : -1.0; }
    std::size_t sample(std::size_t t) const { return t < n_ ? t : t - n_; }
    bool in_up(std::size_t t) const { return t < n_ ? alpha_[t] < c_ : alpha_[t] > 0; }
    bool in_low(std::size_t t) const { return t < n_ ? alpha_[t] > 0 : alpha_[t] < c_; }
    double k(std::size_t a, std::size_t b) const { return kernel_[sample(a) * n_ + sample(b)]; }

    // Second-order working set: `up` maximizes -s*g over the up set, `low` maximizes the
    // guaranteed objective decrease among violators. Returns the maximal violation m - M.
    double select(std::size_t& up, std::size_t& low) const {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < 2 * n_; ++t) {
            const double v = -sign(t) * grad_[t];
            if (in_up(t) && v > m) {
                m = v;
                up = t;
            }
        }
        if (!std::isfinite(m)) return 0.0;
        double big_m = std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        bool found = false;
        for (std::size_t t = 0; t < 2 * n_; ++t) {
            if (!in_low(t)) continue;
            const double v = -sign(t) * grad_[t];
            big_m = std::min(big_m, v);
            const double b = m - v;
            if (b <= 0) continue;
            const double a = std::max(k(up, up) + k(t, t) - 2.0 * k(up, t), 1e-12);
            const double score = -(b * b) / a;
            if (score < best) {
                best = score;
                low = t;
                found = true;
            }
        }
        if (!found) return std::isfinite(big_m) ? std::max(m - big_m, 0.0) : 0.0;
        return m - big_m;
    }

    // Move s_up*a_up up by tau and s_low*a_low down by tau.
    void step(std::size_t i, std::size_t j, double diff) {
        const double curvature = std::max(k(i, i) + k(j, j) - 2.0 * k(i, j), 1e-12);
        double tau = diff / curvature;
        const double bound_i = sign(i) > 0 ? c_ - alpha_[i] : alpha_[i];
        const double bound_j = sign(j) > 0 ? alpha_[j] : c_ - alpha_[j];
        bool clip_i = false, clip_j = false;
        if (bound_i <= tau) {
            tau = bound_i;
            clip_i = true;
        }
        if (bound_j <= tau) {
            clip_i = clip_i && bound_i == bound_j;
            tau = bound_j;
            clip_j = true;
        }
        alpha_[i] += sign(i) * tau;
        alpha_[j] -= sign(j) * tau;
        if (clip_i) alpha_[i] = sign(i) > 0 ? c_ : 0.0;
        if (clip_j) alpha_[j] = sign(j) > 0 ? 0.0 : c_;
        const std::size_t si = sample(i), sj = sample(j);
        for (std::size_t t = 0; t < 2 * n_; ++t) {
            const std::size_t st = sample(t);
            grad_[t] += sign(t) * tau * (kernel_[st * n_ + si] - kernel_[st * n_ + sj]);
        }
    }

    std::size_t n_;
    double c_;
    SolverOptions opt_;
    std::vector<double> kernel_;
    std::vector<double> alpha_;
    std::vector<double> grad_;
    std::size_t iterations_ = 0;
    double kkt_ = 0.0;
    bool converged_ = false;
};

}  // namespace

SvrFit svr_fit(std::span<const SvrSample> samples, const SvrHyperparams& hyper, const SolverOptions& options) {
    if (samples.empty()) throw PipelineError("svr_fit: empty sample set");
    validate(hyper);
    for (const auto& s : samples) {
        if (!std::isfinite(s.x) || !std::isfinite(s.y)) throw PipelineError("svr_fit: non-finite sample");
    }
    SmoSolver solver(samples, hyper, options);
    solver.solve();

    SvrFit fit;
    fit.beta = solver.beta();
    auto& m = fit.model;
    m.hyper = hyper;
    m.bias = solver.bias();
    m.tolerance = options.tolerance;
    m.kkt_residual = solver.kkt_residual();
    m.iterations = solver.iterations();
    m.converged = solver.converged();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (fit.beta[i] != 0.0) {
            m.support_inputs.push_back(samples[i].x);
            m.dual_coefs.push_back(fit.beta[i]);
        }
    }
    fit.dual_objective = svr_dual_objective(samples, fit.beta, hyper);
    return fit;
}

double svr_dual_objective(std::span<const SvrSample> samples, std::span<const double> beta,
                          const SvrHyperparams& hyper) {
    const std::size_t n = samples.size();
    double quad = 0.0, lin = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (beta[i] == 0.0) continue;
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (beta[j] != 0.0) row += beta[j] * rbf_kernel(samples[i].x, samples[j].x, hyper.gamma);
        }
        quad += beta[i] * row;
        lin += samples[i].y * beta[i];
        l1 += std::abs(beta[i]);
    }
    return -0.5 * quad - hyper.epsilon * l1 + lin;
}

Prediction svr_predict(const SvrModel& model, double x_raw) {
    Prediction p;
    p.extrapolated = x_raw < model.x_scaler.lo || x_raw > model.x_scaler.hi;
    p.value = minmax_invert(model.y_scaler, model.decision(minmax_apply(model.x_scaler, x_raw)));
    return p;
}

SplitIndices train_test_split(std::size_t n, double train_fraction, std::uint64_t seed) {
    if (n < 2) throw PipelineError("train_test_split needs at least 2 samples");
    if (!(train_fraction > 0 && train_fraction <= 1)) throw PipelineError("train_fraction must be in (0, 1]");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(perm));
    // Tolerate representation error so that 0.8 * 10 gives 8, not 9.
    const auto n_train = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n) - 1e-9));
    if (n_train == 0 || n_train >= n) throw PipelineError("train/test split leaves an empty partition");
    SplitIndices out;
    out.train.assign(perm.begin(), perm.begin() + static_cast<long>(n_train));
    out.test.assign(perm.begin() + static_cast<long>(n_train), perm.end());
    return out;
}

std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
    if (folds < 2 || folds > n) throw PipelineError("folds must be in [2, n_samples]");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(perm));
    std::vector<std::size_t> label(n);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t size = n / folds + (f < n % folds ? 1 : 0);
        for (std::size_t k = 0; k < size; ++k) label[perm[pos++]] = f;
    }
    return label;
}

GridSearchResult grid_search_cv(std::span<const SvrSample> samples, const GridSearchSpec& spec) {
    if (spec.c_grid.empty() || spec.epsilon_grid.empty() || spec.gamma_grid.empty()) {
        throw PipelineError("grid search: empty hyperparameter grid");
    }
    const auto folds = assign_folds(samples.size(), spec.folds, spec.seed);

    GridSearchResult result;
    for (double c : spec.c_grid)
        for (double e : spec.epsilon_grid)
            for (double g : spec.gamma_grid) {
                const SvrHyperparams h{c, e, g};
                validate(h);
                result.table.push_back({h, 0.0, 0.0});
            }

    auto evaluate = [&](CvRow& row) {
        std::vector<double> mse(spec.folds);
        std::vector<SvrSample> train;
        for (std::size_t f = 0; f < spec.folds; ++f) {
            train.clear();
            for (std::size_t i = 0; i < samples.size(); ++i) {
                if (folds[i] != f) train.push_back(samples[i]);
            }
            const auto fit = svr_fit(train, row.hyper, spec.solver);
            double se = 0.0;
            std::size_t nv = 0;
            for (std::size_t i = 0; i < samples.size(); ++i) {
                if (folds[i] != f) continue;
                const double r = fit.model.decision(samples[i].x) - samples[i].y;
                se += r * r;
                ++nv;
            }
            mse[f] = se / static_cast<double>(nv);
        }
        double mean = 0.0;
        for (double v : mse) mean += v;
        mean /= static_cast<double>(mse.size());
        double var = 0.0;
        for (double v : mse) var += (v - mean) * (v - mean);
        row.mean_mse = mean;
        row.std_mse = std::sqrt(var / static_cast<double>(mse.size()));
    };

    std::size_t workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, result.table.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= result.table.size() || failed.load()) return;
            try {
                evaluate(result.table[k]);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    const CvRow* best = &result.table.front();
    for (const auto& row : result.table) {
        const auto& b = *best;
        const bool better =
            row.mean_mse < b.mean_mse ||
            (row.mean_mse == b.mean_mse &&
             (row.hyper.c < b.hyper.c ||
              (row.hyper.c == b.hyper.c &&
               (row.hyper.gamma < b.hyper.gamma ||
                (row.hyper.gamma == b.hyper.gamma && row.hyper.epsilon > b.hyper.epsilon)))));
        if (better) best = &row;
    }
    result.best = best->hyper;
    return result;
}

void write_cv_table_csv(std::ostream& out, const GridSearchResult& result) {
    out << "c,epsilon,gamma,mean_mse,std_mse,selected\n";
    for (const auto& r : result.table) {
        out << fmt_num(r.hyper.c) << ',' << fmt_num(r.hyper.epsilon) << ',' << fmt_num(r.hyper.gamma) << ','
            << fmt_num(r.mean_mse) << ',' << fmt_num(r.std_mse) << ',' << (r.hyper == result.best ? 1 : 0) << '\n';
    }
}

void write_model(std::ostream& out, const SvrModel& m) {
    out << "resvol-svr 1\n"
        << "kernel rbf\n"
        << "c " << fmt_num(m.hyper.c) << '\n'
        << "epsilon " << fmt_num(m.hyper.epsilon) << '\n'
        << "gamma " << fmt_num(m.hyper.gamma) << '\n'
        << "x_scaler " << fmt_num(m.x_scaler.lo) << ' ' << fmt_num(m.x_scaler.hi) << '\n'
        << "y_scaler " << fmt_num(m.y_scaler.lo) << ' ' << fmt_num(m.y_scaler.hi) << '\n'
        << "tolerance " << fmt_num(m.tolerance) << '\n'
        << "kkt_residual " << fmt_num(m.kkt_residual) << '\n'
        << "iterations " << m.iterations << '\n'
        << "converged " << (m.converged ? 1 : 0) << '\n'
        << "capacity_m3 " << fmt_num(m.capacity_m3) << '\n'
        << "bias " << fmt_num(m.bias) << '\n'
        << "support_vectors " << m.support_inputs.size() << '\n';
    for (std::size_t i = 0; i < m.support_inputs.size(); ++i) {
        out << fmt_num(m.support_inputs[i]) << ' ' << fmt_num(m.dual_coefs[i]) << '\n';
    }
}

namespace {

class ModelReader {
public:
    explicit ModelReader(std::istream& in) : in_(in) {}

    std::vector<std::string_view> fields(std::string_view key, std::size_t count) {
        if (!std::getline(in_, line_)) throw ParseError(lineno_ + 1, "model truncated before '" + std::string(key) + "'");
        ++lineno_;
        toks_ = detail::split_ws(line_);
        if (toks_.size() != count + 1 || toks_[0] != key) {
            throw ParseError(lineno_, "expected '" + std::string(key) + "' with " + std::to_string(count) + " value(s)");
        }
        return {toks_.begin() + 1, toks_.end()};
    }

    double number(std::string_view tok) {
        auto v = detail::to_double(tok);
        if (!v) throw ParseError(lineno_, "non-numeric model value '" + std::string(tok) + "'");
        return *v;
    }

    std::size_t count(std::string_view tok) {
        auto v = detail::to_int<std::size_t>(tok);
        if (!v) throw ParseError(lineno_, "expected non-negative integer, got '" + std::string(tok) + "'");
        return *v;
    }

    double scalar(std::string_view key) { return number(fields(key, 1)[0]); }

private:
    std::istream& in_;
    std::string line_;
    std::vector<std::string_view> toks_;
    std::size_t lineno_ = 0;
};

}  // namespace

SvrModel parse_model(std::istream& in) {
    ModelReader r(in);
    SvrModel m;
    if (r.fields("resvol-svr", 1)[0] != "1") throw ParseError(1, "unsupported model version");
    if (r.fields("kernel", 1)[0] != "rbf") throw ParseError(2, "unsupported kernel");
    m.hyper.c = r.scalar("c");
    m.hyper.epsilon = r.scalar("epsilon");
    m.hyper.gamma = r.scalar("gamma");
    auto xs = r.fields("x_scaler", 2);
    m.x_scaler = {r.number(xs[0]), r.number(xs[1])};
    auto ys = r.fields("y_scaler", 2);
    m.y_scaler = {r.number(ys[0]), r.number(ys[1])};
    m.tolerance = r.scalar("tolerance");
    m.kkt_residual = r.scalar("kkt_residual");
    m.iterations = r.count(r.fields("iterations", 1)[0]);
    m.converged = r.count(r.fields("converged", 1)[0]) != 0;
    m.capacity_m3 = r.scalar("capacity_m3");
    m.bias = r.scalar("bias");
    const std::size_t n = r.count(r.fields("support_vectors", 1)[0]);
    for (std::size_t i = 0; i < n; ++i) {
        std::string line;
        if (!std::getline(in, line)) throw ParseError(0, "model truncated in support vectors");
        auto toks = detail::split_ws(line);
        if (toks.size() != 2) throw ParseError(0, "support vector line needs 'x beta'");
        m.support_inputs.push_back(r.number(toks[0]));
        m.dual_coefs.push_back(r.number(toks[1]));
    }
    validate(m.hyper);
    if (!(m.x_scaler.hi > m.x_scaler.lo) || !(m.y_scaler.hi > m.y_scaler.lo)) {
        throw ParseError(0, "model scaler bounds must satisfy hi > lo");
    }
    return m;
}

void save_model(const std::filesystem::path& path, const SvrModel& model) {
    auto out = detail::open_out(path);
    write_model(out, model);
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

SvrModel load_model(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    try {
        return parse_model(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
}

}  // namespace resvol
