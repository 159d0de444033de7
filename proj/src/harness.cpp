#include "lkr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace lkr {

void ExperimentConfig::validate() const {
    lattice.validate();
    if (kappa < 0.0) throw std::invalid_argument("config: kappa >= 0");
    if (T < 1) throw std::invalid_argument("config: T >= 1");
    if (n_realizations < 1) throw std::invalid_argument("config: n >= 1");
    if (!(guard_fraction > 0.0 && guard_fraction < 0.5))
        throw std::invalid_argument("config: guard_fraction in (0,0.5)");
    if (sample_times.empty())
        throw std::invalid_argument("config: sample_times empty");
    if (!std::is_sorted(sample_times.begin(), sample_times.end()))
        throw std::invalid_argument("config: sample_times must be sorted");
    if (sample_times.front() < 0 || sample_times.back() > T)
        throw std::invalid_argument("config: sample_times within [0,T]");
}

double ExperimentConfig::coherence_time() const {
    return 2.0 * lattice.hbar * lattice.hbar / kappa;
}

std::vector<long> log_spaced_times(long T, int per_decade) {
    std::vector<long> times{0};
    double t = 1.0;
    const double ratio = std::pow(10.0, 1.0 / per_decade);
    while (true) {
        const long it = std::min(T, static_cast<long>(std::llround(t)));
        if (it > times.back()) times.push_back(it);
        if (it >= T) break;
        t = std::max(t * ratio, t + 1.0);
    }
    return times;
}

namespace {

RealizationSeries propagate(const ExperimentConfig& config,
                            const SplitStepPropagator& prop, int index) {
    std::mt19937_64 rng(stream_seed(config.base_seed, std::uint64_t(index)));
    const auto noise = generate_realization(config.dist, config.T,
                                            config.lattice.K, config.kappa, rng);
    auto state = init_state(config.lattice);
    RealizationSeries out;
    out.var_p.reserve(config.sample_times.size());
    size_t k = 0;
    for (long t = 0; t <= config.T; ++t) {
        while (k < config.sample_times.size() && config.sample_times[k] == t) {
            const double leak =
                leakage_mass(state, config.lattice, config.guard_fraction);
            if (leak > config.leakage_threshold) {
                out.leaked = true;
                out.leak_time = t;
                return out;
            }
            const double v = momentum_variance(state, config.lattice);
            if (!std::isfinite(v))
                throw std::runtime_error("run_single_realization: non-finite");
            out.var_p.push_back(v);
            ++k;
        }
        if (t < config.T) prop.step(state, noise.kick_strengths[size_t(t)]);
    }
    return out;
}

}  // namespace

RealizationSeries run_single_realization(const ExperimentConfig& config,
                                         int index) {
    config.validate();
    SplitStepPropagator prop(config.lattice);
    return propagate(config, prop, index);
}

EnsembleResult run_ensemble(const ExperimentConfig& config) {
    config.validate();
    const int n = config.n_realizations;
    std::vector<RealizationSeries> results(static_cast<size_t>(n));
    int workers = config.n_workers > 0
                      ? config.n_workers
                      : int(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, n);
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        // One propagator (and FFTW plan set) per worker.
        SplitStepPropagator prop(config.lattice);
        while (!failed.load()) {
            const int i = next.fetch_add(1);
            if (i >= n) break;
            try {
                results[size_t(i)] = propagate(config, prop, i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    EnsembleResult res;
    res.sample_times = config.sample_times;
    res.base_seed = config.base_seed;
    const size_t ns = config.sample_times.size();
    std::vector<double> sum(ns, 0.0), sq(ns, 0.0);
    for (int i = 0; i < n; ++i) {   // fixed index order
        const auto& r = results[size_t(i)];
        if (r.leaked) {
            ++res.n_excluded;
            continue;
        }
        ++res.n_included;
        for (size_t k = 0; k < ns; ++k) {
            sum[k] += r.var_p[k];
            sq[k] += r.var_p[k] * r.var_p[k];
        }
    }
    if (res.n_excluded > n / 10)
        throw std::runtime_error(
            "run_ensemble: more than 10% of realizations tripped the leakage "
            "guard; increase M");
    res.mean_var.resize(ns);
    res.std_err.resize(ns);
    const double m = double(res.n_included);
    for (size_t k = 0; k < ns; ++k) {
        res.mean_var[k] = sum[k] / m;
        const double var =
            std::max(0.0, sq[k] / m - res.mean_var[k] * res.mean_var[k]);
        res.std_err[k] = res.n_included > 1 ? std::sqrt(var / m) : 0.0;
    }
    return res;
}

DstarFit fit_dstar(const std::vector<long>& times,
                   const std::vector<double>& var_p, double hbar) {
    if (times.size() != var_p.size() || times.size() < 4)
        throw std::invalid_argument("fit_dstar: bad series");
    auto sse = [&](double t_star) {
        const double ds = hbar * hbar * t_star;
        double s = 0.0;
        for (size_t k = 0; k < times.size(); ++k) {
            const double m =
                ds * t_star * (-std::expm1(-double(times[k]) / t_star));
            s += (var_p[k] - m) * (var_p[k] - m);
        }
        return s;
    };
    // Golden-section on log t*.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::log(1.0), hi = std::log(1e7);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = sse(std::exp(x1)), f2 = sse(std::exp(x2));
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = sse(std::exp(x1));
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = sse(std::exp(x2));
        }
    }
    DstarFit fit;
    fit.t_star = std::exp((lo + hi) / 2.0);
    fit.D_star = hbar * hbar * fit.t_star;
    fit.residual = std::sqrt(sse(fit.t_star) / double(times.size()));
    // No saturation: the fit runs into the search bound, or the data are
    // still growing over their last decade.
    if (double(times.back()) < 2.0 * fit.t_star || fit.t_star > 0.9e7)
        throw std::runtime_error("fit_dstar: no saturation within horizon");
    const auto tail = fit_exponent(times, var_p, double(times.back()) / 10.0,
                                   double(times.back()));
    if (tail.alpha > 0.5)
        throw std::runtime_error("fit_dstar: no saturation within horizon");
    return fit;
}

ExponentFit fit_exponent(const std::vector<long>& times,
                         const std::vector<double>& values, double t_min,
                         double t_max) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_exponent: size mismatch");
    if (!(t_max >= 10.0 * t_min) || !(t_min > 0.0))
        throw std::invalid_argument("fit_exponent: window must span a decade");
    std::vector<double> xs, ys;
    for (size_t k = 0; k < times.size(); ++k) {
        if (times[k] < t_min || times[k] > t_max) continue;
        if (!(values[k] > 0.0))
            throw std::invalid_argument("fit_exponent: nonpositive value");
        xs.push_back(std::log(double(times[k])));
        ys.push_back(std::log(values[k]));
    }
    const size_t n = xs.size();
    if (n < 3) throw std::invalid_argument("fit_exponent: too few points");
    double mx = 0.0, my = 0.0;
    for (size_t k = 0; k < n; ++k) { mx += xs[k]; my += ys[k]; }
    mx /= double(n); my /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t k = 0; k < n; ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    ExponentFit fit;
    fit.alpha = sxy / sxx;
    fit.log_prefactor = my - fit.alpha * mx;
    double ss = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double r = ys[k] - fit.log_prefactor - fit.alpha * xs[k];
        ss += r * r;
    }
    const double se =
        n > 2 ? std::sqrt(ss / double(n - 2) / sxx) : 0.0;
    fit.ci_halfwidth = 1.96 * se;
    return fit;
}

ComparisonReport compare_theory_sim(const std::vector<long>& times,
                                    const std::vector<double>& sim,
                                    const std::vector<double>& theory,
                                    double t_min, double t_max,
                                    double tolerance) {
    if (sim.size() != times.size() || theory.size() != times.size())
        throw std::invalid_argument("compare_theory_sim: mismatched grids");
    ComparisonReport rep;
    rep.tolerance = tolerance;
    for (size_t k = 0; k < times.size(); ++k) {
        if (times[k] < t_min || times[k] > t_max) continue;
        rep.times.push_back(times[k]);
        rep.rel_dev.push_back(std::abs(sim[k] - theory[k]) /
                              std::abs(theory[k]));
    }
    if (rep.rel_dev.empty())
        throw std::invalid_argument("compare_theory_sim: empty window");
    auto sorted = rep.rel_dev;
    std::sort(sorted.begin(), sorted.end());
    rep.max_dev = sorted.back();
    rep.median_dev = sorted[sorted.size() / 2];
    rep.pass = rep.median_dev <= tolerance;
    return rep;
}

}  // namespace lkr
