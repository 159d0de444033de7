#ifndef LKR_HARNESS_HPP
#define LKR_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lkr/renewal.hpp"
#include "lkr/rotor.hpp"

// Ensemble driver: propagate one rotator per noise realization, collect
// var p(t) with standard errors, and fit D*, subdiffusion exponents.

namespace lkr {

struct ExperimentConfig {
    LatticeParams lattice;
    WaitingTimeDistribution dist;
    double kappa = 0.0;
    long T = 10000;
    int n_realizations = 200;
    std::uint64_t base_seed = 1;
    std::vector<long> sample_times;   // sorted, within [0, T]
    double guard_fraction = 0.05;
    double leakage_threshold = 1e-6;
    int n_workers = 0;                // 0 = hardware concurrency

    void validate() const;
    double coherence_time() const;    // t_c = 2*hbar^2/kappa
};

// Log-spaced integer sample times 0..T, deduplicated, capped per decade.
std::vector<long> log_spaced_times(long T, int per_decade = 64);

struct RealizationSeries {
    std::vector<double> var_p;   // at config.sample_times
    bool leaked = false;         // tripped the guard band, excluded
    long leak_time = -1;
};

// Deterministic given (config.base_seed, index).
RealizationSeries run_single_realization(const ExperimentConfig& config,
                                         int index);

struct EnsembleResult {
    std::vector<long> sample_times;
    std::vector<double> mean_var;
    std::vector<double> std_err;
    int n_included = 0;
    int n_excluded = 0;
    std::uint64_t base_seed = 0;
};

// Mean and standard error across realizations; realizations that trip the
// leakage guard are excluded and counted. Throws if more than 10% are
// excluded. Merged in index order regardless of worker count.
EnsembleResult run_ensemble(const ExperimentConfig& config);

struct DstarFit {
    double D_star = 0.0;
    double t_star = 0.0;
    double residual = 0.0;   // root-mean-square residual of the fit
};

// Single-parameter least-squares fit of D* t* [1-exp(-t/t*)] with
// D* = hbar^2 t*. Throws if no saturation is observed.
DstarFit fit_dstar(const std::vector<long>& times,
                   const std::vector<double>& var_p, double hbar);

struct ExponentFit {
    double alpha = 0.0;
    double ci_halfwidth = 0.0;   // 95% from residual variance
    double log_prefactor = 0.0;
};

// OLS on (log t, log v) over t in [t_min, t_max]; the window must span at
// least one decade and contain only positive values.
ExponentFit fit_exponent(const std::vector<long>& times,
                         const std::vector<double>& values, double t_min,
                         double t_max);

struct ComparisonReport {
    std::vector<long> times;
    std::vector<double> rel_dev;   // |sim - theory| / |theory|
    double max_dev = 0.0;
    double median_dev = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Per-time relative deviation over the common window [t_min, t_max];
// the two series must share sample times. pass = median_dev <= tolerance.
ComparisonReport compare_theory_sim(const std::vector<long>& times,
                                    const std::vector<double>& sim,
                                    const std::vector<double>& theory,
                                    double t_min, double t_max,
                                    double tolerance);

}  // namespace lkr

#endif
