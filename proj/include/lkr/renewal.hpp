#ifndef LKR_RENEWAL_HPP
#define LKR_RENEWAL_HPP

#include <cstdint>
#include <random>
#include <vector>

// Discrete-time renewal machinery for the Levy kick noise: waiting-time
// laws on integers >= 1, noise realizations, and exact recursions for the
// sprinkling distribution f(t), the mean event count, and the one- and
// two-time decoherence factors E[q^N].

namespace lkr {

struct WaitingTimeDistribution {
    enum class Kind { deterministic, yule_simon, custom };

    Kind kind = Kind::deterministic;
    long tau0 = 1;               // deterministic period
    double alpha = 0.0;          // tail exponent (yule_simon, custom)
    std::vector<double> table;   // custom: table[k] = P(tau = k+1)

    static WaitingTimeDistribution deterministic(long tau0);
    static WaitingTimeDistribution yule_simon(double alpha);
    // Custom PMF on tau = 1..table.size(); must close to 1 within 1e-12
    // (any remainder is treated as an analytic power-law tail with the
    // given exponent and must itself be < 1e-12).
    static WaitingTimeDistribution custom(std::vector<double> pmf,
                                          double tail_alpha);
    static WaitingTimeDistribution geometric(double p, double closure = 1e-13);

    double pmf(long tau) const;
    double survival(long t) const;   // P(tau > t)
    // alpha/(alpha-1) for yule_simon; infinity when alpha <= 1.
    double mean_waiting_time() const;
    long sample(std::mt19937_64& rng) const;
};

// w(tau) = alpha*Gamma(tau)*Gamma(alpha+1)/Gamma(tau+alpha+1), via log-gamma.
double pmf_yule_simon(double alpha, long tau);
double survival_yule_simon(double alpha, long t);

struct NoiseRealization {
    long T = 0;
    std::vector<double> kick_strengths;   // K_n, n = 0..T-1
    std::vector<std::uint8_t> event_flags;
    double kappa = 0.0;
    double box_half_width = 0.0;          // W = sqrt(3*kappa)
};

// Counter-derived stream seed for realization `index` under `base_seed`.
std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t index);

// Renewal event times T1 = tau1, T1+tau2, ... truncated at T; kicks K at
// non-events and K + Uniform(-W, W) at events. event_flags[n] refers to the
// kick applied at step n, i.e. renewal time n+1 (first possible event t=1).
NoiseRealization generate_realization(const WaitingTimeDistribution& dist,
                                      long T, double K, double kappa,
                                      std::mt19937_64& rng);

// f(t) = w(t) + sum_{s<t} w(s) f(t-s); returned vector has f[0] = 0,
// entries 1..T valid.
std::vector<double> sprinkling_table(const WaitingTimeDistribution& dist,
                                     long T);

// Nbar(t) = sum_{s<=t} f(s); Nbar[0] = 0.
std::vector<double> mean_events_table(const std::vector<double>& f);

// D(t) = E[q^N(t,0)], q = exp(-1/t_c), by the exact recursion
// D(t) = S(t) + sum_{s<=t} w(s) q D(t-s).
std::vector<double> decoherence_single_table(
    const WaitingTimeDistribution& dist, double t_c, long T);

struct RenewalTables {
    WaitingTimeDistribution dist;
    long T = 0;
    double t_c = 0.0;
    double q = 0.0;                 // exp(-1/t_c)
    std::vector<double> f;          // sprinkling, index 0..T
    std::vector<double> Nbar;       // mean event count, index 0..T
    std::vector<double> D1;         // D(t,0), index 0..T
};

RenewalTables make_renewal_tables(const WaitingTimeDistribution& dist,
                                  double t_c, long T);

enum class PairCoefficient { one_minus_q, inverse_tc };

// Row D(t', t'') for t'' = 0..t' from the aging formula
// D(t',t'') = D(t',0) + coeff * sum_{s<=t''} f(s) D(t'-s,0).
std::vector<double> decoherence_pair_row(
    const RenewalTables& tables, long t_prime,
    PairCoefficient coeff = PairCoefficient::one_minus_q);

// Exact E[q^N(b,a)] over the window (a, b] for a fresh process; O(b^2),
// test-scale only (b <= 256 enforced).
double decoherence_pair_exact(const WaitingTimeDistribution& dist, double t_c,
                              long a, long b);

struct RenewalMcStats {
    std::vector<double> f_mean;          // empirical f(t), t = 0..T
    std::vector<long> sample_times;
    std::vector<double> Nbar_mean, Nbar_se;
    std::vector<double> D1_mean, D1_se;  // empirical E[q^N(t,0)]
    double pair_mean = 0.0, pair_se = 0.0;  // E[q^N(b,a)] for the window
};

// Monte Carlo oracle over n independent realizations; `pair` = (a, b)
// window, skipped when b <= 0.
RenewalMcStats mc_renewal_oracle(const WaitingTimeDistribution& dist,
                                 double t_c, long T,
                                 const std::vector<long>& sample_times,
                                 long n_realizations, std::uint64_t seed,
                                 long pair_a = 0, long pair_b = 0);

}  // namespace lkr

#endif
