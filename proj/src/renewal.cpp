#include "lkr/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lkr {

double pmf_yule_simon(double alpha, long tau) {
    if (!(alpha > 0.0)) throw std::domain_error("pmf_yule_simon: alpha > 0");
    if (tau < 1) throw std::domain_error("pmf_yule_simon: tau >= 1");
    // alpha * Gamma(tau) Gamma(alpha+1) / Gamma(tau+alpha+1)
    return std::exp(std::log(alpha) + std::lgamma(double(tau)) +
                    std::lgamma(alpha + 1.0) -
                    std::lgamma(double(tau) + alpha + 1.0));
}

double survival_yule_simon(double alpha, long t) {
    if (t <= 0) return 1.0;
    // P(tau > t) = Gamma(t+1) Gamma(alpha+1) / Gamma(t+alpha+1)
    return std::exp(std::lgamma(double(t) + 1.0) + std::lgamma(alpha + 1.0) -
                    std::lgamma(double(t) + alpha + 1.0));
}

WaitingTimeDistribution WaitingTimeDistribution::deterministic(long tau0) {
    if (tau0 < 1)
        throw std::invalid_argument("deterministic waiting time: tau0 >= 1");
    WaitingTimeDistribution d;
    d.kind = Kind::deterministic;
    d.tau0 = tau0;
    return d;
}

WaitingTimeDistribution WaitingTimeDistribution::yule_simon(double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("yule_simon: alpha must be positive");
    WaitingTimeDistribution d;
    d.kind = Kind::yule_simon;
    d.alpha = alpha;
    return d;
}

WaitingTimeDistribution WaitingTimeDistribution::custom(
    std::vector<double> pmf, double tail_alpha) {
    WaitingTimeDistribution d;
    d.kind = Kind::custom;
    d.alpha = tail_alpha;
    d.table = std::move(pmf);
    if (d.table.empty())
        throw std::invalid_argument("custom waiting time: empty table");
    double total = 0.0;
    for (double w : d.table) {
        if (w < 0.0 || w > 1.0)
            throw std::invalid_argument("custom waiting time: pmf out of [0,1]");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument(
            "custom waiting time: table must close to 1 within 1e-12");
    return d;
}

WaitingTimeDistribution WaitingTimeDistribution::geometric(double p,
                                                           double closure) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("geometric: p in (0,1]");
    std::vector<double> pmf;
    double tail = 1.0;
    while (tail > closure) {
        pmf.push_back(p * tail);
        tail *= 1.0 - p;
    }
    pmf.back() += tail;   // fold the sub-closure remainder into the last bin
    return custom(std::move(pmf), std::numeric_limits<double>::infinity());
}

double WaitingTimeDistribution::pmf(long tau) const {
    if (tau < 1) throw std::domain_error("pmf: tau >= 1");
    switch (kind) {
        case Kind::deterministic:
            return tau == tau0 ? 1.0 : 0.0;
        case Kind::yule_simon:
            return pmf_yule_simon(alpha, tau);
        case Kind::custom:
            return tau <= long(table.size()) ? table[size_t(tau - 1)] : 0.0;
    }
    return 0.0;
}

double WaitingTimeDistribution::survival(long t) const {
    if (t <= 0) return 1.0;
    switch (kind) {
        case Kind::deterministic:
            return t < tau0 ? 1.0 : 0.0;
        case Kind::yule_simon:
            return survival_yule_simon(alpha, t);
        case Kind::custom: {
            if (t >= long(table.size())) return 0.0;
            // Sum the far side of the table: smaller and safer than 1-cdf.
            double s = 0.0;
            for (size_t k = table.size(); k > size_t(t); --k)
                s += table[k - 1];
            return s;
        }
    }
    return 0.0;
}

double WaitingTimeDistribution::mean_waiting_time() const {
    switch (kind) {
        case Kind::deterministic:
            return double(tau0);
        case Kind::yule_simon:
            return alpha > 1.0 ? alpha / (alpha - 1.0)
                               : std::numeric_limits<double>::infinity();
        case Kind::custom: {
            double m = 0.0;
            for (size_t k = 0; k < table.size(); ++k)
                m += double(k + 1) * table[k];
            return m;
        }
    }
    return 0.0;
}

long WaitingTimeDistribution::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    switch (kind) {
        case Kind::deterministic:
            return tau0;
        case Kind::yule_simon: {
            // Beta(alpha,1)-mixed geometric: exact including the far tail.
            double u = unif(rng);
            while (u == 0.0) u = unif(rng);
            double v = unif(rng);
            while (v == 0.0) v = unif(rng);
            const double q = std::pow(u, 1.0 / alpha);   // Beta(alpha,1)
            if (q >= 1.0) return 1;
            const double g = std::ceil(std::log(v) / std::log1p(-q));
            return g < 1.0 ? 1 : static_cast<long>(g);
        }
        case Kind::custom: {
            double u = unif(rng);
            for (size_t k = 0; k < table.size(); ++k) {
                u -= table[k];
                if (u <= 0.0) return long(k + 1);
            }
            return long(table.size());
        }
    }
    return 1;
}

std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t index) {
    // splitmix64 over base_seed advanced by the realization index.
    std::uint64_t z = base_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

NoiseRealization generate_realization(const WaitingTimeDistribution& dist,
                                      long T, double K, double kappa,
                                      std::mt19937_64& rng) {
    if (T < 1) throw std::invalid_argument("generate_realization: T >= 1");
    if (kappa < 0.0)
        throw std::invalid_argument("generate_realization: kappa >= 0");
    NoiseRealization r;
    r.T = T;
    r.kappa = kappa;
    r.box_half_width = std::sqrt(3.0 * kappa);
    r.kick_strengths.assign(size_t(T), K);
    r.event_flags.assign(size_t(T), 0);
    std::uniform_real_distribution<double> box(-r.box_half_width,
                                               r.box_half_width);
    long t = 0;
    while (true) {
        t += dist.sample(rng);
        if (t > T) break;
        // Event at renewal time t perturbs the kick applied at step t-1.
        r.event_flags[size_t(t - 1)] = 1;
        if (kappa > 0.0) r.kick_strengths[size_t(t - 1)] = K + box(rng);
    }
    return r;
}

std::vector<double> sprinkling_table(const WaitingTimeDistribution& dist,
                                     long T) {
    if (T < 1) throw std::invalid_argument("sprinkling_table: T >= 1");
    std::vector<double> w(size_t(T) + 1, 0.0), f(size_t(T) + 1, 0.0);
    for (long t = 1; t <= T; ++t) w[size_t(t)] = dist.pmf(t);
    for (long t = 1; t <= T; ++t) {
        double acc = w[size_t(t)];
        const double* wp = w.data() + 1;
        const double* fp = f.data() + (t - 1);
        for (long s = 1; s < t; ++s) acc += wp[s - 1] * fp[-(s - 1)];
        f[size_t(t)] = acc;
    }
    return f;
}

std::vector<double> mean_events_table(const std::vector<double>& f) {
    std::vector<double> n(f.size(), 0.0);
    double acc = 0.0;
    for (size_t t = 1; t < f.size(); ++t) {
        acc += f[t];
        n[t] = acc;
    }
    return n;
}

std::vector<double> decoherence_single_table(
    const WaitingTimeDistribution& dist, double t_c, long T) {
    if (!(t_c > 0.0))
        throw std::invalid_argument("decoherence_single_table: t_c > 0");
    const double q = std::exp(-1.0 / t_c);
    std::vector<double> w(size_t(T) + 1, 0.0), D(size_t(T) + 1, 0.0);
    for (long t = 1; t <= T; ++t) w[size_t(t)] = dist.pmf(t);
    D[0] = 1.0;
    for (long t = 1; t <= T; ++t) {
        double acc = dist.survival(t);
        const double* wp = w.data() + 1;
        const double* Dp = D.data() + (t - 1);
        for (long s = 1; s <= t; ++s) acc += q * wp[s - 1] * Dp[-(s - 1)];
        D[size_t(t)] = acc;
    }
    return D;
}

RenewalTables make_renewal_tables(const WaitingTimeDistribution& dist,
                                  double t_c, long T) {
    RenewalTables tab;
    tab.dist = dist;
    tab.T = T;
    tab.t_c = t_c;
    tab.q = std::exp(-1.0 / t_c);
    tab.f = sprinkling_table(dist, T);
    tab.Nbar = mean_events_table(tab.f);
    tab.D1 = decoherence_single_table(dist, t_c, T);
    return tab;
}

std::vector<double> decoherence_pair_row(const RenewalTables& tables,
                                         long t_prime, PairCoefficient coeff) {
    if (t_prime < 0 || t_prime > tables.T)
        throw std::invalid_argument("decoherence_pair_row: t' out of range");
    const double k = coeff == PairCoefficient::one_minus_q
                         ? 1.0 - tables.q
                         : 1.0 / tables.t_c;
    std::vector<double> row(size_t(t_prime) + 1);
    double acc = 0.0;
    row[0] = tables.D1[size_t(t_prime)];
    for (long s2 = 1; s2 <= t_prime; ++s2) {
        acc += tables.f[size_t(s2)] * tables.D1[size_t(t_prime - s2)];
        row[size_t(s2)] = tables.D1[size_t(t_prime)] + k * acc;
    }
    return row;
}

double decoherence_pair_exact(const WaitingTimeDistribution& dist, double t_c,
                              long a, long b) {
    if (a < 0 || b < a) throw std::invalid_argument("pair_exact: 0 <= a <= b");
    if (b > 256) throw std::invalid_argument("pair_exact: window too large");
    if (a == b) return 1.0;
    const double q = std::exp(-1.0 / t_c);
    const long d = b - a;
    const auto D1 = decoherence_single_table(dist, t_c, b);
    std::vector<double> w(size_t(b) + 1, 0.0);
    for (long t = 1; t <= b; ++t) w[size_t(t)] = dist.pmf(t);
    // G(a') = E[q^N(a'+d, a')] along the fixed-lag diagonal, conditioning
    // on the first event time u.
    std::vector<double> G(size_t(a) + 1, 0.0);
    for (long ap = 0; ap <= a; ++ap) {
        double acc = dist.survival(ap + d);
        for (long u = 1; u <= ap; ++u) acc += w[size_t(u)] * G[size_t(ap - u)];
        for (long u = ap + 1; u <= ap + d; ++u)
            acc += w[size_t(u)] * q * D1[size_t(ap + d - u)];
        G[size_t(ap)] = acc;
    }
    return G[size_t(a)];
}

RenewalMcStats mc_renewal_oracle(const WaitingTimeDistribution& dist,
                                 double t_c, long T,
                                 const std::vector<long>& sample_times,
                                 long n_realizations, std::uint64_t seed,
                                 long pair_a, long pair_b) {
    if (n_realizations < 1000)
        throw std::invalid_argument("mc_renewal_oracle: n >= 1000");
    const double q = std::exp(-1.0 / t_c);
    const size_t ns = sample_times.size();
    RenewalMcStats st;
    st.sample_times = sample_times;
    std::vector<double> event_counts(size_t(T) + 1, 0.0);
    std::vector<double> n_sum(ns, 0.0), n_sq(ns, 0.0);
    std::vector<double> d_sum(ns, 0.0), d_sq(ns, 0.0);
    double p_sum = 0.0, p_sq = 0.0;
    std::vector<long> events;
    for (long i = 0; i < n_realizations; ++i) {
        std::mt19937_64 rng(stream_seed(seed, std::uint64_t(i)));
        events.clear();
        long t = 0;
        while (true) {
            t += dist.sample(rng);
            if (t > T) break;
            events.push_back(t);
            event_counts[size_t(t)] += 1.0;
        }
        for (size_t k = 0; k < ns; ++k) {
            const auto n = double(std::upper_bound(events.begin(), events.end(),
                                                   sample_times[k]) -
                                  events.begin());
            n_sum[k] += n;
            n_sq[k] += n * n;
            const double dk = std::pow(q, n);
            d_sum[k] += dk;
            d_sq[k] += dk * dk;
        }
        if (pair_b > pair_a) {
            const auto nw = double(
                std::upper_bound(events.begin(), events.end(), pair_b) -
                std::upper_bound(events.begin(), events.end(), pair_a));
            const double dw = std::pow(q, nw);
            p_sum += dw;
            p_sq += dw * dw;
        }
    }
    const double n = double(n_realizations);
    auto finish = [n](double s, double sq, double& mean, double& se) {
        mean = s / n;
        const double var = std::max(0.0, sq / n - mean * mean);
        se = std::sqrt(var / n);
    };
    st.f_mean.resize(size_t(T) + 1);
    for (size_t t = 0; t <= size_t(T); ++t) st.f_mean[t] = event_counts[t] / n;
    st.Nbar_mean.resize(ns);
    st.Nbar_se.resize(ns);
    st.D1_mean.resize(ns);
    st.D1_se.resize(ns);
    for (size_t k = 0; k < ns; ++k) {
        finish(n_sum[k], n_sq[k], st.Nbar_mean[k], st.Nbar_se[k]);
        finish(d_sum[k], d_sq[k], st.D1_mean[k], st.D1_se[k]);
    }
    if (pair_b > pair_a) finish(p_sum, p_sq, st.pair_mean, st.pair_se);
    return st;
}

}  // namespace lkr
